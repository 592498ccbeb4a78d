#pragma once

#include <cmath>

namespace miw {

/// Position or displacement in at most two dimensions. One-dimensional
/// problems keep y at zero throughout.
struct Vec {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec& operator+=(const Vec& o) { x += o.x; y += o.y; return *this; }
    constexpr Vec& operator-=(const Vec& o) { x -= o.x; y -= o.y; return *this; }
    constexpr Vec& operator*=(double s) { x *= s; y *= s; return *this; }

    friend constexpr Vec operator+(Vec a, const Vec& b) { return a += b; }
    friend constexpr Vec operator-(Vec a, const Vec& b) { return a -= b; }
    friend constexpr Vec operator-(const Vec& a) { return {-a.x, -a.y}; }
    friend constexpr Vec operator*(Vec a, double s) { return a *= s; }
    friend constexpr Vec operator*(double s, Vec a) { return a *= s; }
    friend constexpr Vec operator/(Vec a, double s) { return {a.x / s, a.y / s}; }
    friend constexpr bool operator==(const Vec&, const Vec&) = default;
};

constexpr double dot(const Vec& a, const Vec& b) { return a.x * b.x + a.y * b.y; }
constexpr double norm2(const Vec& a) { return dot(a, a); }
inline double norm(const Vec& a) { return std::hypot(a.x, a.y); }

/// Symmetric 2x2 matrix (Hessians).
struct Sym2 {
    double xx = 0.0;
    double xy = 0.0;
    double yy = 0.0;

    constexpr Sym2& operator+=(const Sym2& o) { xx += o.xx; xy += o.xy; yy += o.yy; return *this; }
    constexpr double trace() const { return xx + yy; }
    constexpr Vec operator*(const Vec& v) const { return {xx * v.x + xy * v.y, xy * v.x + yy * v.y}; }
};

}  // namespace miw
