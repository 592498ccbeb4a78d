#pragma once

#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "miw/error.hpp"
#include "miw/vec.hpp"

// Expects `expr` to throw miw::Error of the given kind.
#define CHECK_FAILS_WITH(expr, expected)                                   \
    do {                                                                   \
        bool raised_ = false;                                              \
        try {                                                              \
            (void)(expr);                                                  \
        } catch (const miw::Error& e_) {                                   \
            raised_ = true;                                                \
            CHECK_MESSAGE(e_.kind() == (expected), e_.what());             \
        }                                                                  \
        CHECK_MESSAGE(raised_, "no miw::Error raised by " #expr);          \
    } while (false)

namespace testing {

inline double rel_err(double a, double b, double scale_floor = 1e-8)
{
    return std::abs(a - b) / std::max(std::max(std::abs(a), std::abs(b)), scale_floor);
}

// Distinct random points with pairwise separation at least `min_gap`.
inline std::vector<miw::Vec> random_points(std::mt19937_64& rng, std::size_t n, int dim, double lo, double hi,
                                           double min_gap = 1e-3)
{
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<miw::Vec> pts;
    while (pts.size() < n) {
        miw::Vec p{u(rng), dim == 2 ? u(rng) : 0.0};
        bool ok = true;
        for (const auto& q : pts) {
            ok = ok && miw::norm(p - q) > min_gap;
        }
        if (ok) {
            pts.push_back(p);
        }
    }
    return pts;
}

}  // namespace testing
