#include "miw/ensemble.hpp"

#include <cmath>
#include <string>

#include "miw/error.hpp"

namespace miw {

std::vector<std::size_t> WorldEnsemble::indices_of(WorldRole role) const
{
    std::vector<std::size_t> out;
    for (std::size_t n = 0; n < roles.size(); ++n) {
        if (roles[n] == role) {
            out.push_back(n);
        }
    }
    return out;
}

std::vector<std::size_t> WorldEnsemble::active_indices() const
{
    std::vector<std::size_t> out;
    for (std::size_t n = 0; n < roles.size(); ++n) {
        if (roles[n] == WorldRole::Free || roles[n] == WorldRole::NodeDomain) {
            out.push_back(n);
        }
    }
    return out;
}

void WorldEnsemble::validate() const
{
    const std::size_t n = positions.size();
    if (n == 0) {
        fail(ErrorKind::EmptyEnsemble, "ensemble has no worlds");
    }
    if (dim != 1 && dim != 2) {
        fail(ErrorKind::InvalidLayout, "ensemble dimension must be 1 or 2");
    }
    if (velocities.size() != n || bandwidths.size() != n || roles.size() != n || signs.size() != n) {
        fail(ErrorKind::InvalidLayout, "ensemble arrays differ in length");
    }
    for (std::size_t i = 0; i < n; ++i) {
        const std::string where = " at world " + std::to_string(i);
        if (!(bandwidths[i] > 0.0)) {
            fail(ErrorKind::InvalidLayout, "nonpositive bandwidth" + where);
        }
        if (std::isinf(bandwidths[i]) && roles[i] != WorldRole::FixedBoundary && roles[i] != WorldRole::Node) {
            fail(ErrorKind::InvalidLayout, "infinite bandwidth on a movable world" + where);
        }
        if (signs[i] != 1 && !(signs[i] == -1 && roles[i] == WorldRole::Node)) {
            fail(ErrorKind::InvalidLayout, "sign must be +1, or -1 on node worlds" + where);
        }
        if (dim == 1 && positions[i].y != 0.0) {
            fail(ErrorKind::InvalidLayout, "one-dimensional world with nonzero y" + where);
        }
    }
}

}  // namespace miw
