#include "modalshm/state_space.hpp"

#include <stdexcept>

namespace modalshm {

void validate(const StateSpaceRealization& realization) {
    const Eigen::Index k = realization.E.rows();
    if (k < 1) {
        throw std::invalid_argument("realization: order must be at least 1");
    }
    if (realization.E.cols() != k || realization.A.rows() != k ||
        realization.A.cols() != k || realization.B.rows() != k ||
        realization.C.cols() != k) {
        throw std::invalid_argument("realization: inconsistent matrix shapes");
    }
    if (realization.B.cols() < 1 || realization.C.rows() < 1) {
        throw std::invalid_argument("realization: need at least one input and output");
    }
    if (!realization.E.allFinite() || !realization.A.allFinite() ||
        !realization.B.allFinite() || !realization.C.allFinite()) {
        throw std::invalid_argument("realization: non-finite entries");
    }
}

}  // namespace modalshm
