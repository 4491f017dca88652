#pragma once

#include <Eigen/Core>

namespace modalshm {

/// Real descriptor-form LTI realization  E x' = A x + B u,  y = C x.
/// The feedthrough term is identically zero.
struct StateSpaceRealization {
    Eigen::MatrixXd E;
    Eigen::MatrixXd A;
    Eigen::MatrixXd B;
    Eigen::MatrixXd C;
    /// Singular values of the projection step that produced the realization,
    /// in descending order. Empty when the realization was built directly.
    Eigen::VectorXd singular_values;

    Eigen::Index order() const { return E.rows(); }
    Eigen::Index n_inputs() const { return B.cols(); }
    Eigen::Index n_outputs() const { return C.rows(); }
};

/// Checks shape consistency and finiteness; throws std::invalid_argument.
void validate(const StateSpaceRealization& realization);

}  // namespace modalshm
