#pragma once

#include "lightray/solvers/common.hpp"

namespace lightray {

/// x_{k+1} = x_k + omega A^T (b - A x_k) from x_0 = 0, with
/// omega = relaxation_factor / sigma_1^2.
ReconResult landweber(const LinearOperator& A, const Observation& obs, const Eigen::VectorXd* x_true,
                      const SolverOptions& opts);

}  // namespace lightray
