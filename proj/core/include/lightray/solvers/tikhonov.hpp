#pragma once

#include "lightray/solvers/common.hpp"
#include "lightray/solvers/golub_kahan.hpp"

namespace lightray {

/// Hybrid projected Tikhonov: at iteration k,
/// x_k = argmin over R(V_k) of ||Ax - b||^2 + lambda_k ||x||^2,
/// with lambda_k chosen by opts.lambda_rule.
ReconResult hybrid_tikhonov(const LinearOperator& A, const Observation& obs, const Eigen::VectorXd* x_true,
                            const SolverOptions& opts);

/// Generalized hybrid Tikhonov with prior covariance Q: x_k = Q y_k, y_k
/// minimizing ||A Q y - b||^2 + lambda ||y||_Q^2 over R(V_k) from the
/// Q-generalized Golub-Kahan process.
ReconResult gen_tikhonov(const LinearOperator& A, const Observation& obs, const SymmetricOperator& Q,
                         const Eigen::VectorXd* x_true, const SolverOptions& opts);

/// Solution coefficients of min ||B z - beta1 e1||^2 + lambda ||z||^2 for a
/// small bidiagonal B (exposed for tests).
Eigen::VectorXd projected_tikhonov_solve(const Eigen::MatrixXd& B, double beta1, double lambda);

}  // namespace lightray
