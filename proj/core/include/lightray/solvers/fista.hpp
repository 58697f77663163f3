#pragma once

#include <vector>

#include "lightray/solvers/common.hpp"

namespace lightray {

struct ProxGradientStep {
  Eigen::VectorXd x;
  Eigen::VectorXd Ax;
  double lipschitz = 0.0;  // accepted L
  int backtracks = 0;
};

/// One backtracking proximal-gradient step from y for
/// F(x) = ||Ax - b||^2 + lambda ||x||_1. Starting from L, L grows by eta until
/// F(p) <= f(y) + <p - y, grad f(y)> + L/2 ||p - y||^2 + lambda ||p||_1 with
/// p = shrink(y - grad f(y) / L, lambda / L).
ProxGradientStep prox_gradient_step(const LinearOperator& A, const Eigen::VectorXd& b, double lambda,
                                    const Eigen::VectorXd& y, const Eigen::VectorXd& Ay, double L, double eta);

/// FISTA with backtracking (Beck and Teboulle) from x_0 = 0.
ReconResult fista(const LinearOperator& A, const Observation& obs, double lambda, const Eigen::VectorXd* x_true,
                  const SolverOptions& opts);

/// 15 log-spaced values in [1e-6, 1] * ||A^T b||_inf.
std::vector<double> default_fista_lambda_grid(const LinearOperator& A, const Eigen::VectorXd& b);

struct FistaSweep {
  ReconResult best;
  std::vector<double> lambdas;
  std::vector<double> min_rre;  // per lambda
  std::size_t best_index = 0;
};

/// Full FISTA run per lambda of the rule (the default grid for Optimal, the
/// listed grid for Sweep, a single run for Fixed); keeps the run with the
/// smallest minimum RRE. Needs x_true unless the rule is Fixed.
FistaSweep fista_sweep(const LinearOperator& A, const Observation& obs, const Eigen::VectorXd* x_true,
                       const SolverOptions& opts);

}  // namespace lightray
