#include "lightray/solvers/landweber.hpp"

#include "lightray/error.hpp"

namespace lightray {

ReconResult landweber(const LinearOperator& A, const Observation& obs, const Eigen::VectorXd* x_true,
                      const SolverOptions& opts) {
  opts.validate();
  require(obs.b.size() == A.rows(), ErrorCode::DimensionMismatch, "data length does not match the operator");
  require(!x_true || x_true->size() == A.cols(), ErrorCode::DimensionMismatch, "x_true length mismatch");

  const double sigma1 = resolve_sigma1(A, opts);
  const double omega = opts.relaxation_factor / (sigma1 * sigma1);

  detail::IterationTracker tracker(obs, x_true, opts);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(A.cols());
  Eigen::VectorXd r = obs.b;  // b - A x
  for (int k = 1; k <= opts.max_iters; ++k) {
    x += omega * A.apply_adjoint(r);
    r = obs.b - A.apply(x);
    if (tracker.record(k, x, -r, r.squaredNorm(), 0.0)) return tracker.finish(std::move(x), StopReason::Discrepancy, 0.0);
  }
  return tracker.finish(std::move(x), StopReason::MaxIters, 0.0);
}

}  // namespace lightray
