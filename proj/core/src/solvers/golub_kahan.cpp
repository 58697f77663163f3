#include "lightray/solvers/golub_kahan.hpp"

#include <algorithm>
#include <cmath>

#include "lightray/error.hpp"

namespace lightray {

namespace {

// A new basis vector is declared zero when its norm is below this absolute
// floor or has cancelled to this fraction of its size before orthogonalization.
constexpr double kAbsoluteBreakdown = 1e-14;
constexpr double kRelativeBreakdown = 1e-12;

bool vanished(double after, double before) {
  return after < std::max(kAbsoluteBreakdown, kRelativeBreakdown * before);
}

}  // namespace

Eigen::MatrixXd GolubKahanState::bidiagonal() const {
  const int n = k();
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n + 1, n);
  for (int j = 0; j < n; ++j) {
    B(j, j) = alpha[j];
    B(j + 1, j) = static_cast<std::size_t>(j + 1) < beta.size() ? beta[j + 1] : 0.0;
  }
  return B;
}

Eigen::MatrixXd GolubKahanState::u_matrix() const {
  Eigen::MatrixXd M(U.front().size(), static_cast<Eigen::Index>(U.size()));
  for (std::size_t j = 0; j < U.size(); ++j) M.col(static_cast<Eigen::Index>(j)) = U[j];
  return M;
}

Eigen::MatrixXd GolubKahanState::v_matrix() const {
  require(!V.empty(), ErrorCode::KrylovBreakdown, "no Krylov vectors yet");
  Eigen::MatrixXd M(V.front().size(), static_cast<Eigen::Index>(V.size()));
  for (std::size_t j = 0; j < V.size(); ++j) M.col(static_cast<Eigen::Index>(j)) = V[j];
  return M;
}

GolubKahanState golub_kahan_init(const Eigen::VectorXd& b) {
  const double beta1 = b.norm();
  require(beta1 > 0.0 && std::isfinite(beta1), ErrorCode::KrylovBreakdown,
          "Golub-Kahan breakdown before k=1: zero or non-finite right-hand side");
  GolubKahanState s;
  s.U.push_back(b / beta1);
  s.beta.push_back(beta1);
  return s;
}

bool golub_kahan_step(const LinearOperator& A, GolubKahanState& s, const SymmetricOperator* Q) {
  if (s.exhausted) return false;
  require(!s.U.empty(), ErrorCode::KrylovBreakdown, "uninitialized Golub-Kahan state");
  require(s.U.size() == s.V.size() + 1, ErrorCode::KrylovBreakdown, "Golub-Kahan state out of sync");
  const int k = s.k();
  const Eigen::VectorXd& u = s.U.back();

  Eigen::VectorXd w = A.apply_adjoint(u);
  if (k > 0) w -= s.beta[k] * s.V[k - 1];
  const double w_before = w.norm();
  // <v_j, w>_Q = (Q v_j)^T w, so reorthogonalization needs no extra Q products.
  for (int j = 0; j < k; ++j) w -= s.w(j).dot(w) * s.V[j];
  Eigen::VectorXd qw;
  double alpha = 0.0;
  if (Q) {
    qw = Q->apply(w);
    require(qw.allFinite(), ErrorCode::NonFinite, "covariance application produced non-finite values");
    alpha = std::sqrt(std::max(0.0, w.dot(qw)));
  } else {
    alpha = w.norm();
  }
  if (vanished(Q ? w.norm() : alpha, w_before) || !(alpha > kAbsoluteBreakdown)) {
    s.exhausted = true;
    return false;
  }
  s.alpha.push_back(alpha);
  s.V.push_back(w / alpha);
  if (Q) s.QV.push_back(qw / alpha);

  Eigen::VectorXd z = A.apply(s.w(k)) - alpha * u;
  const double z_before = z.norm();
  for (const auto& uj : s.U) z -= uj.dot(z) * uj;
  const double beta = z.norm();
  require(std::isfinite(beta), ErrorCode::NonFinite, "Golub-Kahan produced a non-finite vector");
  if (vanished(beta, z_before)) {
    s.beta.push_back(0.0);
    s.exhausted = true;
    return true;
  }
  s.beta.push_back(beta);
  s.U.push_back(z / beta);
  return true;
}

}  // namespace lightray
