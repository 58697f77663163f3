#pragma once

#include <vector>

#include <Eigen/Core>

#include "lightray/linear_operator.hpp"

namespace lightray {

/// Golub-Kahan bidiagonalization, optionally generalized with a covariance Q:
///
///     beta_1 u_1 = b,  alpha_k v_k = A^T u_k - beta_k v_{k-1},
///     beta_{k+1} u_{k+1} = A Q v_k - alpha_k u_k,
///
/// with V orthonormal in the Q inner product. After k steps
/// A Q V_k = U_{k+1} B_k, B_k the (k+1) x k lower bidiagonal matrix.
/// Both bases are fully reorthogonalized.
struct GolubKahanState {
  std::vector<Eigen::VectorXd> U;   // k+1 columns (k if beta_{k+1} vanished)
  std::vector<Eigen::VectorXd> V;   // k columns
  std::vector<Eigen::VectorXd> QV;  // Q v_j; empty when Q is the identity
  std::vector<double> alpha;        // alpha_1..alpha_k
  std::vector<double> beta;         // beta_1..beta_{k+1}
  /// No further step is possible: the Krylov space is exhausted.
  bool exhausted = false;

  int k() const { return static_cast<int>(V.size()); }
  double beta1() const { return beta.front(); }
  const Eigen::VectorXd& w(int j) const { return QV.empty() ? V[j] : QV[j]; }

  Eigen::MatrixXd bidiagonal() const;
  Eigen::MatrixXd u_matrix() const;
  Eigen::MatrixXd v_matrix() const;
};

/// Starts the recurrence with u_1 = b / ||b||. A zero b is a breakdown.
GolubKahanState golub_kahan_init(const Eigen::VectorXd& b);

/// Extends the factorization by one column. Returns false (and marks the
/// state exhausted) when alpha_{k+1} vanishes; a vanishing beta_{k+1} still
/// adds the column but also marks the state exhausted.
bool golub_kahan_step(const LinearOperator& A, GolubKahanState& state, const SymmetricOperator* Q = nullptr);

}  // namespace lightray
