#pragma once

#include <Eigen/Core>

namespace lightray {

/// Real linear map R^cols -> R^rows with its transpose.
class LinearOperator {
 public:
  virtual ~LinearOperator() = default;

  virtual Eigen::Index rows() const = 0;
  virtual Eigen::Index cols() const = 0;
  virtual Eigen::VectorXd apply(const Eigen::VectorXd& x) const = 0;
  virtual Eigen::VectorXd apply_adjoint(const Eigen::VectorXd& y) const = 0;
};

/// Symmetric positive semidefinite map R^n -> R^n (prior covariances).
class SymmetricOperator {
 public:
  virtual ~SymmetricOperator() = default;

  virtual Eigen::Index size() const = 0;
  virtual Eigen::VectorXd apply(const Eigen::VectorXd& x) const = 0;
};

class DenseOperator final : public LinearOperator {
 public:
  explicit DenseOperator(Eigen::MatrixXd matrix) : matrix_(std::move(matrix)) {}

  Eigen::Index rows() const override { return matrix_.rows(); }
  Eigen::Index cols() const override { return matrix_.cols(); }
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const override;
  Eigen::VectorXd apply_adjoint(const Eigen::VectorXd& y) const override;

  const Eigen::MatrixXd& matrix() const { return matrix_; }

 private:
  Eigen::MatrixXd matrix_;
};

class IdentityCovariance final : public SymmetricOperator {
 public:
  explicit IdentityCovariance(Eigen::Index n) : n_(n) {}

  Eigen::Index size() const override { return n_; }
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const override;

 private:
  Eigen::Index n_;
};

class DenseCovariance final : public SymmetricOperator {
 public:
  explicit DenseCovariance(Eigen::MatrixXd matrix) : matrix_(std::move(matrix)) {}

  Eigen::Index size() const override { return matrix_.rows(); }
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const override;

 private:
  Eigen::MatrixXd matrix_;
};

}  // namespace lightray
