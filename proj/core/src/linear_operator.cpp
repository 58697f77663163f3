#include "lightray/linear_operator.hpp"

#include <string>

#include "lightray/error.hpp"

namespace lightray {

namespace {

void check_length(Eigen::Index got, Eigen::Index want) {
  require(got == want, ErrorCode::DimensionMismatch,
          "vector has " + std::to_string(got) + " entries, operator expects " + std::to_string(want));
}

}  // namespace

Eigen::VectorXd DenseOperator::apply(const Eigen::VectorXd& x) const {
  check_length(x.size(), matrix_.cols());
  return matrix_ * x;
}

Eigen::VectorXd DenseOperator::apply_adjoint(const Eigen::VectorXd& y) const {
  check_length(y.size(), matrix_.rows());
  return matrix_.transpose() * y;
}

Eigen::VectorXd IdentityCovariance::apply(const Eigen::VectorXd& x) const {
  check_length(x.size(), n_);
  return x;
}

Eigen::VectorXd DenseCovariance::apply(const Eigen::VectorXd& x) const {
  check_length(x.size(), matrix_.rows());
  return matrix_ * x;
}

}  // namespace lightray
