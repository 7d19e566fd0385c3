#pragma once

#include <Eigen/Dense>

namespace wills::detail {

struct LpResult {
  double value = 0.0;        // optimal objective
  Eigen::VectorXd maximizer; // an optimal point
};

/// Maximize <c, x> subject to A x <= b, given a strictly feasible point x0.
/// Dense tableau simplex with Bland's rule. Throws ErrorKind::infeasible when
/// the objective is unbounded and ErrorKind::convergence if the pivot budget
/// is exhausted.
LpResult maximize_linear(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                         const Eigen::VectorXd& c, const Eigen::VectorXd& x0);

} // namespace wills::detail
