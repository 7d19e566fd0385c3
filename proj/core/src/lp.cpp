#include "lp.hpp"

#include <cstddef>
#include <vector>

#include "willslab/errors.hpp"

namespace wills::detail {

// Shift to y = x - x0 so the slack basis of {A y <= b - A x0} is feasible,
// then split y into nonnegative parts and run a dense tableau simplex with
// Bland's rule (no cycling, fine at the small sizes used here).
LpResult maximize_linear(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                         const Eigen::VectorXd& c, const Eigen::VectorXd& x0) {
  const int m = static_cast<int>(A.rows());
  const int d = static_cast<int>(A.cols());
  const Eigen::VectorXd s0 = b - A * x0;
  if ((s0.array() <= 0.0).any())
    throw_error(ErrorKind::input, "maximize_linear: x0 is not strictly feasible");

  const int n = 2 * d + m;
  Eigen::MatrixXd T(m, n);
  T.block(0, 0, m, d) = A;
  T.block(0, d, m, d) = -A;
  T.block(0, 2 * d, m, m) = Eigen::MatrixXd::Identity(m, m);
  Eigen::VectorXd rhs = s0;

  Eigen::VectorXd reduced(n);
  reduced.head(d) = c;
  reduced.segment(d, d) = -c;
  reduced.tail(m).setZero();
  double objective = 0.0;

  std::vector<int> basis(m);
  for (int i = 0; i < m; ++i) basis[i] = 2 * d + i;

  const double eps = 1e-10;
  const long max_pivots = 20000L + 200L * static_cast<long>(n);
  for (long pivot_count = 0;; ++pivot_count) {
    if (pivot_count > max_pivots)
      throw_error(ErrorKind::convergence,
                  "maximize_linear: pivot budget exhausted");

    int enter = -1;
    for (int j = 0; j < n; ++j) {
      if (reduced[j] > eps) {
        enter = j;
        break;
      }
    }
    if (enter < 0) break; // optimal

    int leave = -1;
    double best_ratio = 0.0;
    for (int i = 0; i < m; ++i) {
      if (T(i, enter) > eps) {
        const double ratio = rhs[i] / T(i, enter);
        if (leave < 0 || ratio < best_ratio - eps ||
            (ratio < best_ratio + eps && basis[i] < basis[leave])) {
          leave = i;
          best_ratio = ratio;
        }
      }
    }
    if (leave < 0)
      throw_error(ErrorKind::infeasible,
                  "maximize_linear: objective unbounded (polytope not compact)");

    const double pivot = T(leave, enter);
    T.row(leave) /= pivot;
    rhs[leave] /= pivot;
    for (int i = 0; i < m; ++i) {
      if (i == leave) continue;
      const double f = T(i, enter);
      if (f != 0.0) {
        T.row(i) -= f * T.row(leave);
        rhs[i] -= f * rhs[leave];
      }
    }
    const double fr = reduced[enter];
    reduced -= fr * T.row(leave).transpose();
    objective += fr * rhs[leave];
    basis[leave] = enter;
  }

  Eigen::VectorXd y = Eigen::VectorXd::Zero(d);
  for (int i = 0; i < m; ++i) {
    if (basis[i] < d)
      y[basis[i]] += rhs[i];
    else if (basis[i] < 2 * d)
      y[basis[i] - d] -= rhs[i];
  }
  LpResult result;
  result.maximizer = x0 + y;
  result.value = c.dot(x0) + objective;
  return result;
}

} // namespace wills::detail
