#include "dronesim/nnls.hpp"

#include <array>
#include <cmath>
#include <limits>

#include <Eigen/QR>

namespace dronesim {

namespace {

using PassiveMatrix = Eigen::Matrix<double, 4, Eigen::Dynamic, 0, 4, 4>;
using PassiveVector = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 4, 1>;

/// Unconstrained least squares restricted to the passive columns; others are zero.
Vec4 solve_passive(const Mat4& a, const Vec4& b, const std::array<bool, 4>& passive) {
  int k = 0;
  std::array<int, 4> cols{};
  for (int j = 0; j < 4; ++j) {
    if (passive[j]) cols[k++] = j;
  }
  Vec4 z = Vec4::Zero();
  if (k == 0) return z;
  PassiveMatrix sub(4, k);
  for (int c = 0; c < k; ++c) sub.col(c) = a.col(cols[c]);
  const PassiveVector sol = sub.colPivHouseholderQr().solve(b);
  for (int c = 0; c < k; ++c) z[cols[c]] = sol[c];
  return z;
}

}  // namespace

NnlsResult nnls_solve(const Mat4& a, const Vec4& b, int max_iterations) {
  NnlsResult result;
  Vec4& x = result.x;
  std::array<bool, 4> passive{false, false, false, false};

  const double tol = 10.0 * std::numeric_limits<double>::epsilon() *
                     a.cwiseAbs().colwise().sum().maxCoeff() * 4.0 *
                     std::max(1.0, b.cwiseAbs().maxCoeff());

  Vec4 w = a.transpose() * (b - a * x);
  while (true) {
    int best = -1;
    double best_w = tol;
    for (int j = 0; j < 4; ++j) {
      if (!passive[j] && w[j] > best_w) {
        best_w = w[j];
        best = j;
      }
    }
    if (best < 0) break;
    passive[best] = true;

    while (true) {
      if (++result.iterations > max_iterations) {
        throw NnlsIterationError("nnls: iteration cap " + std::to_string(max_iterations) +
                                 " exceeded");
      }
      Vec4 z = solve_passive(a, b, passive);
      bool feasible = true;
      for (int j = 0; j < 4; ++j) {
        if (passive[j] && z[j] <= 0.0) feasible = false;
      }
      if (feasible) {
        x = z;
        break;
      }
      // Step toward z until the first passive coordinate hits zero.
      double alpha = std::numeric_limits<double>::infinity();
      int blocking = -1;
      for (int j = 0; j < 4; ++j) {
        if (passive[j] && z[j] <= 0.0) {
          const double step = x[j] / (x[j] - z[j]);
          if (step < alpha) {
            alpha = step;
            blocking = j;
          }
        }
      }
      x += alpha * (z - x);
      x[blocking] = 0.0;
      for (int j = 0; j < 4; ++j) {
        if (passive[j] && x[j] <= 0.0) {
          passive[j] = false;
          x[j] = 0.0;
        }
      }
    }
    w = a.transpose() * (b - a * x);
  }
  return result;
}

}  // namespace dronesim
