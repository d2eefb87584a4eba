#include "metrics.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"

namespace swarmloc {

double normal_quantile(double p) {
  if (!(p > 0.0) || !(p < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "quantile probability must lie in (0, 1)");
  }
  // Acklam's rational minimax coefficients.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double p_low = 0.02425;

  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }

  // One Halley step against the exact CDF tightens the tails.
  const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
  const double u = e * std::sqrt(2.0 * M_PI) * std::exp(x * x / 2.0);
  return x - u / (1.0 + x * u / 2.0);
}

double chi_squared_quantile(double p, double dof) {
  if (!(dof > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "chi-squared dof must be positive");
  }
  const double z = normal_quantile(p);
  const double f = 2.0 / (9.0 * dof);
  const double cube = 1.0 - f + z * std::sqrt(f);
  return dof * cube * cube * cube;
}

NeesBounds nees_bounds(int trials, int dim, double confidence) {
  if (trials < 1 || dim < 1) {
    throw Error(ErrorCode::kInvalidArgument, "bounds need at least one trial and one dof");
  }
  const double alpha = (1.0 - confidence) / 2.0;
  const double dof = static_cast<double>(trials) * dim;
  NeesBounds out;
  out.lower = chi_squared_quantile(alpha, dof) / trials;
  out.upper = chi_squared_quantile(1.0 - alpha, dof) / trials;
  return out;
}

double nees_of(const Eigen::VectorXd& error, const Eigen::MatrixXd& cov) {
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(cov);
  if (ldlt.info() != Eigen::Success) return -1.0;
  const Eigen::VectorXd x = ldlt.solve(error);
  // A zero pivot makes LDLT project instead of solve; demand a real solution.
  if ((cov * x - error).norm() > 1e-8 * error.norm()) return -1.0;
  const double v = error.dot(x);
  if (!std::isfinite(v) || v < 0.0) return -1.0;
  return v;
}

double rmse_of(const std::vector<std::vector<Vec3>>& errors) {
  double sum = 0.0;
  long count = 0;
  for (const auto& step : errors) {
    for (const Vec3& e : step) {
      sum += e.squaredNorm();
      count += 3;
    }
  }
  if (count == 0) {
    throw Error(ErrorCode::kInvalidArgument, "RMSE of an empty error series");
  }
  return std::sqrt(sum / count);
}

BoxStats box_stats(std::vector<double> values) {
  if (values.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "box stats of an empty sample");
  }
  std::sort(values.begin(), values.end());
  const auto quantile = [&](double q) {
    const double pos = q * (values.size() - 1);
    const size_t lo = static_cast<size_t>(pos);
    const size_t hi = std::min(lo + 1, values.size() - 1);
    const double w = pos - lo;
    return (1.0 - w) * values[lo] + w * values[hi];
  };
  BoxStats s;
  s.min = values.front();
  s.q1 = quantile(0.25);
  s.median = quantile(0.5);
  s.q3 = quantile(0.75);
  s.max = values.back();
  return s;
}

}  // namespace swarmloc
