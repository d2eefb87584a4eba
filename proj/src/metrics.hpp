#ifndef SWARMLOC_METRICS_HPP
#define SWARMLOC_METRICS_HPP

#include <vector>

#include "sensors.hpp"

namespace swarmloc {

// Standard normal quantile, rational approximation with one Halley
// refinement step; absolute error well under 1e-9 on (0, 1).
double normal_quantile(double p);

// Chi-squared quantile via the Wilson-Hilferty cube. Relative error is a
// fraction of a percent for dof >= 3 and shrinks with dof.
double chi_squared_quantile(double p, double dof);

struct NeesBounds {
  double lower = 0.0;
  double upper = 0.0;
};

// Two-sided band for the mean of `trials` independent chi-squared(dim)
// variables: quantiles of chi-squared(trials*dim) scaled by 1/trials.
NeesBounds nees_bounds(int trials, int dim, double confidence = 0.95);

// error' * P^{-1} * error via LDLT. Returns -1 when P is not usable along
// the error direction (singular factorization, nonfinite or negative form).
double nees_of(const Eigen::VectorXd& error, const Eigen::MatrixXd& cov);

// Square root of the mean over steps, vectors, and axes of squared per-axis
// errors, so a constant error vector e scores ||e||/sqrt(3).
double rmse_of(const std::vector<std::vector<Vec3>>& errors);

struct BoxStats {
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
};

// Five-number summary with linearly interpolated quartiles.
BoxStats box_stats(std::vector<double> values);

}  // namespace swarmloc

#endif
