#ifndef SWARMLOC_ESTIMATOR_HPP
#define SWARMLOC_ESTIMATOR_HPP

#include <cstdint>

#include "sensors.hpp"

namespace swarmloc {

// Filter tuning. covariance_scale multiplies the initial covariance, the
// process noise, and every measurement covariance by the same factor, which
// leaves the gains (and therefore the estimates) unchanged while deflating
// the filter's reported uncertainty: the overconfidence control for
// consistency experiments.
struct FilterConfig {
  NoiseSpec noise;
  bool gating = false;
  double gate_threshold = 10.8;  // chi-squared, 1 dof, 99.9%
  double covariance_scale = 1.0;
  // Field vector in the absolute frame, same units as mag_std (micro-tesla).
  // The magnitude sets the direction information per sample: ~50 uT against
  // 0.85 uT noise reads the field direction to ~0.017 rad.
  Vec3 mag_reference = Vec3(18.0, 0.0, -48.0);
  Vec3 gravity = Vec3(0.0, 0.0, -9.81);
  bool accel_aiding = true;
  double aiding_gate_frac = 0.05;  // accept when | ||f|| - g | <= frac * g
  double aiding_dir_std = 0.2;     // direction pseudo-measurement, rad (inflated: absorbs vehicle acceleration)

  void validate() const;
};

// Error state: [dr_2..dr_N, dv_2..dv_N, dphi_1..dphi_N], with the attitude
// error right-multiplicative in the body frame: C = C_hat exp(dphi^).
struct FilterState {
  SwarmPose pose;
  std::vector<Vec3> rel_vel;  // agents 2..N
  Eigen::MatrixXd cov;

  int num_agents() const { return pose.num_agents(); }
  StateIndex index() const { return StateIndex(num_agents()); }
};

enum class UpdateOutcome { kApplied, kGated, kDegenerate };

// Estimate = prior perturbed by Gaussian draws at the configured initial
// standard deviations; covariance diagonal carries those variances (times
// covariance_scale).
FilterState initialize(const SwarmPose& prior_pose,
                       const std::vector<Vec3>& prior_vel,
                       const FilterConfig& cfg, uint64_t seed);

// One forward-Euler step over [t, t+dt] driven by per-agent IMU samples
// (interval-average specific force and angular rate). Exact for attitude
// and velocity when the samples are exact interval averages.
void predict(FilterState& st, const std::vector<ImuSample>& samples, double dt,
             const FilterConfig& cfg);

// Error-state transition matrix of one predict step at the current estimate.
Eigen::MatrixXd process_jacobian(const FilterState& st,
                                 const std::vector<ImuSample>& samples,
                                 double dt);

// Scalar sequential range update, Joseph-form covariance. Optionally gated
// on the normalized innovation; skips (kDegenerate) when the predicted tag
// separation is below 1e-9 m.
UpdateOutcome update_range(FilterState& st, const RangeMeasurement& m,
                           const SwarmLayout& layout, const FilterConfig& cfg);

// Body-frame field direction measurement of one agent's attitude. The raw
// measurement enters unnormalized so the Gaussian noise model stays intact.
void update_mag(FilterState& st, const Vec3& y_mag, int agent,
                const FilterConfig& cfg);

// Gravity-direction aiding from the accelerometer, gated on specific-force
// magnitude so it only fires in quasi-static moments.
UpdateOutcome update_acc_aiding(FilterState& st, const Vec3& accel, int agent,
                                const FilterConfig& cfg);

// Textbook linear update shared by every measurement path: correction
// K z and Joseph-form covariance for H (k x dim), innovation z, noise R.
Eigen::VectorXd kalman_update(Eigen::MatrixXd& cov, const Eigen::MatrixXd& h,
                              const Eigen::VectorXd& z, const Eigen::MatrixXd& r);

// Injects an error-state vector into the estimate (additive for position
// and velocity, right-multiplicative for attitudes).
void apply_correction(FilterState& st, const Eigen::VectorXd& dx);

}  // namespace swarmloc

#endif
