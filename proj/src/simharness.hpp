#ifndef SWARMLOC_SIMHARNESS_HPP
#define SWARMLOC_SIMHARNESS_HPP

#include <string>
#include <vector>

#include "estimator.hpp"
#include "metrics.hpp"
#include "trajectory.hpp"

namespace swarmloc {

// One fully reproducible experiment: layout, measurement graph, sensor
// noise, excitation, filter settings, and the trial batch. The single
// NoiseSpec drives both the simulated sensors and the filter's noise model.
struct ScenarioConfig {
  SwarmLayout layout;
  RangeGraph graph;
  NoiseSpec noise;
  TrajectoryConfig trajectory;
  FilterConfig filter;
  int trials = 20;
  uint64_t base_seed = 1;
  // Degradation switch: every two-tag agent flies the first two-tag agent's
  // attitude profile, so identical body baselines stay parallel in the
  // absolute frame for the whole run.
  bool lock_two_tag_attitudes = false;

  void validate() const;
};

struct TrialMetrics {
  double rmse_pos = 0.0;  // m
  double rmse_vel = 0.0;  // m/s
  double rmse_att = 0.0;  // rad
  int gated_ranges = 0;
  int degenerate_ranges = 0;
  int gated_aiding = 0;
};

// Per-step record of one trial. The heavyweight series (truth, estimate,
// error, 3-sigma envelope) are captured only on request.
struct TrialResult {
  TrialMetrics metrics;
  std::vector<double> t;
  std::vector<double> nees;      // full error state, -1 where excluded
  std::vector<double> nees_pos;  // relative-position block
  std::vector<double> nees_att;  // attitude block
  int nees_excluded = 0;

  bool has_series = false;
  SwarmTruth truth;
  std::vector<Eigen::VectorXd> estimate;  // [rel_pos, rel_vel, log(att)]
  std::vector<Eigen::VectorXd> error;     // error-state chart
  std::vector<Eigen::VectorXd> sigma3;    // 3*sqrt(diag P)
};

struct MetricsReport {
  std::vector<TrialMetrics> trials;
  std::vector<std::string> failures;  // "trial <i>: <message>"
  double avg_rmse_pos = 0.0;
  double avg_rmse_vel = 0.0;
  double avg_rmse_att = 0.0;
  BoxStats pos_box, vel_box, att_box;
  std::vector<double> t;
  std::vector<double> avg_nees;  // mean over trials, -1 where no trial counted
  NeesBounds band;               // for (completed trials, error-state dim)
  int state_dim = 0;
  double runtime_s = 0.0;  // wall clock; never serialized
};

// Truth for one trial: excitation sampled from the trajectory seed, then
// the analytic paths discretized on the IMU grid.
SwarmTruth generate_truth(const ScenarioConfig& cfg);

// Simulates one trial and runs the filter over it: predict at the IMU rate
// (sample k-1 carries [t_{k-1}, t_k]), then that step's scheduled ranges,
// then magnetometer and gravity-direction updates on ranging epochs.
// Deterministic in (cfg, seed).
TrialResult run_trial(const ScenarioConfig& cfg, uint64_t seed,
                      bool record_series = false);

// Trials at seeds base_seed + 0..trials-1, optionally on worker threads.
// Aggregation is in trial order, so thread count cannot change the report.
MetricsReport run_monte_carlo(const ScenarioConfig& cfg, int threads = 1);

}  // namespace swarmloc

#endif
