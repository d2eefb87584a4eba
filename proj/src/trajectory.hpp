#ifndef SWARMLOC_TRAJECTORY_HPP
#define SWARMLOC_TRAJECTORY_HPP

#include <array>
#include <cstdint>
#include <vector>

#include "sensors.hpp"

namespace swarmloc {

// Sum-of-sinusoids excitation. Amplitudes are per-axis totals split across
// harmonics, so positions stay within `pos_amplitude_m` of each agent's
// center and rotation-vector components within `att_amplitude_rad` of zero.
// Defaults balance three pressures: inter-agent directions must sweep enough
// for range triangulation to relinearize toward the truth, peak velocity must
// keep the forward-Euler position defect of a coasting filter below the
// centimetre regression bound, and peak acceleration must stay small against
// the inflated gravity-direction update noise.
struct TrajectoryConfig {
  double duration_s = 60.0;
  uint64_t seed = 1;
  Vec3 workspace_half = Vec3(5.0, 5.0, 2.5);
  double min_separation_m = 2.5;
  int harmonics = 2;
  double pos_amplitude_m = 0.8;
  double pos_freq_min_hz = 0.04;
  double pos_freq_max_hz = 0.10;
  double att_amplitude_rad = 1.8;
  double att_freq_min_hz = 0.05;
  double att_freq_max_hz = 0.10;

  void validate() const;
};

struct Sinusoid {
  double amp = 0.0;
  double omega = 0.0;  // rad/s
  double phase = 0.0;
};

// Analytic per-agent path: closed-form position and rotation vector with
// exact first and second derivatives, valid for all t.
struct AgentPath {
  Vec3 center = Vec3::Zero();
  std::vector<std::array<Sinusoid, 3>> pos_terms;
  std::vector<std::array<Sinusoid, 3>> att_terms;

  Vec3 position(double t) const;
  Vec3 velocity(double t) const;
  Vec3 acceleration(double t) const;
  Vec3 att_vector(double t) const;
  Vec3 att_vector_rate(double t) const;
  Rotation attitude(double t) const;
  // Body-frame angular rate: d/dt exp(phi) = exp(phi)*skew(J_r(phi)*phi_dot).
  Vec3 body_rate(double t) const;
};

struct SwarmTrajectory {
  TrajectoryConfig config;
  std::vector<AgentPath> paths;  // agent i at index i-1
};

// Draws centers by rejection until pairwise separation holds, then one
// (amp, freq, phase) triple per harmonic and axis. One RNG stream in fixed
// draw order, so a given (config, seed, num_agents) pins every coefficient.
SwarmTrajectory sample_trajectory(const TrajectoryConfig& cfg, int num_agents,
                                  uint64_t seed);

// Samples the analytic paths on the IMU grid. ideal_gyr and ideal_acc are
// the interval increments over [t_k, t_k+dt], so one forward-Euler step
// reproduces the sampled attitude and velocity sequences exactly; position
// keeps the genuine O(dt) Euler defect.
SwarmTruth sample_truth(const SwarmTrajectory& traj, double imu_rate_hz,
                        const Vec3& gravity, const Vec3& mag_reference);

}  // namespace swarmloc

#endif
