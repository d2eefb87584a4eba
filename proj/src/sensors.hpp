#ifndef SWARMLOC_SENSORS_HPP
#define SWARMLOC_SENSORS_HPP

#include <cstdint>
#include <vector>

#include "layout.hpp"
#include "rigidity.hpp"
#include "rng.hpp"

namespace swarmloc {

// Per-axis sensor noise and timing. Accel/gyro values are per-sample standard
// deviations at imu_rate_hz; the magnetometer std shares units with the
// reference field vector (micro-tesla against a ~50 uT Earth field).
struct NoiseSpec {
  double accel_std = 0.026;     // m/s^2
  double gyro_std = 0.0025;     // rad/s
  double mag_std = 0.85;        // uT
  double uwb_std = 0.1;         // m
  double imu_rate_hz = 100.0;
  double uwb_rate_hz = 20.0;
  int uwb_channels = 3;
  double init_pos_std = 0.45;   // m
  double init_vel_std = 0.45;   // m/s
  double init_att_std = 0.1;    // rad

  void validate() const;
};

// Instantaneous swarm pose: positions of agents 2..N relative to agent 1
// (absolute frame) and every agent's attitude.
struct SwarmPose {
  std::vector<Vec3> rel_pos;       // size N-1, agent i at index i-2
  std::vector<Rotation> attitudes; // size N

  int num_agents() const { return static_cast<int>(attitudes.size()); }
  Vec3 rel_pos_of(int agent) const {
    if (agent == 1) return Vec3::Zero();
    return rel_pos.at(agent - 2);
  }
  const Rotation& attitude_of(int agent) const { return attitudes.at(agent - 1); }
};

// Error-state column layout: [dr_2..dr_N | dv_2..dv_N | dphi_1..dphi_N].
struct StateIndex {
  int num_agents = 0;

  explicit StateIndex(int n) : num_agents(n) {}
  int dim() const { return 9 * num_agents - 6; }
  int pos_col(int agent) const { return 3 * (agent - 2); }
  int vel_col(int agent) const { return 3 * (num_agents - 1) + 3 * (agent - 2); }
  int att_col(int agent) const { return 6 * (num_agents - 1) + 3 * (agent - 1); }
};

// Ground-truth sampling of one trial on the IMU grid. ideal_acc/ideal_gyr
// hold the noise-free specific-force and angular-rate averages over
// [t_k, t_k+dt], which makes one forward-Euler step across that interval
// exact for attitude and velocity. ideal_mag is the reference field vector
// resolved in body axes at t_k.
struct SwarmTruth {
  double dt = 0.01;
  int steps = 0;
  int num_agents = 0;
  std::vector<SwarmPose> pose;                 // [k]
  std::vector<std::vector<Vec3>> rel_vel;      // [k][agent-2]
  std::vector<std::vector<Vec3>> ideal_acc;    // [k][agent-1]
  std::vector<std::vector<Vec3>> ideal_gyr;    // [k][agent-1]
  std::vector<std::vector<Vec3>> ideal_mag;    // [k][agent-1]

  double time_of(int k) const { return k * dt; }
};

struct ImuSample {
  double t = 0.0;
  Vec3 accel = Vec3::Zero();  // specific force, body frame
  Vec3 gyro = Vec3::Zero();   // angular rate, body frame
  Vec3 mag = Vec3::Zero();    // field vector, body frame
};

struct RangeMeasurement {
  double t = 0.0;
  int tag_a = 0;  // global tag ids
  int tag_b = 0;
  double range = 0.0;
  double variance = 0.0;
};

struct RangeEvent {
  double t = 0.0;
  int tag_a = 0;
  int tag_b = 0;
  int channel = 0;
};

// Position of one tag relative to agent 1's IMU point, absolute frame.
Vec3 tag_position(const SwarmPose& pose, const SwarmLayout& layout, int agent,
                  int local_tag);

// Distance between two global tags at the given pose.
double predict_range(const SwarmPose& pose, const SwarmLayout& layout,
                     int gtag_a, int gtag_b);

// Row of the measurement Jacobian over the error state. Position blocks are
// the signed unit direction (identical to a rigidity-matrix row on tags);
// attitude blocks couple through the lever arm of each tag offset. Velocity
// columns are zero. Throws on tag separation <= 1e-9 m.
Eigen::RowVectorXd range_jacobian(const SwarmPose& pose, const SwarmLayout& layout,
                                  int gtag_a, int gtag_b);

// White per-axis noise on the ideal streams; one independent substream per
// agent, so editing one agent's trajectory leaves other agents' draws alone.
std::vector<std::vector<ImuSample>> simulate_imu(const SwarmTruth& truth,
                                                 const NoiseSpec& noise,
                                                 uint64_t seed);

// Round-robin TDMA over the graph's pairs: up to `channels` pairs per epoch,
// no tag participates twice in one epoch, conflicting pairs keep their place
// at the front of the next epoch's queue.
std::vector<RangeEvent> schedule_ranging(const SwarmLayout& layout,
                                         const RangeGraph& graph,
                                         double uwb_rate_hz, int channels,
                                         double duration_s);

// Truth ranges plus white noise; event times snap to the nearest IMU step.
std::vector<RangeMeasurement> simulate_ranges(const SwarmTruth& truth,
                                              const SwarmLayout& layout,
                                              const std::vector<RangeEvent>& schedule,
                                              const NoiseSpec& noise,
                                              uint64_t seed);

}  // namespace swarmloc

#endif
