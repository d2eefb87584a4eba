#include "trajectory.hpp"

#include <cmath>
#include <cstdio>
#include <string>

#include "rng.hpp"

namespace swarmloc {

namespace {

constexpr uint64_t kTrajectoryStream = 0x747261;
constexpr int kMaxPlacementAttempts = 1000;
constexpr int kMaxPlacementRestarts = 200;

static bool placed_all(const std::vector<Vec3>& centers, int num_agents) {
  return static_cast<int>(centers.size()) == num_agents;
}

double eval_sum(const std::vector<std::array<Sinusoid, 3>>& terms, int axis,
                double t, int derivative) {
  double v = 0.0;
  for (const auto& row : terms) {
    const Sinusoid& s = row[axis];
    const double arg = s.omega * t + s.phase;
    switch (derivative) {
      case 0: v += s.amp * std::sin(arg); break;
      case 1: v += s.amp * s.omega * std::cos(arg); break;
      default: v -= s.amp * s.omega * s.omega * std::sin(arg); break;
    }
  }
  return v;
}

Vec3 eval_vec(const std::vector<std::array<Sinusoid, 3>>& terms, double t,
              int derivative) {
  return Vec3(eval_sum(terms, 0, t, derivative),
              eval_sum(terms, 1, t, derivative),
              eval_sum(terms, 2, t, derivative));
}

std::vector<std::array<Sinusoid, 3>> draw_terms(Rng& rng, int harmonics,
                                                double amplitude,
                                                double freq_min,
                                                double freq_max) {
  std::vector<std::array<Sinusoid, 3>> terms(harmonics);
  const double per_term = amplitude / harmonics;
  for (auto& row : terms) {
    for (auto& s : row) {
      s.amp = per_term * (0.7 + 0.3 * rng.uniform());
      s.omega = 2.0 * M_PI * (freq_min + (freq_max - freq_min) * rng.uniform());
      s.phase = 2.0 * M_PI * rng.uniform();
    }
  }
  return terms;
}

}  // namespace

void TrajectoryConfig::validate() const {
  if (!(duration_s > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "trajectory duration must be positive");
  }
  if (harmonics < 1) {
    throw Error(ErrorCode::kInvalidArgument, "trajectory needs at least one harmonic");
  }
  if (pos_amplitude_m < 0.0 || att_amplitude_rad < 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "excitation amplitudes must be nonnegative");
  }
  if (!(pos_freq_min_hz > 0.0) || pos_freq_max_hz < pos_freq_min_hz ||
      !(att_freq_min_hz > 0.0) || att_freq_max_hz < att_freq_min_hz) {
    throw Error(ErrorCode::kInvalidArgument, "excitation frequency bands are empty");
  }
  if (!(min_separation_m > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "agent separation must be positive");
  }
  for (int axis = 0; axis < 3; ++axis) {
    if (!(workspace_half[axis] > pos_amplitude_m)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "workspace too small for the position amplitude");
    }
  }
}

Vec3 AgentPath::position(double t) const { return center + eval_vec(pos_terms, t, 0); }
Vec3 AgentPath::velocity(double t) const { return eval_vec(pos_terms, t, 1); }
Vec3 AgentPath::acceleration(double t) const { return eval_vec(pos_terms, t, 2); }
Vec3 AgentPath::att_vector(double t) const { return eval_vec(att_terms, t, 0); }
Vec3 AgentPath::att_vector_rate(double t) const { return eval_vec(att_terms, t, 1); }
Rotation AgentPath::attitude(double t) const { return exp_so3(att_vector(t)); }

Vec3 AgentPath::body_rate(double t) const {
  return so3_right_jacobian(att_vector(t)) * att_vector_rate(t);
}

SwarmTrajectory sample_trajectory(const TrajectoryConfig& cfg, int num_agents,
                                  uint64_t seed) {
  cfg.validate();
  if (num_agents < 1) {
    throw Error(ErrorCode::kInvalidArgument, "need at least one agent");
  }
  Rng rng(derive_seed(seed, kTrajectoryStream));

  SwarmTrajectory traj;
  traj.config = cfg;
  traj.paths.reserve(num_agents);

  const Vec3 margin = cfg.workspace_half - Vec3::Constant(cfg.pos_amplitude_m);
  // Maximin placement with whole-set restarts: each agent takes the candidate
  // farthest from the agents placed so far, which spreads the constellation
  // across all three axes instead of clustering in the wide ones. A tight box
  // can wedge any greedy scheme, so on failure the partial layout is discarded.
  std::vector<Vec3> centers;
  for (int restart = 0; restart < kMaxPlacementRestarts && !placed_all(centers, num_agents);
       ++restart) {
    centers.clear();
    for (int a = 0; a < num_agents; ++a) {
      Vec3 best = Vec3::Zero();
      double best_gap = -1.0;
      for (int attempt = 0; attempt < kPlacementCandidates; ++attempt) {
        Vec3 c;
        for (int axis = 0; axis < 3; ++axis) {
          c[axis] = margin[axis] * (2.0 * rng.uniform() - 1.0);
        }
        double gap = std::numeric_limits<double>::infinity();
        for (const Vec3& prev : centers) gap = std::min(gap, (c - prev).norm());
        if (gap > best_gap) {
          best_gap = gap;
          best = c;
        }
      }
      if (!centers.empty() && best_gap < cfg.min_separation_m) break;
      centers.push_back(best);
    }
  }
  if (!placed_all(centers, num_agents)) {
    throw Error(ErrorCode::kDegenerateGeometry,
                "could not place " + std::to_string(num_agents) +
                    " agents at separation " +
                    std::to_string(cfg.min_separation_m) + " m");
  }

  for (int a = 0; a < num_agents; ++a) {
    AgentPath path;
    path.center = centers[a];
    path.pos_terms = draw_terms(rng, cfg.harmonics, cfg.pos_amplitude_m,
                                cfg.pos_freq_min_hz, cfg.pos_freq_max_hz);
    path.att_terms = draw_terms(rng, cfg.harmonics, cfg.att_amplitude_rad,
                                cfg.att_freq_min_hz, cfg.att_freq_max_hz);
    traj.paths.push_back(std::move(path));
  }
  return traj;
}

SwarmTruth sample_truth(const SwarmTrajectory& traj, double imu_rate_hz,
                        const Vec3& gravity, const Vec3& mag_reference) {
  if (!(imu_rate_hz > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "IMU rate must be positive");
  }
  if (mag_reference.norm() <= 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "field reference must be nonzero");
  }
  const int n = static_cast<int>(traj.paths.size());

  SwarmTruth truth;
  truth.dt = 1.0 / imu_rate_hz;
  truth.steps = static_cast<int>(std::floor(traj.config.duration_s * imu_rate_hz)) + 1;
  truth.num_agents = n;
  truth.pose.resize(truth.steps);
  truth.rel_vel.resize(truth.steps);
  truth.ideal_acc.resize(truth.steps);
  truth.ideal_gyr.resize(truth.steps);
  truth.ideal_mag.resize(truth.steps);

  for (int k = 0; k < truth.steps; ++k) {
    const double t = k * truth.dt;
    const double t_next = (k + 1) * truth.dt;
    SwarmPose& pose = truth.pose[k];
    pose.rel_pos.resize(n - 1);
    pose.attitudes.reserve(n);
    truth.rel_vel[k].resize(n - 1);
    truth.ideal_acc[k].resize(n);
    truth.ideal_gyr[k].resize(n);
    truth.ideal_mag[k].resize(n);

    const Vec3 p_ref = traj.paths[0].position(t);
    const Vec3 v_ref = traj.paths[0].velocity(t);
    for (int a = 0; a < n; ++a) {
      const AgentPath& path = traj.paths[a];
      const Rotation c_now = path.attitude(t);
      const Rotation c_next = path.attitude(t_next);
      const Vec3 dv = path.velocity(t_next) - path.velocity(t);

      pose.attitudes.push_back(c_now);
      if (a > 0) {
        pose.rel_pos[a - 1] = path.position(t) - p_ref;
        truth.rel_vel[k][a - 1] = path.velocity(t) - v_ref;
      }
      truth.ideal_gyr[k][a] = log_so3(c_now.inverse() * c_next) / truth.dt;
      truth.ideal_acc[k][a] =
          c_now.matrix().transpose() * (dv / truth.dt - gravity);
      truth.ideal_mag[k][a] = c_now.matrix().transpose() * mag_reference;
    }
  }
  return truth;
}

}  // namespace swarmloc
