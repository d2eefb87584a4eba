#include "estimator.hpp"

#include <cmath>

namespace swarmloc {

namespace {

constexpr double kVarianceFloor = 1e-18;

}  // namespace

void FilterConfig::validate() const {
  noise.validate();
  if (!(covariance_scale > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "covariance scale must be positive");
  }
  if (!(gate_threshold > 0.0) || !(aiding_dir_std > 0.0) ||
      !(aiding_gate_frac >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "bad filter thresholds");
  }
  if (!(mag_reference.norm() > 0.0) || !(gravity.norm() > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "reference field and gravity must be nonzero");
  }
}

FilterState initialize(const SwarmPose& prior_pose,
                       const std::vector<Vec3>& prior_vel,
                       const FilterConfig& cfg, uint64_t seed) {
  cfg.validate();
  const int n = prior_pose.num_agents();
  if (n < 2) {
    throw Error(ErrorCode::kUnsupportedSize, "filter needs at least two agents");
  }
  if (static_cast<int>(prior_vel.size()) != n - 1 ||
      static_cast<int>(prior_pose.rel_pos.size()) != n - 1) {
    throw Error(ErrorCode::kInvalidArgument, "prior dimensions disagree");
  }

  Rng rng(derive_seed(seed, 0x1171));
  FilterState st;
  st.pose = prior_pose;
  st.rel_vel = prior_vel;
  for (int i = 2; i <= n; ++i) {
    st.pose.rel_pos[i - 2] += rng.gauss3(cfg.noise.init_pos_std);
  }
  for (int i = 2; i <= n; ++i) {
    st.rel_vel[i - 2] += rng.gauss3(cfg.noise.init_vel_std);
  }
  for (int i = 1; i <= n; ++i) {
    st.pose.attitudes[i - 1] =
        st.pose.attitudes[i - 1] * exp_so3(rng.gauss3(cfg.noise.init_att_std));
  }

  const StateIndex idx(n);
  st.cov = Eigen::MatrixXd::Zero(idx.dim(), idx.dim());
  const double s = cfg.covariance_scale;
  for (int i = 2; i <= n; ++i) {
    st.cov.block<3, 3>(idx.pos_col(i), idx.pos_col(i)) =
        s * cfg.noise.init_pos_std * cfg.noise.init_pos_std * Mat3::Identity();
    st.cov.block<3, 3>(idx.vel_col(i), idx.vel_col(i)) =
        s * cfg.noise.init_vel_std * cfg.noise.init_vel_std * Mat3::Identity();
  }
  for (int i = 1; i <= n; ++i) {
    st.cov.block<3, 3>(idx.att_col(i), idx.att_col(i)) =
        s * cfg.noise.init_att_std * cfg.noise.init_att_std * Mat3::Identity();
  }
  return st;
}

Eigen::MatrixXd process_jacobian(const FilterState& st,
                                 const std::vector<ImuSample>& samples,
                                 double dt) {
  const int n = st.num_agents();
  const StateIndex idx(n);
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(idx.dim(), idx.dim());
  const Mat3 c1 = st.pose.attitudes[0].matrix();
  const Vec3 f1 = samples[0].accel;
  for (int i = 2; i <= n; ++i) {
    a.block<3, 3>(idx.pos_col(i), idx.vel_col(i)) = dt * Mat3::Identity();
    const Mat3 ci = st.pose.attitudes[i - 1].matrix();
    a.block<3, 3>(idx.vel_col(i), idx.att_col(i)) =
        -dt * ci * skew(samples[i - 1].accel);
    a.block<3, 3>(idx.vel_col(i), idx.att_col(1)) = dt * c1 * skew(f1);
  }
  for (int i = 1; i <= n; ++i) {
    a.block<3, 3>(idx.att_col(i), idx.att_col(i)) =
        exp_so3(-dt * samples[i - 1].gyro).matrix();
  }
  return a;
}

void predict(FilterState& st, const std::vector<ImuSample>& samples, double dt,
             const FilterConfig& cfg) {
  const int n = st.num_agents();
  if (static_cast<int>(samples.size()) != n) {
    throw Error(ErrorCode::kInvalidArgument, "need one IMU sample per agent");
  }
  if (!(dt > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "step must be positive");
  }
  const StateIndex idx(n);
  const int dim = idx.dim();

  const Eigen::MatrixXd a = process_jacobian(st, samples, dt);
  const Mat3 c1 = st.pose.attitudes[0].matrix();
  const Vec3 f1 = samples[0].accel;

  // Additive process noise. The reference agent's accelerometer noise feeds
  // every relative velocity, correlating the blocks pairwise.
  const double s = cfg.covariance_scale;
  const double q_acc =
      s * cfg.noise.accel_std * cfg.noise.accel_std / cfg.noise.imu_rate_hz;
  const double q_gyr =
      s * cfg.noise.gyro_std * cfg.noise.gyro_std / cfg.noise.imu_rate_hz;
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(dim, dim);
  for (int i = 2; i <= n; ++i) {
    for (int j = 2; j <= n; ++j) {
      const double q = (i == j) ? 2.0 * q_acc : q_acc;
      g.block<3, 3>(idx.vel_col(i), idx.vel_col(j)) = dt * q * Mat3::Identity();
    }
  }
  for (int i = 1; i <= n; ++i) {
    g.block<3, 3>(idx.att_col(i), idx.att_col(i)) =
        dt * q_gyr * Mat3::Identity();
  }

  st.cov = a * st.cov * a.transpose() + g;
  st.cov = 0.5 * (st.cov + st.cov.transpose()).eval();

  // State advance with the pre-step estimate on the right-hand side.
  for (int i = 2; i <= n; ++i) {
    st.pose.rel_pos[i - 2] += dt * st.rel_vel[i - 2];
  }
  for (int i = 2; i <= n; ++i) {
    st.rel_vel[i - 2] +=
        dt * (st.pose.attitudes[i - 1] * samples[i - 1].accel - c1 * f1);
  }
  for (int i = 1; i <= n; ++i) {
    st.pose.attitudes[i - 1] =
        st.pose.attitudes[i - 1] * exp_so3(dt * samples[i - 1].gyro);
  }
}

Eigen::VectorXd kalman_update(Eigen::MatrixXd& cov, const Eigen::MatrixXd& h,
                              const Eigen::VectorXd& z,
                              const Eigen::MatrixXd& r) {
  const Eigen::MatrixXd pht = cov * h.transpose();
  const Eigen::MatrixXd s = h * pht + r;
  const Eigen::MatrixXd k = s.ldlt().solve(pht.transpose()).transpose();
  const Eigen::MatrixXd b =
      Eigen::MatrixXd::Identity(cov.rows(), cov.cols()) - k * h;
  cov = b * cov * b.transpose() + k * r * k.transpose();
  cov = 0.5 * (cov + cov.transpose()).eval();
  return k * z;
}

void apply_correction(FilterState& st, const Eigen::VectorXd& dx) {
  const int n = st.num_agents();
  const StateIndex idx(n);
  if (dx.size() != idx.dim()) {
    throw Error(ErrorCode::kInvalidArgument, "correction dimension mismatch");
  }
  for (int i = 2; i <= n; ++i) {
    st.pose.rel_pos[i - 2] += dx.segment<3>(idx.pos_col(i));
    st.rel_vel[i - 2] += dx.segment<3>(idx.vel_col(i));
  }
  for (int i = 1; i <= n; ++i) {
    st.pose.attitudes[i - 1] =
        st.pose.attitudes[i - 1] * exp_so3(dx.segment<3>(idx.att_col(i)));
  }
}

UpdateOutcome update_range(FilterState& st, const RangeMeasurement& m,
                           const SwarmLayout& layout, const FilterConfig& cfg) {
  Eigen::RowVectorXd h;
  double predicted;
  try {
    h = range_jacobian(st.pose, layout, m.tag_a, m.tag_b);
    const auto [aa, la] = layout.agent_of(m.tag_a);
    const auto [ab, lb] = layout.agent_of(m.tag_b);
    predicted = (tag_position(st.pose, layout, ab, lb) -
                 tag_position(st.pose, layout, aa, la))
                    .norm();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kDegenerateGeometry) {
      return UpdateOutcome::kDegenerate;
    }
    throw;
  }

  const double rr =
      cfg.covariance_scale * std::max(m.variance, kVarianceFloor);
  const double innovation = m.range - predicted;

  if (cfg.gating) {
    const double s = (h * st.cov * h.transpose())(0, 0) + rr;
    if (innovation * innovation / s > cfg.gate_threshold) {
      return UpdateOutcome::kGated;
    }
  }

  Eigen::VectorXd z(1);
  z(0) = innovation;
  Eigen::MatrixXd r(1, 1);
  r(0, 0) = rr;
  const Eigen::VectorXd dx = kalman_update(st.cov, h, z, r);
  apply_correction(st, dx);
  return UpdateOutcome::kApplied;
}

void update_mag(FilterState& st, const Vec3& y_mag, int agent,
                const FilterConfig& cfg) {
  const StateIndex idx(st.num_agents());
  const Vec3 predicted =
      st.pose.attitude_of(agent).matrix().transpose() * cfg.mag_reference;

  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(3, idx.dim());
  h.block<3, 3>(0, idx.att_col(agent)) = skew(predicted);

  const double var = cfg.covariance_scale *
                     std::max(cfg.noise.mag_std * cfg.noise.mag_std, kVarianceFloor);
  const Eigen::MatrixXd r = var * Eigen::MatrixXd::Identity(3, 3);
  const Eigen::VectorXd dx = kalman_update(st.cov, h, y_mag - predicted, r);
  apply_correction(st, dx);
}

UpdateOutcome update_acc_aiding(FilterState& st, const Vec3& accel, int agent,
                                const FilterConfig& cfg) {
  const double gn = cfg.gravity.norm();
  if (std::abs(accel.norm() - gn) > cfg.aiding_gate_frac * gn) {
    return UpdateOutcome::kGated;
  }
  const StateIndex idx(st.num_agents());
  const Vec3 up = -cfg.gravity / gn;  // unit, opposite gravity
  const Vec3 predicted = st.pose.attitude_of(agent).matrix().transpose() * up;
  const Vec3 measured = accel / accel.norm();

  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(3, idx.dim());
  h.block<3, 3>(0, idx.att_col(agent)) = skew(predicted);

  const double var =
      cfg.covariance_scale * cfg.aiding_dir_std * cfg.aiding_dir_std;
  const Eigen::MatrixXd r = var * Eigen::MatrixXd::Identity(3, 3);
  const Eigen::VectorXd dx = kalman_update(st.cov, h, measured - predicted, r);
  apply_correction(st, dx);
  return UpdateOutcome::kApplied;
}

}  // namespace swarmloc
