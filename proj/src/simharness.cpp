#include "simharness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <thread>

namespace swarmloc {

namespace {

FilterConfig effective_filter(const ScenarioConfig& cfg) {
  FilterConfig fcfg = cfg.filter;
  fcfg.noise = cfg.noise;
  return fcfg;
}

void lock_two_tag_paths(const SwarmLayout& layout, SwarmTrajectory& traj) {
  int leader = 0;
  for (int a = 1; a <= layout.num_agents(); ++a) {
    if (!layout.is_two_tag(a)) continue;
    if (leader == 0) {
      leader = a;
    } else {
      traj.paths[a - 1].att_terms = traj.paths[leader - 1].att_terms;
    }
  }
}

}  // namespace

void ScenarioConfig::validate() const {
  layout.validate();
  if (graph.num_tags != layout.num_tags()) {
    throw Error(ErrorCode::kInvalidArgument,
                "range graph is sized for a different tag count");
  }
  graph.validate();
  trajectory.validate();
  effective_filter(*this).validate();
  if (trials < 1) {
    throw Error(ErrorCode::kInvalidArgument, "need at least one trial");
  }
}

SwarmTruth generate_truth(const ScenarioConfig& cfg) {
  SwarmTrajectory traj =
      sample_trajectory(cfg.trajectory, cfg.layout.num_agents(), cfg.trajectory.seed);
  if (cfg.lock_two_tag_attitudes) lock_two_tag_paths(cfg.layout, traj);
  return sample_truth(traj, cfg.noise.imu_rate_hz, cfg.filter.gravity,
                      cfg.filter.mag_reference);
}

TrialResult run_trial(const ScenarioConfig& cfg, uint64_t seed, bool record_series) {
  cfg.validate();
  const FilterConfig fcfg = effective_filter(cfg);
  const SwarmTruth truth = generate_truth(cfg);
  const int n = truth.num_agents;
  const StateIndex idx(n);
  const int dim = idx.dim();

  const auto imu = simulate_imu(truth, cfg.noise, seed);
  const auto schedule = schedule_ranging(cfg.layout, cfg.graph, cfg.noise.uwb_rate_hz,
                                         cfg.noise.uwb_channels,
                                         cfg.trajectory.duration_s);
  const auto ranges = simulate_ranges(truth, cfg.layout, schedule, cfg.noise, seed);

  std::vector<std::vector<int>> ranges_at(truth.steps);
  for (size_t i = 0; i < ranges.size(); ++i) {
    const int k = static_cast<int>(std::lround(ranges[i].t / truth.dt));
    if (k >= 0 && k < truth.steps) ranges_at[k].push_back(static_cast<int>(i));
  }

  FilterState st = initialize(truth.pose[0], truth.rel_vel[0], fcfg, seed);
  const int epoch_stride = std::max(
      1, static_cast<int>(std::lround(cfg.noise.imu_rate_hz / cfg.noise.uwb_rate_hz)));

  TrialResult out;
  out.t.reserve(truth.steps);
  out.nees.reserve(truth.steps);
  out.nees_pos.reserve(truth.steps);
  out.nees_att.reserve(truth.steps);
  std::vector<std::vector<Vec3>> pos_errs(truth.steps, std::vector<Vec3>(n - 1));
  std::vector<std::vector<Vec3>> vel_errs(truth.steps, std::vector<Vec3>(n - 1));
  std::vector<std::vector<Vec3>> att_errs(truth.steps, std::vector<Vec3>(n));

  std::vector<ImuSample> step_samples(n);
  Eigen::VectorXd e(dim);
  for (int k = 0; k < truth.steps; ++k) {
    if (k > 0) {
      for (int a = 0; a < n; ++a) step_samples[a] = imu[a][k - 1];
      predict(st, step_samples, truth.dt, fcfg);
    }
    for (const int mi : ranges_at[k]) {
      switch (update_range(st, ranges[mi], cfg.layout, fcfg)) {
        case UpdateOutcome::kGated: ++out.metrics.gated_ranges; break;
        case UpdateOutcome::kDegenerate: ++out.metrics.degenerate_ranges; break;
        case UpdateOutcome::kApplied: break;
      }
    }
    if (k % epoch_stride == 0) {
      for (int a = 1; a <= n; ++a) {
        update_mag(st, imu[a - 1][k].mag, a, fcfg);
        if (fcfg.accel_aiding &&
            update_acc_aiding(st, imu[a - 1][k].accel, a, fcfg) ==
                UpdateOutcome::kGated) {
          ++out.metrics.gated_aiding;
        }
      }
    }

    const SwarmPose& pose = truth.pose[k];
    for (int a = 2; a <= n; ++a) {
      const Vec3 dp = pose.rel_pos[a - 2] - st.pose.rel_pos[a - 2];
      const Vec3 dv = truth.rel_vel[k][a - 2] - st.rel_vel[a - 2];
      pos_errs[k][a - 2] = dp;
      vel_errs[k][a - 2] = dv;
      e.segment<3>(idx.pos_col(a)) = dp;
      e.segment<3>(idx.vel_col(a)) = dv;
    }
    for (int a = 1; a <= n; ++a) {
      const Vec3 dphi =
          log_so3(st.pose.attitudes[a - 1].inverse() * pose.attitudes[a - 1]);
      att_errs[k][a - 1] = dphi;
      e.segment<3>(idx.att_col(a)) = dphi;
    }

    out.t.push_back(truth.time_of(k));
    const double full = nees_of(e, st.cov);
    if (full < 0.0) ++out.nees_excluded;
    out.nees.push_back(full);
    out.nees_pos.push_back(
        nees_of(e.head(3 * (n - 1)), st.cov.topLeftCorner(3 * (n - 1), 3 * (n - 1))));
    out.nees_att.push_back(nees_of(
        e.tail(3 * n), st.cov.bottomRightCorner(3 * n, 3 * n)));

    if (record_series) {
      Eigen::VectorXd est(dim);
      for (int a = 2; a <= n; ++a) {
        est.segment<3>(idx.pos_col(a)) = st.pose.rel_pos[a - 2];
        est.segment<3>(idx.vel_col(a)) = st.rel_vel[a - 2];
      }
      for (int a = 1; a <= n; ++a) {
        est.segment<3>(idx.att_col(a)) = log_so3(st.pose.attitudes[a - 1]);
      }
      out.estimate.push_back(est);
      out.error.push_back(e);
      out.sigma3.push_back(3.0 * st.cov.diagonal().cwiseMax(0.0).cwiseSqrt());
    }
  }

  out.metrics.rmse_pos = rmse_of(pos_errs);
  out.metrics.rmse_vel = rmse_of(vel_errs);
  out.metrics.rmse_att = rmse_of(att_errs);
  if (record_series) {
    out.has_series = true;
    out.truth = truth;
  }
  return out;
}

MetricsReport run_monte_carlo(const ScenarioConfig& cfg, int threads) {
  const auto start = std::chrono::steady_clock::now();
  cfg.validate();

  const int trials = cfg.trials;
  std::vector<TrialResult> results(trials);
  std::vector<char> completed(trials, 0);
  std::vector<std::string> errors(trials);
  std::atomic<int> cursor{0};

  const auto worker = [&]() {
    for (;;) {
      const int i = cursor.fetch_add(1);
      if (i >= trials) return;
      try {
        results[i] = run_trial(cfg, cfg.base_seed + static_cast<uint64_t>(i));
        completed[i] = 1;
      } catch (const std::exception& ex) {
        errors[i] = ex.what();
      }
    }
  };

  const int workers = std::max(1, std::min(threads, trials));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
  }

  MetricsReport report;
  report.state_dim = StateIndex(cfg.layout.num_agents()).dim();
  std::vector<double> pos, vel, att;
  int done = 0;
  for (int i = 0; i < trials; ++i) {
    if (!completed[i]) {
      report.failures.push_back("trial " + std::to_string(i) + ": " + errors[i]);
      continue;
    }
    const TrialResult& r = results[i];
    if (report.t.empty()) {
      report.t = r.t;
      report.avg_nees.assign(r.t.size(), 0.0);
    }
    report.trials.push_back(r.metrics);
    pos.push_back(r.metrics.rmse_pos);
    vel.push_back(r.metrics.rmse_vel);
    att.push_back(r.metrics.rmse_att);
    ++done;
  }

  if (done > 0) {
    for (size_t k = 0; k < report.avg_nees.size(); ++k) {
      double sum = 0.0;
      int counted = 0;
      for (int i = 0; i < trials; ++i) {
        if (!completed[i]) continue;
        const double v = results[i].nees[k];
        if (v >= 0.0) {
          sum += v;
          ++counted;
        }
      }
      report.avg_nees[k] = counted > 0 ? sum / counted : -1.0;
    }
    report.avg_rmse_pos = 0.0;
    for (double v : pos) report.avg_rmse_pos += v / done;
    for (double v : vel) report.avg_rmse_vel += v / done;
    for (double v : att) report.avg_rmse_att += v / done;
    report.pos_box = box_stats(pos);
    report.vel_box = box_stats(vel);
    report.att_box = box_stats(att);
    report.band = nees_bounds(done, report.state_dim);
  }

  report.runtime_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace swarmloc
