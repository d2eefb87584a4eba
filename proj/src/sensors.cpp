#include "sensors.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>

namespace swarmloc {

void NoiseSpec::validate() const {
  const double stds[] = {accel_std, gyro_std,     mag_std,      uwb_std,
                         init_pos_std, init_vel_std, init_att_std};
  for (double s : stds) {
    if (!(s >= 0.0) || !std::isfinite(s)) {
      throw Error(ErrorCode::kInvalidArgument, "noise std must be finite and >= 0");
    }
  }
  if (!(imu_rate_hz > 0.0) || !(uwb_rate_hz > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "sensor rates must be positive");
  }
  if (uwb_channels < 1) {
    throw Error(ErrorCode::kInvalidArgument, "need at least one ranging channel");
  }
}

Vec3 tag_position(const SwarmPose& pose, const SwarmLayout& layout, int agent,
                  int local_tag) {
  const Vec3 offset = layout.agents.at(agent - 1).tag_offsets.at(local_tag - 1);
  return pose.rel_pos_of(agent) + pose.attitude_of(agent) * offset;
}

double predict_range(const SwarmPose& pose, const SwarmLayout& layout,
                     int gtag_a, int gtag_b) {
  if (gtag_a == gtag_b) {
    throw Error(ErrorCode::kInvalidArgument, "range requires two distinct tags");
  }
  const auto [aa, la] = layout.agent_of(gtag_a);
  const auto [ab, lb] = layout.agent_of(gtag_b);
  return (tag_position(pose, layout, ab, lb) - tag_position(pose, layout, aa, la))
      .norm();
}

Eigen::RowVectorXd range_jacobian(const SwarmPose& pose, const SwarmLayout& layout,
                                  int gtag_a, int gtag_b) {
  const auto [aa, la] = layout.agent_of(gtag_a);
  const auto [ab, lb] = layout.agent_of(gtag_b);
  const Vec3 pa = tag_position(pose, layout, aa, la);
  const Vec3 pb = tag_position(pose, layout, ab, lb);
  const Vec3 u = unit_offset(pa, pb, 1e-9);

  const StateIndex idx(pose.num_agents());
  Eigen::RowVectorXd h = Eigen::RowVectorXd::Zero(idx.dim());
  if (ab != 1) h.segment<3>(idx.pos_col(ab)) += u.transpose();
  if (aa != 1) h.segment<3>(idx.pos_col(aa)) -= u.transpose();

  // d range / d phi: the tag offset sweeps with the attitude error.
  const Vec3 oa = layout.agents[aa - 1].tag_offsets[la - 1];
  const Vec3 ob = layout.agents[ab - 1].tag_offsets[lb - 1];
  h.segment<3>(idx.att_col(ab)) -=
      u.transpose() * pose.attitude_of(ab).matrix() * skew(ob);
  h.segment<3>(idx.att_col(aa)) +=
      u.transpose() * pose.attitude_of(aa).matrix() * skew(oa);
  return h;
}

std::vector<std::vector<ImuSample>> simulate_imu(const SwarmTruth& truth,
                                                 const NoiseSpec& noise,
                                                 uint64_t seed) {
  noise.validate();
  std::vector<std::vector<ImuSample>> out(truth.num_agents);
  for (int a = 1; a <= truth.num_agents; ++a) {
    Rng rng(derive_seed(seed, a));
    auto& stream = out[a - 1];
    stream.resize(truth.steps);
    for (int k = 0; k < truth.steps; ++k) {
      ImuSample& s = stream[k];
      s.t = truth.time_of(k);
      s.accel = truth.ideal_acc[k][a - 1] + rng.gauss3(noise.accel_std);
      s.gyro = truth.ideal_gyr[k][a - 1] + rng.gauss3(noise.gyro_std);
      s.mag = truth.ideal_mag[k][a - 1] + rng.gauss3(noise.mag_std);
    }
  }
  return out;
}

std::vector<RangeEvent> schedule_ranging(const SwarmLayout& layout,
                                         const RangeGraph& graph,
                                         double uwb_rate_hz, int channels,
                                         double duration_s) {
  layout.validate();
  graph.validate();
  if (graph.num_tags != layout.num_tags()) {
    throw Error(ErrorCode::kInvalidArgument,
                "graph and layout disagree on tag count");
  }
  if (channels < 1 || !(uwb_rate_hz > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "bad ranging rate or channel count");
  }
  std::deque<std::pair<int, int>> queue(graph.edges.begin(), graph.edges.end());
  std::vector<RangeEvent> events;
  const int epochs = static_cast<int>(std::ceil(duration_s * uwb_rate_hz));
  for (int e = 0; e < epochs; ++e) {
    const double t = static_cast<double>(e) / uwb_rate_hz;
    if (t >= duration_s) break;
    std::set<int> busy;
    std::deque<std::pair<int, int>> deferred, served;
    int used = 0;
    while (!queue.empty()) {
      if (used == channels) break;
      const auto pair = queue.front();
      queue.pop_front();
      if (busy.count(pair.first) || busy.count(pair.second)) {
        deferred.push_back(pair);
        continue;
      }
      busy.insert(pair.first);
      busy.insert(pair.second);
      RangeEvent ev;
      ev.t = t;
      ev.tag_a = pair.first;
      ev.tag_b = pair.second;
      ev.channel = used;
      events.push_back(ev);
      served.push_back(pair);
      ++used;
    }
    // Conflicts keep queue priority; served pairs go to the back.
    deferred.insert(deferred.end(), queue.begin(), queue.end());
    deferred.insert(deferred.end(), served.begin(), served.end());
    queue.swap(deferred);
  }
  return events;
}

std::vector<RangeMeasurement> simulate_ranges(const SwarmTruth& truth,
                                              const SwarmLayout& layout,
                                              const std::vector<RangeEvent>& schedule,
                                              const NoiseSpec& noise,
                                              uint64_t seed) {
  noise.validate();
  if (!(truth.dt > 0.0) || truth.steps < 1) {
    throw Error(ErrorCode::kInvalidArgument, "truth has no sampling grid");
  }
  Rng rng(derive_seed(seed, 0x9a4be5));
  std::vector<RangeMeasurement> out;
  out.reserve(schedule.size());
  for (const RangeEvent& ev : schedule) {
    int k = static_cast<int>(std::lround(ev.t / truth.dt));
    k = std::clamp(k, 0, truth.steps - 1);
    RangeMeasurement m;
    m.t = truth.time_of(k);
    m.tag_a = ev.tag_a;
    m.tag_b = ev.tag_b;
    m.range = predict_range(truth.pose[k], layout, ev.tag_a, ev.tag_b) +
              noise.uwb_std * rng.gauss();
    m.variance = std::max(noise.uwb_std * noise.uwb_std, 1e-18);
    out.push_back(m);
  }
  return out;
}

}  // namespace swarmloc
