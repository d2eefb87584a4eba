#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "sensors.hpp"
#include "support.hpp"

using namespace swarmloc;

namespace {

SwarmLayout two_tag_pair_layout() {
  SwarmLayout l;
  SwarmLayout::Agent a1, a2;
  a1.tag_offsets = {Vec3(-0.15, 0, 0), Vec3(0.15, 0, 0)};
  a2.tag_offsets = {Vec3(0, -0.15, 0), Vec3(0, 0.15, 0)};
  l.agents = {a1, a2};
  return l;
}

SwarmPose sample_pose() {
  SwarmPose p;
  p.rel_pos = {Vec3(1.0, 2.0, 3.0)};
  p.attitudes = {exp_so3(Vec3(0.1, -0.3, 0.7)), exp_so3(Vec3(-0.4, 0.2, 1.1))};
  return p;
}

SwarmTruth static_truth(int num_agents, int steps, double dt = 0.01) {
  SwarmTruth t;
  t.dt = dt;
  t.steps = steps;
  t.num_agents = num_agents;
  SwarmPose pose;
  pose.attitudes.assign(num_agents, Rotation::identity());
  for (int i = 2; i <= num_agents; ++i) {
    pose.rel_pos.push_back(Vec3(1.5 * i, -0.7 * i, 0.4 * i));
  }
  t.pose.assign(steps, pose);
  t.rel_vel.assign(steps, std::vector<Vec3>(num_agents - 1, Vec3::Zero()));
  t.ideal_acc.assign(steps, std::vector<Vec3>(num_agents, Vec3::Zero()));
  t.ideal_gyr.assign(steps, std::vector<Vec3>(num_agents, Vec3::Zero()));
  t.ideal_mag.assign(steps, std::vector<Vec3>(num_agents, Vec3::UnitX()));
  return t;
}

double column_std(const std::vector<double>& xs) {
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= xs.size();
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  return std::sqrt(var / (xs.size() - 1));
}

}  // namespace

TEST_CASE("tag position composes pose and body offset") {
  const SwarmLayout l = two_tag_pair_layout();
  SwarmPose p;
  p.rel_pos = {Vec3(1.0, 2.0, 3.0)};
  p.attitudes = {Rotation::identity(), exp_so3(Vec3(0, 0, M_PI / 2))};
  CHECK((tag_position(p, l, 1, 2) - Vec3(0.15, 0, 0)).norm() < 1e-15);
  // Quarter-turn about z maps the +y offset onto -x.
  const Vec3 got = tag_position(p, l, 2, 2);
  CHECK((got - Vec3(1.0 - 0.15, 2.0, 3.0)).norm() < 1e-12);
}

TEST_CASE("predict_range matches hand geometry and validates tags") {
  const SwarmLayout l = two_tag_pair_layout();
  SwarmPose p;
  p.rel_pos = {Vec3(4.0, 0, 0)};
  p.attitudes = {Rotation::identity(), Rotation::identity()};
  // Tag 2 of agent 1 at x=0.15; tag 3 (agent 2 local 1) at (4, -0.15, 0).
  const double want = std::sqrt(3.85 * 3.85 + 0.15 * 0.15);
  CHECK(predict_range(p, l, 2, 3) == doctest::Approx(want).epsilon(1e-14));
  CHECK_THROWS_AS((void)predict_range(p, l, 2, 2), Error);
}

TEST_CASE("range jacobian matches central finite differences") {
  const SwarmLayout l = two_tag_pair_layout();
  const SwarmPose p = sample_pose();
  const StateIndex idx(2);
  const double h = 1e-6;
  for (auto [ga, gb] : {std::pair{1, 3}, {2, 4}, {1, 2}, {2, 3}}) {
    const Eigen::RowVectorXd jac = range_jacobian(p, l, ga, gb);
    for (int c = 0; c < idx.dim(); ++c) {
      const auto perturbed = [&](double eps) {
        SwarmPose q = p;
        Eigen::VectorXd dx = Eigen::VectorXd::Zero(idx.dim());
        dx(c) = eps;
        q.rel_pos[0] += dx.segment<3>(idx.pos_col(2));
        for (int a = 1; a <= 2; ++a) {
          q.attitudes[a - 1] =
              q.attitudes[a - 1] * exp_so3(dx.segment<3>(idx.att_col(a)));
        }
        return predict_range(q, l, ga, gb);
      };
      const double fd = (perturbed(h) - perturbed(-h)) / (2.0 * h);
      CHECK(std::abs(jac(c) - fd) < 1e-7 * std::max(1.0, std::abs(fd)));
    }
    // Velocity never enters the instantaneous range.
    CHECK(jac.segment<3>(idx.vel_col(2)).norm() == 0.0);
  }
}

TEST_CASE("same-agent ranging has zero position sensitivity") {
  const SwarmLayout l = two_tag_pair_layout();
  const SwarmPose p = sample_pose();
  const StateIndex idx(2);
  const Eigen::RowVectorXd jac = range_jacobian(p, l, 3, 4);
  CHECK(jac.segment<3>(idx.pos_col(2)).norm() == 0.0);
  // Both lever arms land on agent 2's attitude block and cancel exactly
  // along the baseline direction.
  CHECK(jac.segment<3>(idx.att_col(1)).norm() == 0.0);
}

TEST_CASE("position blocks over all edges reproduce the rigidity matrix") {
  // Single-tag agents at zero offset make tag ids coincide with agent ids.
  SwarmLayout l;
  SwarmLayout::Agent one;
  one.tag_offsets = {Vec3::Zero()};
  l.agents = {one, one, one, one, one};

  std::mt19937_64 g(314);
  const auto config = swarmloc::testing::random_configuration(g, 5);
  const auto graph = RangeGraph::complete(5);

  SwarmPose p;
  p.attitudes.assign(5, Rotation::identity());
  p.rel_pos = config.positions;

  const RigidityMatrix r = rigidity_matrix(config, graph);
  const StateIndex idx(5);
  for (size_t e = 0; e < graph.edges.size(); ++e) {
    const auto [i, j] = graph.edges[e];
    const Eigen::RowVectorXd jac = range_jacobian(p, l, i, j);
    Eigen::RowVectorXd pos_part = Eigen::RowVectorXd::Zero(3 * 4);
    for (int a = 2; a <= 5; ++a) {
      pos_part.segment<3>(3 * (a - 2)) = jac.segment<3>(idx.pos_col(a));
    }
    CHECK((pos_part - r.m.row(e)).norm() == 0.0);
  }
}

TEST_CASE("imu noise statistics match the spec sheet") {
  const SwarmTruth truth = static_truth(2, 10000);
  NoiseSpec noise;
  const auto streams = simulate_imu(truth, noise, 555);
  REQUIRE(streams.size() == 2);
  REQUIRE(static_cast<int>(streams[0].size()) == truth.steps);

  for (int axis = 0; axis < 3; ++axis) {
    std::vector<double> acc, gyr, mag;
    for (const ImuSample& s : streams[0]) {
      acc.push_back(s.accel(axis));
      gyr.push_back(s.gyro(axis));
      mag.push_back(s.mag(axis));
    }
    CHECK(column_std(acc) == doctest::Approx(0.026).epsilon(0.05));
    CHECK(column_std(gyr) == doctest::Approx(0.0025).epsilon(0.05));
    CHECK(column_std(mag) == doctest::Approx(0.85).epsilon(0.05));
  }
}

TEST_CASE("imu streams are deterministic per seed and per agent") {
  const SwarmTruth truth = static_truth(3, 50);
  NoiseSpec noise;
  const auto a = simulate_imu(truth, noise, 42);
  const auto b = simulate_imu(truth, noise, 42);
  const auto c = simulate_imu(truth, noise, 43);
  CHECK((a[1][7].accel - b[1][7].accel).norm() == 0.0);
  CHECK((a[1][7].accel - c[1][7].accel).norm() != 0.0);

  // Agent 1's stream does not depend on how many other agents exist.
  const SwarmTruth truth2 = static_truth(2, 50);
  const auto d = simulate_imu(truth2, noise, 42);
  CHECK((a[0][11].gyro - d[0][11].gyro).norm() == 0.0);
}

TEST_CASE("round-robin schedule is fair and conflict-free") {
  SwarmLayout l;
  SwarmLayout::Agent two, one;
  two.tag_offsets = {Vec3(-0.15, 0, 0), Vec3(0.15, 0, 0)};
  one.tag_offsets = {Vec3::Zero()};
  l.agents = {two, two, two, one, one, one};  // 9 tags
  const RangeGraph graph = RangeGraph::complete(9);

  const auto events = schedule_ranging(l, graph, 20.0, 3, 3.0);
  // 60 epochs, 3 channels: 180 slots over 36 pairs, 5 average.
  CHECK(events.size() == 180);
  std::map<std::pair<int, int>, int> count;
  std::map<double, std::set<int>> tags_at;
  for (const auto& ev : events) {
    count[{ev.tag_a, ev.tag_b}]++;
    auto& busy = tags_at[ev.t];
    CHECK(busy.count(ev.tag_a) == 0);
    CHECK(busy.count(ev.tag_b) == 0);
    busy.insert(ev.tag_a);
    busy.insert(ev.tag_b);
  }
  CHECK(count.size() == 36);
  for (const auto& [pair, n] : count) {
    CHECK(n >= 4);
    CHECK(n <= 6);
  }
  for (const auto& [t, busy] : tags_at) CHECK(busy.size() <= 6);

  // Long run every pair converges to 60/36 Hz.
  const auto long_run = schedule_ranging(l, graph, 20.0, 3, 30.0);
  std::map<std::pair<int, int>, int> long_count;
  for (const auto& ev : long_run) long_count[{ev.tag_a, ev.tag_b}]++;
  for (const auto& [pair, n] : long_count) {
    CHECK(n / 30.0 == doctest::Approx(60.0 / 36.0).epsilon(0.05));
  }
}

TEST_CASE("single-channel schedule spreads pairs evenly") {
  // Two two-tag agents and one single-tag agent, same-agent pairs excluded:
  // 8 pairs on one 16 Hz channel -> every pair at 2 Hz.
  SwarmLayout l;
  SwarmLayout::Agent two, one;
  two.tag_offsets = {Vec3(-0.15, 0, 0), Vec3(0.15, 0, 0)};
  one.tag_offsets = {Vec3::Zero()};
  l.agents = {two, two, one};
  RangeGraph graph;
  graph.num_tags = 5;
  for (int i = 1; i <= 5; ++i) {
    for (int j = i + 1; j <= 5; ++j) {
      const bool same_agent = (i == 1 && j == 2) || (i == 3 && j == 4);
      if (!same_agent) graph.edges.emplace_back(i, j);
    }
  }
  REQUIRE(graph.edges.size() == 8);

  const auto events = schedule_ranging(l, graph, 16.0, 1, 2.0);
  CHECK(events.size() == 32);
  std::map<std::pair<int, int>, int> count;
  for (const auto& ev : events) count[{ev.tag_a, ev.tag_b}]++;
  for (const auto& [pair, n] : count) CHECK(n == 4);
}

TEST_CASE("conflicting pairs defer to the front of the next epoch") {
  SwarmLayout l;
  SwarmLayout::Agent one;
  one.tag_offsets = {Vec3::Zero()};
  l.agents = {one, one, one};
  RangeGraph graph;
  graph.num_tags = 3;
  graph.edges = {{1, 2}, {1, 3}, {2, 3}};

  // Any two triangle edges share a tag, so two channels still serve one
  // pair per epoch and the deferred pair leads the next epoch.
  const auto events = schedule_ranging(l, graph, 10.0, 2, 0.35);
  REQUIRE(events.size() == 4);
  CHECK(events[0].tag_a == 1);
  CHECK(events[0].tag_b == 2);
  CHECK(events[1].tag_a == 1);
  CHECK(events[1].tag_b == 3);
  CHECK(events[2].tag_a == 2);
  CHECK(events[2].tag_b == 3);
  CHECK(events[3].tag_a == 1);
  CHECK(events[3].tag_b == 2);
}

TEST_CASE("simulated ranges are exact without noise and snap to the grid") {
  const SwarmTruth truth = static_truth(3, 200);
  SwarmLayout l;
  SwarmLayout::Agent one;
  one.tag_offsets = {Vec3::Zero()};
  l.agents = {one, one, one};
  NoiseSpec noise;
  noise.uwb_std = 0.0;

  std::vector<RangeEvent> schedule;
  RangeEvent ev;
  ev.t = 0.052;  // closest step is k=5
  ev.tag_a = 1;
  ev.tag_b = 2;
  schedule.push_back(ev);

  const auto ms = simulate_ranges(truth, l, schedule, noise, 9);
  REQUIRE(ms.size() == 1);
  CHECK(ms[0].t == doctest::Approx(0.05).epsilon(1e-15));
  CHECK(ms[0].range ==
        doctest::Approx(truth.pose[5].rel_pos_of(2).norm()).epsilon(1e-15));
  CHECK(ms[0].variance > 0.0);
}

TEST_CASE("range noise statistics match the spec sheet") {
  const SwarmTruth truth = static_truth(2, 10);
  SwarmLayout l;
  SwarmLayout::Agent one;
  one.tag_offsets = {Vec3::Zero()};
  l.agents = {one, one};
  NoiseSpec noise;

  std::vector<RangeEvent> schedule(10000);
  for (auto& ev : schedule) {
    ev.t = 0.0;
    ev.tag_a = 1;
    ev.tag_b = 2;
  }
  const auto ms = simulate_ranges(truth, l, schedule, noise, 1234);
  const double truth_range = truth.pose[0].rel_pos_of(2).norm();
  std::vector<double> residuals;
  for (const auto& m : ms) {
    residuals.push_back(m.range - truth_range);
    CHECK(m.variance == doctest::Approx(0.01).epsilon(1e-12));
  }
  CHECK(column_std(residuals) == doctest::Approx(0.1).epsilon(0.05));
}
