#include "rigidity.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace swarmloc {

namespace {

std::string edge_name(int i, int j) {
  return "(" + std::to_string(i) + ", " + std::to_string(j) + ")";
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

RangeGraph RangeGraph::complete(int num_tags) {
  RangeGraph g;
  g.num_tags = num_tags;
  for (int i = 1; i <= num_tags; ++i) {
    for (int j = i + 1; j <= num_tags; ++j) g.edges.emplace_back(i, j);
  }
  return g;
}

void RangeGraph::validate() const {
  if (num_tags < 2) {
    throw Error(ErrorCode::kInvalidArgument, "graph needs at least two tags");
  }
  for (const auto& [i, j] : edges) {
    if (i < 1 || i > num_tags || j < 1 || j > num_tags) {
      throw Error(ErrorCode::kInvalidArgument,
                  "edge " + edge_name(i, j) + " references unknown tag");
    }
    if (i == j) {
      throw Error(ErrorCode::kInvalidArgument,
                  "edge " + edge_name(i, j) + " is a self-loop");
    }
  }
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::kRigid: return "rigid";
    case Verdict::kObservable: return "observable";
    case Verdict::kDeficient: return "deficient";
    case Verdict::kInsufficientBaselines: return "insufficient-baselines";
  }
  return "unknown";
}

Vec3 unit_offset(const Vec3& from, const Vec3& to, double min_separation) {
  const Vec3 d = to - from;
  const double n = d.norm();
  if (!(n > min_separation)) {
    throw Error(ErrorCode::kDegenerateGeometry,
                "tag pair separation " + fmt(n) + " below minimum");
  }
  return d / n;
}

RigidityMatrix rigidity_matrix(const RelativeConfiguration& config,
                               const RangeGraph& graph) {
  graph.validate();
  if (graph.num_tags != config.num_tags()) {
    throw Error(ErrorCode::kInvalidArgument,
                "graph and configuration disagree on tag count");
  }
  const int n = config.num_tags();
  RigidityMatrix r;
  r.m = Eigen::MatrixXd::Zero(static_cast<int>(graph.edges.size()), 3 * (n - 1));
  r.row_edges = graph.edges;
  for (int row = 0; row < static_cast<int>(graph.edges.size()); ++row) {
    const auto [i, j] = graph.edges[row];
    Vec3 u;
    try {
      u = unit_offset(config.position_of(i), config.position_of(j), 1e-12);
    } catch (const Error&) {
      throw Error(ErrorCode::kDegenerateGeometry,
                  "degenerate edge " + edge_name(i, j) +
                      ": tag separation below 1e-12 m");
    }
    if (j != 1) r.m.block<1, 3>(row, RigidityMatrix::col_of(j)) = u.transpose();
    if (i != 1) r.m.block<1, 3>(row, RigidityMatrix::col_of(i)) = -u.transpose();
  }
  return r;
}

std::array<Eigen::VectorXd, 3> rotational_null_basis(
    const RelativeConfiguration& config) {
  const int n = config.num_tags();
  if (n < 2) {
    throw Error(ErrorCode::kUnsupportedSize,
                "rotational null basis needs at least two tags");
  }
  std::array<Eigen::VectorXd, 3> basis;
  for (int i = 0; i < 3; ++i) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(3 * (n - 1));
    const Vec3 e = Vec3::Unit(i);
    for (int k = 2; k <= n; ++k) {
      v.segment<3>(RigidityMatrix::col_of(k)) = -skew(config.position_of(k)) * e;
    }
    basis[i] = v;
  }
  return basis;
}

int numeric_rank(const Eigen::MatrixXd& m, const RankPolicy& policy) {
  return numeric_rank(m, policy, nullptr, nullptr);
}

int numeric_rank(const Eigen::MatrixXd& m, const RankPolicy& policy,
                 std::vector<double>* singular_values,
                 std::vector<Eigen::VectorXd>* null_basis) {
  if (m.rows() == 0 || m.cols() == 0) {
    if (singular_values) singular_values->clear();
    if (null_basis) {
      null_basis->clear();
      for (int j = 0; j < m.cols(); ++j) {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(m.cols());
        v(j) = 1.0;
        null_basis->push_back(v);
      }
    }
    return 0;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      m, null_basis ? Eigen::ComputeFullV : 0);
  const Eigen::VectorXd& s = svd.singularValues();
  const double smax = s.size() > 0 ? s(0) : 0.0;
  const double tau =
      static_cast<double>(std::max(m.rows(), m.cols())) * smax * policy.eps_rel;
  int rank = 0;
  for (int i = 0; i < s.size(); ++i) {
    if (s(i) > tau) ++rank;
  }
  if (singular_values) {
    singular_values->assign(s.data(), s.data() + s.size());
  }
  if (null_basis) {
    null_basis->clear();
    const Eigen::MatrixXd& v = svd.matrixV();
    for (int j = rank; j < v.cols(); ++j) null_basis->push_back(v.col(j));
  }
  return rank;
}

ObservabilityReport is_infinitesimally_rigid(const RelativeConfiguration& config,
                                             const RangeGraph& graph,
                                             const RankPolicy& policy) {
  const int n = config.num_tags();
  if (n < 3) {
    throw Error(ErrorCode::kUnsupportedSize,
                "rigidity verdict needs at least three tags");
  }
  const RigidityMatrix r = rigidity_matrix(config, graph);
  ObservabilityReport rep;
  rep.required_rank = 3 * n - 6;
  rep.rank = numeric_rank(r.m, policy, &rep.singular_values, &rep.null_basis);
  rep.deficiency = rep.required_rank - rep.rank;
  rep.verdict = rep.rank == rep.required_rank ? Verdict::kRigid : Verdict::kDeficient;
  rep.notes.push_back(
      "numeric null space always contains the three rotational modes");
  return rep;
}

Eigen::MatrixXd augment_with_position_edges(const RigidityMatrix& r,
                                            const std::vector<int>& measured_tags) {
  const int cols = static_cast<int>(r.m.cols());
  const int n = cols / 3 + 1;
  for (int t : measured_tags) {
    if (t < 2 || t > n) {
      throw Error(ErrorCode::kInvalidArgument,
                  "measured tag " + std::to_string(t) +
                      " is the reference or out of range");
    }
  }
  const int extra = 3 * static_cast<int>(measured_tags.size());
  Eigen::MatrixXd out(extra + r.m.rows(), cols);
  out.setZero();
  int row = 0;
  for (int t : measured_tags) {
    out.block<3, 3>(row, RigidityMatrix::col_of(t)) = Mat3::Identity();
    row += 3;
  }
  out.bottomRows(r.m.rows()) = r.m;
  return out;
}

ObservabilityReport check_two_tag_observability(
    const SwarmLayout& layout, const std::vector<Vec3>& agent_positions,
    const std::vector<Rotation>& attitudes, const RangeGraph& graph,
    const RankPolicy& policy) {
  layout.validate();
  graph.validate();
  const int num_agents = layout.num_agents();
  if (static_cast<int>(agent_positions.size()) != num_agents ||
      static_cast<int>(attitudes.size()) != num_agents) {
    throw Error(ErrorCode::kInvalidArgument,
                "poses must cover every agent exactly once");
  }
  const int n = layout.num_tags();
  if (graph.num_tags != n) {
    throw Error(ErrorCode::kInvalidArgument,
                "graph and layout disagree on tag count");
  }
  if (n < 3) {
    throw Error(ErrorCode::kUnsupportedSize,
                "observability verdict needs at least three tags");
  }

  // Tag positions in the absolute frame, then relative to global tag 1.
  std::vector<Vec3> tag_abs(n);
  for (int g = 1; g <= n; ++g) {
    const auto [a, local] = layout.agent_of(g);
    tag_abs[g - 1] = agent_positions[a - 1] +
                     attitudes[a - 1] * layout.agents[a - 1].tag_offsets[local - 1];
  }
  RelativeConfiguration config;
  config.positions.resize(n - 1);
  for (int g = 2; g <= n; ++g) config.positions[g - 2] = tag_abs[g - 1] - tag_abs[0];

  const RigidityMatrix r = rigidity_matrix(config, graph);

  // One measured relative-position edge per two-tag agent, between its own
  // tags: the body baseline rotated into the absolute frame is known.
  std::vector<Vec3> baselines;
  int extra_rows = 0;
  std::vector<std::pair<int, int>> baseline_tags;
  for (int a = 1; a <= num_agents; ++a) {
    if (!layout.is_two_tag(a)) continue;
    baselines.push_back(attitudes[a - 1] * layout.baseline_body(a));
    baseline_tags.emplace_back(layout.global_tag(a, 1), layout.global_tag(a, 2));
    extra_rows += 3;
  }

  Eigen::MatrixXd aug(extra_rows + r.m.rows(), r.m.cols());
  aug.setZero();
  int row = 0;
  for (const auto& [g1, g2] : baseline_tags) {
    if (g2 != 1) aug.block<3, 3>(row, RigidityMatrix::col_of(g2)) = Mat3::Identity();
    if (g1 != 1) aug.block<3, 3>(row, RigidityMatrix::col_of(g1)) = -Mat3::Identity();
    row += 3;
  }
  aug.bottomRows(r.m.rows()) = r.m;

  ObservabilityReport rep;
  rep.required_rank = 3 * (n - 1);
  rep.rank = numeric_rank(aug, policy, &rep.singular_values, &rep.null_basis);
  rep.deficiency = rep.required_rank - rep.rank;

  double max_angle = std::numeric_limits<double>::quiet_NaN();
  for (size_t i = 0; i < baselines.size(); ++i) {
    for (size_t j = i + 1; j < baselines.size(); ++j) {
      const double angle = std::atan2(baselines[i].cross(baselines[j]).norm(),
                                      std::abs(baselines[i].dot(baselines[j])));
      if (std::isnan(max_angle) || angle > max_angle) max_angle = angle;
    }
  }
  rep.baseline_angle = max_angle;
  rep.baselines_independent = !std::isnan(max_angle) && max_angle > 1e-9;

  if (baselines.size() < 2) {
    rep.verdict = Verdict::kInsufficientBaselines;
    rep.notes.push_back(
        "fewer than two two-tag agents: no pair of measured baselines exists");
  } else {
    rep.verdict =
        rep.rank == rep.required_rank ? Verdict::kObservable : Verdict::kDeficient;
    if (!rep.baselines_independent) {
      rep.notes.push_back(
          "all measured baselines are parallel; expect a one-dimensional "
          "deficiency about their common axis");
    }
  }
  rep.notes.push_back(
      "verdict is instantaneous: a rank-complete swarm can still admit "
      "discrete flip/flex ambiguities resolved only by motion");
  return rep;
}

std::string ObservabilityReport::render_text() const {
  std::ostringstream os;
  os << "verdict: " << verdict_name(verdict) << "\n";
  os << "rank: " << rank << "\n";
  os << "required_rank: " << required_rank << "\n";
  os << "deficiency: " << deficiency << "\n";
  if (!std::isnan(baseline_angle)) {
    os << "baselines_independent: " << (baselines_independent ? "yes" : "no")
       << "\n";
    os << "max_baseline_angle_rad: " << fmt(baseline_angle) << "\n";
  }
  os << "singular_values:";
  for (double s : singular_values) os << " " << fmt(s);
  os << "\n";
  if (rank > 0 && rank <= static_cast<int>(singular_values.size())) {
    os << "smallest_kept_singular_value: " << fmt(singular_values[rank - 1])
       << "\n";
    const double dropped = rank < static_cast<int>(singular_values.size())
                               ? singular_values[rank]
                               : 0.0;
    os << "largest_dropped_singular_value: " << fmt(dropped) << "\n";
  }
  for (size_t i = 0; i < null_basis.size(); ++i) {
    os << "null_mode_" << i << ":";
    for (int k = 0; k < null_basis[i].size(); ++k) {
      os << " " << fmt(null_basis[i](k));
    }
    os << "\n";
  }
  for (const auto& note : notes) os << "note: " << note << "\n";
  return os.str();
}

}  // namespace swarmloc
