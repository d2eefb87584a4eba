#ifndef SWARMLOC_RIGIDITY_HPP
#define SWARMLOC_RIGIDITY_HPP

#include <array>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "geom3d.hpp"
#include "layout.hpp"

namespace swarmloc {

// Undirected ranging graph over global tag ids 1..num_tags.
struct RangeGraph {
  int num_tags = 0;
  std::vector<std::pair<int, int>> edges;

  static RangeGraph complete(int num_tags);
  void validate() const;
};

// Tag positions relative to tag 1, absolute frame. positions[k] holds tag
// k+2, so tag 1 is implicit at the origin.
struct RelativeConfiguration {
  std::vector<Vec3> positions;

  int num_tags() const { return static_cast<int>(positions.size()) + 1; }

  Vec3 position_of(int tag) const {
    if (tag == 1) return Vec3::Zero();
    return positions.at(tag - 2);
  }
};

// Rows follow graph edge order; columns are 3-blocks for tags 2..n.
struct RigidityMatrix {
  Eigen::MatrixXd m;
  std::vector<std::pair<int, int>> row_edges;

  static int col_of(int tag) { return 3 * (tag - 2); }
};

struct RankPolicy {
  double eps_rel = 1e-10;  // threshold = max(rows,cols) * sigma_max * eps_rel
};

enum class Verdict {
  kRigid,
  kObservable,
  kDeficient,
  kInsufficientBaselines,
};

const char* verdict_name(Verdict v);

struct ObservabilityReport {
  Verdict verdict = Verdict::kDeficient;
  int rank = 0;
  int required_rank = 0;
  int deficiency = 0;
  std::vector<double> singular_values;         // descending
  std::vector<Eigen::VectorXd> null_basis;     // unit vectors, numeric null
  bool baselines_independent = false;
  // Largest pairwise angle between absolute-frame baselines, folded to
  // [0, pi/2]; NaN when fewer than two baselines exist.
  double baseline_angle = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::string> notes;

  std::string render_text() const;
};

// Unit row-vector direction from tag i to tag j of each edge, one row per
// edge. Throws on coincident endpoints (separation <= 1e-12 m).
RigidityMatrix rigidity_matrix(const RelativeConfiguration& config,
                               const RangeGraph& graph);

// Three vectors v_1..v_3 spanning the rotational null space: block k of v_i
// is -skew(r_k) e_i. Always satisfies R v_i = 0 for the same configuration.
std::array<Eigen::VectorXd, 3> rotational_null_basis(
    const RelativeConfiguration& config);

int numeric_rank(const Eigen::MatrixXd& m, const RankPolicy& policy = {});
int numeric_rank(const Eigen::MatrixXd& m, const RankPolicy& policy,
                 std::vector<double>* singular_values,
                 std::vector<Eigen::VectorXd>* null_basis);

// Requires num_tags >= 3. Rigid iff rank == 3n - 6; the numeric null space
// then consists of the three rotational modes only.
ObservabilityReport is_infinitesimally_rigid(const RelativeConfiguration& config,
                                             const RangeGraph& graph,
                                             const RankPolicy& policy = {});

// Stacks 3-row identity selectors for each measured tag (relative position
// to tag 1 treated as known) on top of the rigidity matrix.
Eigen::MatrixXd augment_with_position_edges(const RigidityMatrix& r,
                                            const std::vector<int>& measured_tags);

// Rotates each two-tag baseline into the absolute frame, treats it as a
// measured relative-position edge between that agent's own tags, and reports
// the rank verdict on the augmented matrix. agent_positions[i] is agent
// (i+1)'s position; attitudes likewise. Fewer than two two-tag agents yields
// the insufficient-baselines verdict, not an exception.
ObservabilityReport check_two_tag_observability(
    const SwarmLayout& layout, const std::vector<Vec3>& agent_positions,
    const std::vector<Rotation>& attitudes, const RangeGraph& graph,
    const RankPolicy& policy = {});

// Shared with the range model so both sides build identical rows.
Vec3 unit_offset(const Vec3& from, const Vec3& to, double min_separation);

}  // namespace swarmloc

#endif
