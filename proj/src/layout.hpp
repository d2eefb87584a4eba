#ifndef SWARMLOC_LAYOUT_HPP
#define SWARMLOC_LAYOUT_HPP

#include <utility>
#include <vector>

#include "geom3d.hpp"

namespace swarmloc {

// Ranging-tag placement on each agent, body frame. Tag ids are global,
// 1-based, assigned in agent order: agent 1's tags first, then agent 2's, ...
struct SwarmLayout {
  struct Agent {
    std::vector<Vec3> tag_offsets;  // 1 or 2 entries
  };

  std::vector<Agent> agents;
  int reference_agent = 1;  // 1-based; its first tag anchors relative state

  int num_agents() const { return static_cast<int>(agents.size()); }

  int num_tags() const {
    int n = 0;
    for (const auto& a : agents) n += static_cast<int>(a.tag_offsets.size());
    return n;
  }

  int tags_of(int agent) const {
    return static_cast<int>(agents.at(agent - 1).tag_offsets.size());
  }

  bool is_two_tag(int agent) const { return tags_of(agent) == 2; }

  // Body-frame vector from the first to the second tag.
  Vec3 baseline_body(int agent) const {
    const auto& t = agents.at(agent - 1).tag_offsets;
    if (t.size() != 2) {
      throw Error(ErrorCode::kInvalidArgument,
                  "baseline requested for a single-tag agent");
    }
    return t[1] - t[0];
  }

  int global_tag(int agent, int local) const {
    int g = 0;
    for (int a = 1; a < agent; ++a) g += tags_of(a);
    return g + local;
  }

  // (agent, local tag index), both 1-based.
  std::pair<int, int> agent_of(int gtag) const {
    int g = gtag;
    for (int a = 1; a <= num_agents(); ++a) {
      const int k = tags_of(a);
      if (g <= k) return {a, g};
      g -= k;
    }
    throw Error(ErrorCode::kInvalidArgument, "tag id out of range");
  }

  void validate() const {
    if (agents.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "layout has no agents");
    }
    if (reference_agent < 1 || reference_agent > num_agents()) {
      throw Error(ErrorCode::kInvalidArgument, "reference agent out of range");
    }
    for (int a = 1; a <= num_agents(); ++a) {
      const auto& t = agents[a - 1].tag_offsets;
      if (t.empty() || t.size() > 2) {
        throw Error(ErrorCode::kInvalidArgument,
                    "each agent carries one or two tags");
      }
      for (const Vec3& v : t) {
        if (!v.allFinite()) {
          throw Error(ErrorCode::kInvalidArgument, "tag offset not finite");
        }
      }
      if (t.size() == 2 && (t[1] - t[0]).norm() <= 0.0) {
        throw Error(ErrorCode::kDegenerateGeometry,
                    "two-tag agent has coincident tag offsets");
      }
    }
  }
};

}  // namespace swarmloc

#endif
