#ifndef SWARMLOC_TESTS_SUPPORT_HPP
#define SWARMLOC_TESTS_SUPPORT_HPP

#include <Eigen/SVD>

#include <random>
#include <utility>
#include <vector>

#include "rigidity.hpp"

namespace swarmloc::testing {

// Random tag configuration with pairwise separation >= min_sep.
inline RelativeConfiguration random_configuration(std::mt19937_64& g, int num_tags,
                                                  double min_sep = 0.2) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  RelativeConfiguration c;
  c.positions.resize(num_tags - 1);
  for (int k = 0; k < num_tags - 1; ++k) {
    for (int attempt = 0; attempt < 1000; ++attempt) {
      const Vec3 p(u(g), u(g), u(g));
      bool ok = p.norm() >= min_sep;
      for (int q = 0; ok && q < k; ++q) {
        ok = (p - c.positions[q]).norm() >= min_sep;
      }
      if (ok) {
        c.positions[k] = p;
        break;
      }
    }
  }
  return c;
}

// Random graph: a spanning tree plus a random number of extra edges, so both
// deficient and over-braced cases appear.
inline RangeGraph random_graph(std::mt19937_64& g, int num_tags) {
  RangeGraph graph;
  graph.num_tags = num_tags;
  std::uniform_int_distribution<int> pick(1, num_tags);
  for (int t = 2; t <= num_tags; ++t) {
    std::uniform_int_distribution<int> parent(1, t - 1);
    graph.edges.emplace_back(parent(g), t);
  }
  const int max_extra = num_tags * (num_tags - 1) / 2 - (num_tags - 1);
  std::uniform_int_distribution<int> extra_count(0, max_extra);
  const int extra = extra_count(g);
  for (int e = 0; e < extra; ++e) {
    int i = pick(g), j = pick(g);
    if (i == j) continue;
    if (i > j) std::swap(i, j);
    graph.edges.emplace_back(i, j);
  }
  return graph;
}

// Range vector of the graph at stacked positions x (tags 2..n).
inline Eigen::VectorXd range_vector(const Eigen::VectorXd& x,
                                    const RangeGraph& graph) {
  const auto pos = [&](int tag) -> Vec3 {
    if (tag == 1) return Vec3::Zero();
    return x.segment<3>(3 * (tag - 2));
  };
  Eigen::VectorXd y(graph.edges.size());
  for (size_t e = 0; e < graph.edges.size(); ++e) {
    y(e) = (pos(graph.edges[e].second) - pos(graph.edges[e].first)).norm();
  }
  return y;
}

// Brute-force central-difference Jacobian of the range vector.
inline Eigen::MatrixXd fd_rigidity_matrix(const RelativeConfiguration& config,
                                          const RangeGraph& graph,
                                          double h = 1e-6) {
  const int cols = 3 * (config.num_tags() - 1);
  Eigen::VectorXd x(cols);
  for (int k = 0; k < config.num_tags() - 1; ++k) {
    x.segment<3>(3 * k) = config.positions[k];
  }
  Eigen::MatrixXd j(graph.edges.size(), cols);
  for (int c = 0; c < cols; ++c) {
    Eigen::VectorXd xp = x, xm = x;
    xp(c) += h;
    xm(c) -= h;
    j.col(c) = (range_vector(xp, graph) - range_vector(xm, graph)) / (2.0 * h);
  }
  return j;
}

// Rank by a second SVD implementation with a tolerance matched to
// finite-difference accuracy rather than machine precision.
inline int fd_rank(const Eigen::MatrixXd& m, double eps_rel = 1e-7) {
  if (m.rows() == 0 || m.cols() == 0) return 0;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m);
  const Eigen::VectorXd& s = svd.singularValues();
  const double tau =
      static_cast<double>(std::max(m.rows(), m.cols())) * s(0) * eps_rel;
  int rank = 0;
  for (int i = 0; i < s.size(); ++i) {
    if (s(i) > tau) ++rank;
  }
  return rank;
}

}  // namespace swarmloc::testing

#endif
