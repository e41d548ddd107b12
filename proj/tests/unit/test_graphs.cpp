#include <cmath>

#include <gtest/gtest.h>

#include "pmpo/interchange.hpp"
#include "support.hpp"

namespace pmpo {
namespace {

LayeredGraph star(int n) {
  std::vector<std::string> leaves;
  std::vector<NamedEdge> edges;
  for (int i = 0; i < n; ++i) {
    leaves.push_back("leaf" + std::to_string(i));
    edges.push_back({"e" + std::to_string(i), "centre", leaves.back()});
  }
  return graph_from_ids(layer_v0, {"centre"}, layer_v3, leaves, edges);
}

// Closed walks forward along g and back, from the adjacency matrix directly.
std::uint64_t loop_oracle(const LayeredGraph& g, std::size_t base, std::size_t k) {
  const Eigen::MatrixXd a = g.adjacency();
  Eigen::MatrixXd step = a * a.transpose();
  Eigen::MatrixXd p = Eigen::MatrixXd::Identity(step.rows(), step.cols());
  for (std::size_t i = 0; i < k; ++i) p = p * step;
  return static_cast<std::uint64_t>(std::llround(p(static_cast<Eigen::Index>(base), static_cast<Eigen::Index>(base))));
}

TEST(Graphs, PerronFrobeniusA3) {
  const Connection c = build_dynkin("A3");
  const PerronFrobenius pf = perron_frobenius(c.top(), 1e-13, 0);
  EXPECT_NEAR(pf.eigenvalue, std::sqrt(2.0), 1e-12);
  ASSERT_EQ(pf.source_weights.size(), 2u);
  ASSERT_EQ(pf.range_weights.size(), 1u);
  EXPECT_NEAR(pf.source_weights[0], 1.0, 1e-12);
  EXPECT_NEAR(pf.source_weights[1], 1.0, 1e-12);
  EXPECT_NEAR(pf.range_weights[0], std::sqrt(2.0), 1e-12);
}

TEST(Graphs, PerronFrobeniusStar) {
  for (int n : {1, 2, 3, 5, 8}) {
    const PerronFrobenius pf = perron_frobenius(star(n));
    EXPECT_NEAR(pf.eigenvalue, std::sqrt(static_cast<double>(n)), 1e-10) << n;
  }
}

TEST(Graphs, SpectralRadiusMatchesEigenSolver) {
  for (const std::string name : {"A5", "D5", "E6", "E7"}) {
    const Eigen::MatrixXd a = build_dynkin(name).top().adjacency();
    const Eigen::Index n = a.rows() + a.cols();
    Eigen::MatrixXd full = Eigen::MatrixXd::Zero(n, n);
    full.topRightCorner(a.rows(), a.cols()) = a;
    full.bottomLeftCorner(a.cols(), a.rows()) = a.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(full);
    EXPECT_NEAR(spectral_radius(full), es.eigenvalues().maxCoeff(), 1e-10) << name;
  }
}

TEST(Graphs, PerronFrobeniusCoxeter) {
  for (const std::string name : {"A3", "A4", "A7", "D4", "D5", "E6"}) {
    const DynkinDiagram d = dynkin_diagram(name);
    const PerronFrobenius pf = perron_frobenius(build_dynkin(name).top());
    EXPECT_NEAR(pf.eigenvalue, 2.0 * std::cos(M_PI / d.coxeter), 1e-10) << name;
  }
}

TEST(Graphs, LoopCountsMatchAdjacencyPowers) {
  for (const std::string name : {"A3", "A4", "D4", "E6"}) {
    const LayeredGraph g = build_dynkin(name).top();
    const std::vector<LayeredGraph> steps{g, reverse_graph(g)};
    for (std::size_t x = 0; x < g.num_sources(); ++x) {
      for (std::size_t k = 0; k <= 6; ++k) {
        EXPECT_EQ(count_loops(steps, x, 2 * k), loop_oracle(g, x, k)) << name << " x=" << x << " k=" << k;
      }
    }
  }
}

TEST(Graphs, LoopCountsAtBaseA3A4) {
  const std::vector<std::uint64_t> a3{1, 2, 4, 8};
  const std::vector<std::uint64_t> a4{1, 2, 5, 13};
  for (const auto& [name, want] : {std::pair{"A3", a3}, std::pair{"A4", a4}}) {
    const LayeredGraph g = build_dynkin(name).top();
    const std::vector<LayeredGraph> steps{g, reverse_graph(g)};
    for (std::size_t k = 1; k <= 4; ++k) EXPECT_EQ(count_loops(steps, 0, 2 * k), want[k - 1]) << name;
  }
}

TEST(Graphs, CountPathsRejectsIncompatibleLayers) {
  const LayeredGraph g = build_dynkin("A3").top();
  const std::vector<LayeredGraph> steps{g, g};
  EXPECT_THROW(count_paths(steps, 0, 2), InputError);
}

TEST(Graphs, ComposeCountsProducts) {
  const LayeredGraph g = build_dynkin("D5").top();
  const LayeredGraph r = reverse_graph(g);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  const LayeredGraph gg = compose_graphs(g, r, &pairs);
  const Eigen::MatrixXd prod = g.adjacency() * r.adjacency();
  EXPECT_TRUE(gg.adjacency().isApprox(prod));
  ASSERT_EQ(pairs.size(), gg.num_edges());
  for (std::size_t e = 0; e < pairs.size(); ++e) {
    EXPECT_EQ(g.edge(pairs[e].first).range, r.edge(pairs[e].second).source);
    EXPECT_EQ(gg.edge(e).source, g.edge(pairs[e].first).source);
    EXPECT_EQ(gg.edge(e).range, r.edge(pairs[e].second).range);
  }
}

TEST(Graphs, ReverseIsInvolution) {
  const LayeredGraph g = build_dynkin("E6").top();
  EXPECT_EQ(reverse_graph(reverse_graph(g)), g);
  EXPECT_TRUE(reverse_graph(g).adjacency().isApprox(g.adjacency().transpose()));
}

TEST(Graphs, IdsAreValidated) {
  EXPECT_THROW(graph_from_ids(layer_v0, {"a", "a"}, layer_v3, {"b"}, {}), InputError);
  EXPECT_THROW(graph_from_ids(layer_v0, {"a"}, layer_v3, {"b"}, {{"e", "a", "c"}}), InputError);
  EXPECT_THROW(graph_from_ids(layer_v0, {"a"}, layer_v3, {"b"}, {{"e", "a", "b"}, {"e", "a", "b"}}), InputError);
}

TEST(Graphs, Connectivity) {
  EXPECT_TRUE(is_connected(star(3)));
  const LayeredGraph split = graph_from_ids(layer_v0, {"a", "b"}, layer_v3, {"c", "d"},
                                            {{"e1", "a", "c"}, {"e2", "b", "d"}});
  EXPECT_FALSE(is_connected(split));
}

TEST(Graphs, SquareValidatesAndDetectsPerturbedWeights) {
  const Connection c = build_dynkin("A3");
  SquareScheme s = scheme_of(c);
  const SquareReport ok = validate_square(s);
  EXPECT_TRUE(ok.passed);
  for (double r : ok.residuals) EXPECT_LT(r, 1e-12);

  // mu on the single V3 vertex (degree 2) moves by 0.1: the worst equation
  // is off by gamma1 * 0.1.
  s.mu[layer_v3][0] += 0.1;
  const SquareReport bad = validate_square(s);
  EXPECT_FALSE(bad.passed);
  const double worst = *std::max_element(bad.residuals.begin(), bad.residuals.end());
  EXPECT_NEAR(worst, 0.1 * std::sqrt(2.0), 1e-9);
}

TEST(Graphs, CompleteSchemeRecoversWeights) {
  const Connection c = build_dynkin("D5");
  const SquareScheme s = complete_scheme(c.top(), c.left(), c.bottom(), c.right(), 0);
  EXPECT_TRUE(validate_square(s).passed);
  EXPECT_NEAR(s.gamma1, 2.0 * std::cos(M_PI / 8), 1e-10);
  EXPECT_NEAR(s.mu[layer_v0][0], 1.0, 1e-12);
}

}  // namespace
}  // namespace pmpo
