#include "unig/hypergraph.hpp"

#include <map>
#include <random>

#include <gtest/gtest.h>

#include "test_util.hpp"

namespace unig {
namespace {

using testing::schematic_hypergraph;

Eigen::MatrixXi dense(const IncidenceMatrix& b) { return Eigen::MatrixXi(b.by_column); }

TEST(Hypergraph, SortsMembersAndRejectsBadEdges) {
  Hypergraph h(4, {{3, 1}, {0, 2, 1}});
  EXPECT_EQ(h.edge(0), (Edge{1, 3}));
  EXPECT_EQ(h.edge(1), (Edge{0, 1, 2}));
  EXPECT_FALSE(h.is_graph());

  EXPECT_THROW(Hypergraph(3, {{0}}), InvalidInput);
  EXPECT_THROW(Hypergraph(3, {{1, 1}}), InvalidInput);
  EXPECT_THROW(Hypergraph(3, {{0, 3}}), InvalidInput);
  EXPECT_THROW(Hypergraph(3, {{-1, 0}}), InvalidInput);
  EXPECT_THROW(Hypergraph(3, {{0, 1}, {1, 0}}), InvalidInput);
}

TEST(Hypergraph, DedupeKeepsFirstOccurrence) {
  Hypergraph h(3, {{0, 1}, {1, 2}, {1, 0}}, {.dedupe = true});
  ASSERT_EQ(h.num_edges(), 2);
  EXPECT_EQ(h.edge(1), (Edge{1, 2}));
}

TEST(Hypergraph, ErrorNamesOffendingEdge) {
  try {
    Hypergraph(3, {{0, 1}, {1, 7}});
    FAIL();
  } catch (const InvalidInput& e) {
    EXPECT_NE(std::string(e.what()).find("edge 1"), std::string::npos) << e.what();
  }
}

TEST(LabelVector, RejectsOutOfRange) {
  EXPECT_THROW(LabelVector({0, 2}, 2), InvalidInput);
  EXPECT_THROW(LabelVector({-1}, 2), InvalidInput);
  EXPECT_NO_THROW(LabelVector({0, 1}, 2));
}

TEST(Incidence, SchematicExample) {
  const auto b = build_incidence(schematic_hypergraph());
  EXPECT_EQ(dense(b), testing::schematic_incidence());
  EXPECT_EQ(Eigen::MatrixXi(b.by_row), testing::schematic_incidence());
}

TEST(Incidence, EmptyAndSingleEdge) {
  const auto empty = build_incidence(Hypergraph(5, {}));
  EXPECT_EQ(empty.rows(), 5);
  EXPECT_EQ(empty.cols(), 0);

  const auto single = build_incidence(Hypergraph(3, {{0, 1}}));
  Eigen::MatrixXi expected(3, 1);
  expected << 1, 1, 0;
  EXPECT_EQ(dense(single), expected);
}

TEST(Degrees, SchematicExample) {
  const auto d = degrees(build_incidence(schematic_hypergraph()));
  EXPECT_EQ(d.node_degrees, (std::vector<Index>{1, 1, 2, 1, 2, 1, 1}));
  EXPECT_EQ(d.edge_degrees, (std::vector<Index>{4, 2, 3}));
}

TEST(Degrees, EmptyAndSingleEdge) {
  const auto d0 = degrees(build_incidence(Hypergraph(3, {})));
  EXPECT_EQ(d0.node_degrees, (std::vector<Index>{0, 0, 0}));
  EXPECT_TRUE(d0.edge_degrees.empty());

  const auto d1 = degrees(build_incidence(Hypergraph(3, {{0, 1}})));
  EXPECT_EQ(d1.node_degrees, (std::vector<Index>{1, 1, 0}));
  EXPECT_EQ(d1.edge_degrees, (std::vector<Index>{2}));
}

TEST(Adjacency, SchematicIsCompoundMinusIdentity) {
  const auto a = adjacency(build_incidence(schematic_hypergraph()));
  const Eigen::MatrixXi expected = testing::schematic_compound() - Eigen::MatrixXi::Identity(7, 7);
  EXPECT_EQ(Eigen::MatrixXi(a), expected);
}

TEST(Adjacency, EmptyAndSingleEdge) {
  EXPECT_EQ(Eigen::MatrixXi(adjacency(build_incidence(Hypergraph(3, {})))), Eigen::MatrixXi::Zero(3, 3));
  Eigen::MatrixXi expected = Eigen::MatrixXi::Zero(3, 3);
  expected.topLeftCorner(2, 2).setOnes();
  EXPECT_EQ(Eigen::MatrixXi(adjacency(build_incidence(Hypergraph(3, {{0, 1}})))), expected);
}

TEST(Adjacency, PatternMatchesBruteForceScan) {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 200; ++trial) {
    const Hypergraph h = testing::random_hypergraph(rng);
    const Eigen::MatrixXi a(adjacency(build_incidence(h)));
    const auto d = degrees(build_incidence(h));
    for (Index i = 0; i < h.num_nodes(); ++i) {
      EXPECT_EQ(a(i, i), d.node_degrees[static_cast<std::size_t>(i)]);
      for (Index j = 0; j < h.num_nodes(); ++j)
        if (i != j) ASSERT_EQ(a(i, j) > 0, testing::share_edge(h, i, j)) << trial << " " << i << "," << j;
    }
  }
}

TEST(Degrees, SumsAgreeWithIncidenceCount) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const Hypergraph h = testing::random_hypergraph(rng);
    const auto b = build_incidence(h);
    const auto d = degrees(b);
    const Index node_sum = std::accumulate(d.node_degrees.begin(), d.node_degrees.end(), Index(0));
    const Index edge_sum = std::accumulate(d.edge_degrees.begin(), d.edge_degrees.end(), Index(0));
    EXPECT_EQ(node_sum, edge_sum);
    EXPECT_EQ(node_sum, b.by_column.nonZeros());
    EXPECT_EQ(node_sum, h.num_incidences());
  }
}

TEST(CliqueExpansion, Triangle) {
  const auto g = clique_expansion(Hypergraph(3, {{0, 1, 2}}));
  EXPECT_EQ(g.edges(), (std::vector<Edge>{{0, 1}, {0, 2}, {1, 2}}));
}

TEST(CliqueExpansion, SchematicHasTenPairs) {
  const auto g = clique_expansion(schematic_hypergraph());
  EXPECT_TRUE(g.is_graph());
  EXPECT_EQ(g.num_edges(), 10);
}

TEST(CliqueExpansion, IdentityOnGraphsAndIdempotent) {
  const Hypergraph g(4, {{0, 1}, {1, 2}, {2, 3}});
  EXPECT_EQ(clique_expansion(g), g);

  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const auto once = clique_expansion(testing::random_hypergraph(rng));
    EXPECT_EQ(clique_expansion(once), once);
  }
}

TEST(Homophily, BasicCases) {
  const Hypergraph path(3, {{0, 1}, {1, 2}});
  EXPECT_DOUBLE_EQ(homophily_score(path, LabelVector({1, 1, 1}, 2)).score, 1.0);
  EXPECT_DOUBLE_EQ(homophily_score(path, LabelVector({0, 1, 0}, 2)).score, 0.0);

  const Hypergraph triangle(3, {{0, 1, 2}});
  const auto h = homophily_score(triangle, LabelVector({0, 0, 1}, 2));
  EXPECT_EQ(h.matching_edges, 1);
  EXPECT_EQ(h.total_edges, 3);
  EXPECT_DOUBLE_EQ(h.score, 1.0 / 3.0);
}

TEST(Homophily, EmptyEdgesAndErrors) {
  const auto h = homophily_score(Hypergraph(2, {}), LabelVector({0, 1}, 2));
  EXPECT_TRUE(h.no_edges);
  EXPECT_EQ(h.score, 0.0);
  EXPECT_THROW(homophily_score(Hypergraph(0, {}), LabelVector({}, 1)), InvalidInput);
  EXPECT_THROW(homophily_score(Hypergraph(3, {{0, 1}}), LabelVector({0, 1}, 2)), InvalidInput);
}

TEST(Homophily, InvariantUnderClassRelabeling) {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 100; ++trial) {
    const Hypergraph h = testing::random_hypergraph(rng);
    const int classes = 4;
    std::uniform_int_distribution<int> pick(0, classes - 1);
    std::vector<int> y(static_cast<std::size_t>(h.num_nodes()));
    for (auto& v : y) v = pick(rng);
    std::vector<int> bijection{0, 1, 2, 3};
    std::shuffle(bijection.begin(), bijection.end(), rng);
    std::vector<int> relabeled;
    for (int v : y) relabeled.push_back(bijection[static_cast<std::size_t>(v)]);
    EXPECT_EQ(homophily_score(h, LabelVector(y, classes)).score,
              homophily_score(h, LabelVector(relabeled, classes)).score);
  }
}

}  // namespace
}  // namespace unig
