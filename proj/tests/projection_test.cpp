#include "unig/projection.hpp"

#include <queue>
#include <random>

#include <gtest/gtest.h>

#include "test_util.hpp"

namespace unig {
namespace {

using testing::schematic_hypergraph;
using Dense = Eigen::MatrixXd;

ProjectionConfig config(Normalization n, double c = 1.0) {
  ProjectionConfig cfg;
  cfg.normalization = n;
  cfg.pv_weight = c;
  return cfg;
}

Dense dense(const SparseMatrix<double>& m) { return Dense(m); }

TEST(BuildProjection, SchematicRawMatchesPrintedMatrices) {
  const auto pm = build_projection(schematic_hypergraph(), config(Normalization::none));
  EXPECT_EQ(pm.projected_size(), 10);
  EXPECT_EQ(dense(pm.raw), testing::schematic_projection().cast<double>());
  EXPECT_EQ(dense(pm.forward), testing::schematic_projection().cast<double>());
  EXPECT_EQ(dense(pm.reverse), testing::schematic_projection_transposed().cast<double>());
  EXPECT_EQ(pm.node_block_rows(), (std::pair<Index, Index>{0, 7}));
  EXPECT_EQ(pm.edge_block_rows(), (std::pair<Index, Index>{7, 10}));
}

TEST(BuildProjection, ConstantWeightScalesNodeBlockOnly) {
  const auto pm = build_projection(schematic_hypergraph(), config(Normalization::none, 10.0));
  const Dense raw = dense(pm.raw);
  EXPECT_EQ(raw.topRows(7), 10.0 * Dense::Identity(7, 7));
  EXPECT_EQ(raw.bottomRows(3), testing::schematic_projection().bottomRows(3).cast<double>());
}

TEST(BuildProjection, DegreeScaledWeight) {
  auto cfg = config(Normalization::none);
  cfg.pv_weight_mode = PvWeightMode::degree_scaled;
  const Dense raw = dense(build_projection(schematic_hypergraph(), cfg).raw);
  const std::vector<double> d{1, 1, 2, 1, 2, 1, 1};
  for (Index i = 0; i < 7; ++i) EXPECT_EQ(raw(i, i), d[static_cast<std::size_t>(i)]);

  cfg.pv_weight = 0.5;
  const Dense isolated = dense(build_projection(Hypergraph(3, {{0, 1}}), cfg).raw);
  EXPECT_EQ(isolated(2, 2), 0.5);  // d = 0 keeps weight c
}

TEST(BuildProjection, ConfigErrors) {
  auto cfg = config(Normalization::row_row);
  cfg.permutation = std::vector<Index>{0, 1};
  EXPECT_THROW(build_projection(schematic_hypergraph(), cfg), InvalidInput);
  cfg.permutation = std::vector<Index>{0, 1, 2, 3, 4, 5, 5};
  EXPECT_THROW(build_projection(schematic_hypergraph(), cfg), InvalidInput);
  EXPECT_THROW(build_projection(schematic_hypergraph(), config(Normalization::row_row, 0.0)), InvalidInput);
  EXPECT_THROW(build_projection(schematic_hypergraph(), config(Normalization::row_row, -1.0)), InvalidInput);
}

TEST(Normalize, NoneLeavesRawUntouched) {
  std::mt19937_64 rng(5);
  const auto h = testing::random_hypergraph(rng);
  const auto pm = build_projection(h, config(Normalization::none, 2.5));
  EXPECT_EQ(dense(pm.forward), dense(pm.raw));
  EXPECT_EQ(dense(pm.reverse), Dense(dense(pm.raw).transpose()));
}

TEST(Normalize, ColColColumnsSumToOne) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    const auto h = testing::random_hypergraph(rng);
    const auto pm = build_projection(h, config(Normalization::col_col, 3.0));
    const Dense f = dense(pm.forward), r = dense(pm.reverse);
    for (Index c = 0; c < f.cols(); ++c) EXPECT_NEAR(f.col(c).sum(), 1.0, 1e-12);
    for (Index c = 0; c < r.cols(); ++c) EXPECT_NEAR(r.col(c).sum(), 1.0, 1e-12);
  }
}

TEST(Normalize, RowRowSums) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const auto h = testing::random_hypergraph(rng);
    const double c = std::uniform_real_distribution<double>(0.1, 10.0)(rng);
    const auto pm = build_projection(h, config(Normalization::row_row, c));
    const Dense f = dense(pm.forward), r = dense(pm.reverse);
    for (Index i = 0; i < h.num_nodes(); ++i) EXPECT_EQ(f.row(i).sum(), c);  // node block untouched
    for (Index i = h.num_nodes(); i < f.rows(); ++i) EXPECT_NEAR(f.row(i).sum(), 1.0, 1e-12);
    for (Index i = 0; i < r.rows(); ++i) EXPECT_NEAR(r.row(i).sum(), 1.0, 1e-12);
  }
}

TEST(Normalize, MixedVariantsPairSidesAsNamed) {
  const auto h = schematic_hypergraph();
  const auto rc = build_projection(h, config(Normalization::row_col));
  const auto rr = build_projection(h, config(Normalization::row_row));
  const auto cc = build_projection(h, config(Normalization::col_col));
  const auto cr = build_projection(h, config(Normalization::col_row));
  EXPECT_EQ(dense(rc.forward), dense(rr.forward));
  EXPECT_EQ(dense(rc.reverse), dense(cc.reverse));
  EXPECT_EQ(dense(cr.forward), dense(cc.forward));
  EXPECT_EQ(dense(cr.reverse), dense(rr.reverse));
}

TEST(Compound, SchematicUnnormalizedIsIdentityPlusAdjacency) {
  const auto pm = build_projection(schematic_hypergraph(), config(Normalization::none));
  EXPECT_EQ(dense(compound(pm)), testing::schematic_compound().cast<double>());
}

TEST(Compound, SchematicRowRowMatchesClosedForm) {
  const auto pm = build_projection(schematic_hypergraph(), config(Normalization::row_row));
  const Dense diff = dense(compound(pm)) - testing::row_row_compound_formula(schematic_hypergraph());
  EXPECT_LE(diff.cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Compound, WeightedUnnormalizedIsScaledIdentityPlusAdjacency) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    const auto h = testing::random_hypergraph(rng);
    // Dyadic weights keep c^2 + d exactly representable in any summation order.
    const double c = std::uniform_int_distribution<int>(1, 80)(rng) / 16.0;
    auto cfg = config(Normalization::none, c);
    cfg.permutation = testing::random_permutation(rng, h.num_nodes());
    const auto pm = build_projection(h, cfg);
    const Dense b = testing::dense_incidence(h);
    const Dense expected = c * c * Dense::Identity(h.num_nodes(), h.num_nodes()) + b * b.transpose();
    EXPECT_EQ(dense(compound(pm)), expected);

    // P_V^T P_V = c^2 I for any permutation.
    const Dense pv = dense(pm.raw).topRows(h.num_nodes());
    EXPECT_EQ(Dense(pv.transpose() * pv), c * c * Dense::Identity(h.num_nodes(), h.num_nodes()));
  }
}

// Nodes reachable from `source` in at most `hops` steps on the clique expansion.
std::vector<bool> reachable(const Hypergraph& h, Index source, int hops) {
  std::vector<int> dist(static_cast<std::size_t>(h.num_nodes()), -1);
  std::queue<Index> q;
  dist[static_cast<std::size_t>(source)] = 0;
  q.push(source);
  while (!q.empty()) {
    const Index u = q.front();
    q.pop();
    for (Index v = 0; v < h.num_nodes(); ++v)
      if (dist[static_cast<std::size_t>(v)] < 0 && testing::share_edge(h, u, v)) {
        dist[static_cast<std::size_t>(v)] = dist[static_cast<std::size_t>(u)] + 1;
        q.push(v);
      }
  }
  std::vector<bool> out;
  for (int d : dist) out.push_back(d >= 0 && d <= hops);
  return out;
}

TEST(Compound, MultiHopReach) {
  const Hypergraph path(3, {{0, 1}, {1, 2}});
  auto cfg = config(Normalization::row_row);
  EXPECT_EQ(dense(compound(build_projection(path, cfg)))(0, 2), 0.0);
  cfg.hops = 2;
  EXPECT_GT(dense(compound(build_projection(path, cfg)))(0, 2), 0.0);

  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 50; ++trial) {
    const auto h = testing::random_hypergraph(rng, 12, 6);
    for (int hops : {1, 2, 3}) {
      cfg.hops = hops;
      const Dense m = dense(compound(build_projection(h, cfg)));
      for (Index i = 0; i < h.num_nodes(); ++i) {
        const auto reach = reachable(h, i, hops);
        for (Index j = 0; j < h.num_nodes(); ++j)
          ASSERT_EQ(m(i, j) > 0, reach[static_cast<std::size_t>(j)]) << hops << " " << i << "," << j;
      }
    }
  }
}

TEST(Compound, SparsityPatternMatchesSharedEdgeOracle) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const auto h = testing::random_hypergraph(rng);
    const double c = std::uniform_real_distribution<double>(0.01, 100.0)(rng);
    const Dense m = dense(compound(build_projection(h, config(Normalization::none, c))));
    for (Index i = 0; i < h.num_nodes(); ++i)
      for (Index j = 0; j < h.num_nodes(); ++j)
        ASSERT_EQ(m(i, j) > 0, i == j || testing::share_edge(h, i, j));
  }
}

TEST(RowOrigin, BijectionAndEdgeReconstruction) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    const auto h = testing::random_hypergraph(rng);
    auto cfg = config(Normalization::row_row);
    cfg.permutation = testing::random_permutation(rng, h.num_nodes());
    const auto pm = build_projection(h, cfg);
    ASSERT_EQ(pm.projected_size(), h.num_nodes() + h.num_edges());

    std::vector<int> node_hits(static_cast<std::size_t>(h.num_nodes()), 0);
    std::vector<int> edge_hits(static_cast<std::size_t>(h.num_edges()), 0);
    for (Index r = 0; r < pm.projected_size(); ++r) {
      const auto o = row_origin(pm, r);
      auto& hits = o.kind == RowOrigin::Kind::node ? node_hits : edge_hits;
      ++hits[static_cast<std::size_t>(o.index)];
      if (o.kind == RowOrigin::Kind::node)
        EXPECT_EQ(o.index, (*cfg.permutation)[static_cast<std::size_t>(r)]);
    }
    for (int k : node_hits) EXPECT_EQ(k, 1);
    for (int k : edge_hits) EXPECT_EQ(k, 1);
    for (Index j = 0; j < h.num_edges(); ++j) EXPECT_EQ(edge_members(pm, j), h.edge(j));
  }
}

TEST(Projection, PermutationEquivariance) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    const auto h = testing::random_hypergraph(rng);
    const Index n = h.num_nodes();
    const auto pi = testing::random_permutation(rng, n);  // node v is renamed pi[v]
    std::vector<Edge> renamed;
    for (const auto& e : h.edges()) {
      Edge r;
      for (Index v : e) r.push_back(pi[static_cast<std::size_t>(v)]);
      renamed.push_back(r);
    }
    const Hypergraph hp(n, renamed);
    for (auto variant : {Normalization::none, Normalization::row_row, Normalization::col_col,
                         Normalization::row_col, Normalization::col_row}) {
      const auto a = build_projection(h, config(variant, 2.0));
      const auto b = build_projection(hp, config(variant, 2.0));
      const Dense fa = dense(a.forward), fb = dense(b.forward);
      const Dense ra = dense(a.reverse), rb = dense(b.reverse);
      auto row_map = [&](Index r) { return r < n ? pi[static_cast<std::size_t>(r)] : r; };
      for (Index r = 0; r < fa.rows(); ++r)
        for (Index v = 0; v < n; ++v) {
          ASSERT_DOUBLE_EQ(fa(r, v), fb(row_map(r), pi[static_cast<std::size_t>(v)]));
          ASSERT_DOUBLE_EQ(ra(v, r), rb(pi[static_cast<std::size_t>(v)], row_map(r)));
        }
    }
  }
}

TEST(ProjectForward, EdgeRowIsMemberMean) {
  const auto pm = build_projection(Hypergraph(2, {{0, 1}}), config(Normalization::row_row));
  const Dense x = Dense::Identity(2, 2);
  const Dense h0 = project_forward(pm, x);
  ASSERT_EQ(h0.rows(), 3);
  EXPECT_DOUBLE_EQ(h0(2, 0), 0.5);
  EXPECT_DOUBLE_EQ(h0(2, 1), 0.5);
}

TEST(ProjectForward, SchematicSecondEdge) {
  const auto pm = build_projection(schematic_hypergraph(), config(Normalization::row_row));
  std::mt19937_64 rng(4);
  const Dense x = Dense::NullaryExpr(7, 5, [&] { return std::normal_distribution<double>()(rng); });
  const Dense h0 = project_forward(pm, x);
  const Eigen::RowVectorXd expected = (x.row(2) + x.row(3)) / 2.0;
  EXPECT_LE((h0.row(8) - expected).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(ProjectForward, UnnormalizedNodeBlockCopiesFeatures) {
  const auto pm = build_projection(schematic_hypergraph(), config(Normalization::none));
  const Dense x = Dense::Random(7, 4);
  EXPECT_EQ(Dense(project_forward(pm, x).topRows(7)), x);
  EXPECT_THROW(project_forward(pm, Dense::Random(6, 4)), DimensionMismatch);
}

TEST(ProjectReverse, IsolatedNodeKeepsEgoRow) {
  const auto pm = build_projection(Hypergraph(3, {{0, 1}}), config(Normalization::row_row, 4.0));
  const Dense h = Dense::Random(4, 3);
  EXPECT_LE((project_reverse(pm, h).row(2) - h.row(2)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(ProjectReverse, SchematicDegreeOneNode) {
  const auto pm = build_projection(schematic_hypergraph(), config(Normalization::row_row));
  const Dense h = Dense::Random(10, 3);
  const Eigen::RowVectorXd expected = (h.row(3) + h.row(8)) / 2.0;
  EXPECT_LE((project_reverse(pm, h).row(3) - expected).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(ProjectReverse, WeightedEgoTerm) {
  const auto pm = build_projection(Hypergraph(3, {{0, 1}}), config(Normalization::row_row, 3.0));
  const Dense h = Dense::Random(4, 2);
  const Eigen::RowVectorXd expected = (3.0 * h.row(0) + h.row(3)) / 4.0;
  EXPECT_LE((project_reverse(pm, h).row(0) - expected).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_THROW(project_reverse(pm, Dense::Random(3, 2)), DimensionMismatch);
}

TEST(Projection, SinglePrecisionMatchesDouble) {
  const auto pd = build_projection<double>(schematic_hypergraph(), config(Normalization::row_row));
  const auto pf = build_projection<float>(schematic_hypergraph(), config(Normalization::row_row));
  const Dense diff = dense(compound(pd)) - Eigen::MatrixXf(compound(pf)).cast<double>();
  EXPECT_LE(diff.cwiseAbs().maxCoeff(), 1e-6);
}

}  // namespace
}  // namespace unig
