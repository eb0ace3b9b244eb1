#pragma once

#include <algorithm>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "unig/error.hpp"
#include "unig/hypergraph.hpp"

namespace unig {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename Scalar>
using SparseMatrix = Eigen::SparseMatrix<Scalar, Eigen::RowMajor, Index>;

enum class PvWeightMode { constant, degree_scaled };

/// Pairs (forward side, reverse side). "row" on the forward side only
/// rescales the edge block; see normalize().
enum class Normalization { none, row_row, col_col, row_col, col_row };

std::string_view to_string(PvWeightMode mode);
std::string_view to_string(Normalization n);
PvWeightMode parse_pv_weight_mode(std::string_view s);
Normalization parse_normalization(std::string_view s);

struct ProjectionConfig {
  /// Nonzero value c of the node block.
  double pv_weight = 1.0;
  PvWeightMode pv_weight_mode = PvWeightMode::constant;
  Normalization normalization = Normalization::row_row;
  /// sigma: node-block row i selects node (*permutation)[i]. Identity if unset.
  std::optional<std::vector<Index>> permutation;
  /// Power of the compound operator.
  int hops = 1;

  void validate(Index num_nodes) const;
};

/// Where a row of the projected set comes from.
struct RowOrigin {
  enum class Kind { node, edge } kind;
  Index index;

  friend bool operator==(const RowOrigin&, const RowOrigin&) = default;
};

/// P = [P_V; P_E] with its normalized forward and reverse operators.
///
/// Rows [0, num_nodes) form the node block (a weighted permutation of the
/// identity), rows [num_nodes, num_nodes + num_edges) the edge block, in
/// the edge order of the source hypergraph.
template <typename Scalar>
struct ProjectionMatrix {
  SparseMatrix<Scalar> raw;      // (|V|+|E|) x |V|
  SparseMatrix<Scalar> forward;  // normalized raw
  SparseMatrix<Scalar> reverse;  // normalized raw^T, |V| x (|V|+|E|)
  Index num_nodes = 0;
  Index num_edges = 0;
  int hops = 1;

  Index projected_size() const { return num_nodes + num_edges; }
  std::pair<Index, Index> node_block_rows() const { return {0, num_nodes}; }
  std::pair<Index, Index> edge_block_rows() const { return {num_nodes, projected_size()}; }
};

namespace detail {

template <typename Scalar>
std::vector<Scalar> row_sums(const SparseMatrix<Scalar>& m) {
  std::vector<Scalar> sums(static_cast<std::size_t>(m.rows()), Scalar(0));
  for (Index r = 0; r < m.outerSize(); ++r)
    for (typename SparseMatrix<Scalar>::InnerIterator it(m, r); it; ++it)
      sums[static_cast<std::size_t>(r)] += it.value();
  return sums;
}

template <typename Scalar>
std::vector<Scalar> col_sums(const SparseMatrix<Scalar>& m) {
  std::vector<Scalar> sums(static_cast<std::size_t>(m.cols()), Scalar(0));
  for (Index r = 0; r < m.outerSize(); ++r)
    for (typename SparseMatrix<Scalar>::InnerIterator it(m, r); it; ++it)
      sums[static_cast<std::size_t>(it.col())] += it.value();
  return sums;
}

template <typename Scalar>
Scalar checked_inverse(Scalar sum, const char* what) {
  if (!(sum != Scalar(0))) throw NumericError(std::string("normalize: zero ") + what + " sum");
  return Scalar(1) / sum;
}

/// Divides rows [first, m.rows()) by their sums.
template <typename Scalar>
SparseMatrix<Scalar> row_normalized(SparseMatrix<Scalar> m, Index first = 0) {
  const auto sums = row_sums(m);
  for (Index r = first; r < m.outerSize(); ++r) {
    const Scalar inv = checked_inverse(sums[static_cast<std::size_t>(r)], "row");
    for (typename SparseMatrix<Scalar>::InnerIterator it(m, r); it; ++it)
      it.valueRef() *= inv;
  }
  return m;
}

template <typename Scalar>
SparseMatrix<Scalar> col_normalized(SparseMatrix<Scalar> m) {
  const auto sums = col_sums(m);
  std::vector<Scalar> inv(sums.size());
  for (std::size_t c = 0; c < sums.size(); ++c) inv[c] = checked_inverse(sums[c], "column");
  for (Index r = 0; r < m.outerSize(); ++r)
    for (typename SparseMatrix<Scalar>::InnerIterator it(m, r); it; ++it)
      it.valueRef() *= inv[static_cast<std::size_t>(it.col())];
  return m;
}

}  // namespace detail

/// Normalizes `raw` (built by build_projection over `num_nodes` nodes).
///
/// Forward side: "row" rescales each edge-block row to sum 1 and leaves the
/// node block alone; "col" rescales every column of raw to sum 1.
/// Reverse side operates on raw^T: "row" rescales every row, "col" every
/// column, to sum 1.
template <typename Scalar>
std::pair<SparseMatrix<Scalar>, SparseMatrix<Scalar>> normalize(
    const SparseMatrix<Scalar>& raw, Index num_nodes, Normalization variant) {
  SparseMatrix<Scalar> transposed = raw.transpose();
  switch (variant) {
    case Normalization::none:
      return {raw, std::move(transposed)};
    case Normalization::row_row:
      return {detail::row_normalized(raw, num_nodes), detail::row_normalized(std::move(transposed))};
    case Normalization::col_col:
      return {detail::col_normalized(raw), detail::col_normalized(std::move(transposed))};
    case Normalization::row_col:
      return {detail::row_normalized(raw, num_nodes), detail::col_normalized(std::move(transposed))};
    case Normalization::col_row:
      return {detail::col_normalized(raw), detail::row_normalized(std::move(transposed))};
  }
  throw InvalidInput("normalize: unknown variant");
}

template <typename Scalar = double>
ProjectionMatrix<Scalar> build_projection(const Hypergraph& h, const ProjectionConfig& cfg) {
  const Index n = h.num_nodes();
  cfg.validate(n);

  std::vector<Index> sigma(static_cast<std::size_t>(n));
  if (cfg.permutation)
    sigma = *cfg.permutation;
  else
    std::iota(sigma.begin(), sigma.end(), Index(0));

  std::vector<Index> node_degree(static_cast<std::size_t>(n), 0);
  for (const auto& e : h.edges())
    for (Index v : e) ++node_degree[static_cast<std::size_t>(v)];

  std::vector<Eigen::Triplet<Scalar, Index>> entries;
  entries.reserve(static_cast<std::size_t>(n + h.num_incidences()));
  for (Index i = 0; i < n; ++i) {
    const Index v = sigma[static_cast<std::size_t>(i)];
    double w = cfg.pv_weight;
    // Isolated nodes keep weight c so every node-block row stays nonzero.
    if (cfg.pv_weight_mode == PvWeightMode::degree_scaled)
      w *= static_cast<double>(std::max<Index>(node_degree[static_cast<std::size_t>(v)], 1));
    entries.emplace_back(i, v, static_cast<Scalar>(w));
  }
  for (Index j = 0; j < h.num_edges(); ++j)
    for (Index v : h.edge(j)) entries.emplace_back(n + j, v, Scalar(1));

  ProjectionMatrix<Scalar> pm;
  pm.num_nodes = n;
  pm.num_edges = h.num_edges();
  pm.hops = cfg.hops;
  pm.raw.resize(n + h.num_edges(), n);
  pm.raw.setFromTriplets(entries.begin(), entries.end());
  std::tie(pm.forward, pm.reverse) = normalize(pm.raw, n, cfg.normalization);
  return pm;
}

/// H0 = forward * X.
template <typename Scalar, typename Derived>
Matrix<Scalar> project_forward(const ProjectionMatrix<Scalar>& pm,
                               const Eigen::MatrixBase<Derived>& x) {
  if (x.rows() != pm.num_nodes)
    throw DimensionMismatch("project_forward: expected " + std::to_string(pm.num_nodes) +
                            " rows, got " + std::to_string(x.rows()));
  return pm.forward * x;
}

/// Y = reverse * H.
template <typename Scalar, typename Derived>
Matrix<Scalar> project_reverse(const ProjectionMatrix<Scalar>& pm,
                               const Eigen::MatrixBase<Derived>& h) {
  if (h.rows() != pm.projected_size())
    throw DimensionMismatch("project_reverse: expected " + std::to_string(pm.projected_size()) +
                            " rows, got " + std::to_string(h.rows()));
  return pm.reverse * h;
}

/// (reverse * forward)^hops, a |V| x |V| operator.
template <typename Scalar>
SparseMatrix<Scalar> compound(const ProjectionMatrix<Scalar>& pm) {
  const SparseMatrix<Scalar> once = pm.reverse * pm.forward;
  SparseMatrix<Scalar> out = once;
  for (int k = 1; k < pm.hops; ++k) {
    SparseMatrix<Scalar> next = out * once;
    out = std::move(next);
  }
  return out;
}

/// Identifies the node or edge behind row `row` of the projected set.
template <typename Scalar>
RowOrigin row_origin(const ProjectionMatrix<Scalar>& pm, Index row) {
  if (row < 0 || row >= pm.projected_size())
    throw DimensionMismatch("row_origin: row " + std::to_string(row) + " out of range");
  if (row >= pm.num_nodes) return {RowOrigin::Kind::edge, row - pm.num_nodes};
  typename SparseMatrix<Scalar>::InnerIterator it(pm.raw, row);
  return {RowOrigin::Kind::node, it.col()};
}

/// Member list of edge-block row `j`, read back from the raw matrix.
template <typename Scalar>
Edge edge_members(const ProjectionMatrix<Scalar>& pm, Index j) {
  Edge members;
  for (typename SparseMatrix<Scalar>::InnerIterator it(pm.raw, pm.num_nodes + j); it; ++it)
    members.push_back(it.col());
  return members;
}

}  // namespace unig
