#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/SparseCore>

#include "unig/error.hpp"

namespace unig {

using Index = std::int64_t;
using Edge = std::vector<Index>;

struct HypergraphOptions {
  /// Drop repeated edges (as sets) instead of rejecting them.
  bool dedupe = false;
};

/// A graph or hypergraph: `num_nodes` vertices and an ordered list of
/// edges, each a sorted set of at least two distinct node indices.
///
/// Plain graphs are hypergraphs whose edges all have two members. The
/// type is immutable once constructed; the constructor sorts each edge and
/// enforces index range, minimum size, and set-uniqueness of edges.
class Hypergraph {
 public:
  Hypergraph() = default;
  Hypergraph(Index num_nodes, std::vector<Edge> edges,
             HypergraphOptions options = {});

  Index num_nodes() const { return num_nodes_; }
  Index num_edges() const { return static_cast<Index>(edges_.size()); }
  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(Index j) const { return edges_[static_cast<std::size_t>(j)]; }

  /// True when every edge has exactly two members.
  bool is_graph() const;
  /// Total number of (node, edge) incidences.
  Index num_incidences() const;

  friend bool operator==(const Hypergraph&, const Hypergraph&) = default;

 private:
  Index num_nodes_ = 0;
  std::vector<Edge> edges_;
};

/// 0/1 node-by-edge matrix, kept in both column- and row-compressed form.
struct IncidenceMatrix {
  Eigen::SparseMatrix<int, Eigen::ColMajor, Index> by_column;
  Eigen::SparseMatrix<int, Eigen::RowMajor, Index> by_row;

  Index rows() const { return by_column.rows(); }
  Index cols() const { return by_column.cols(); }
};

struct DegreeVectors {
  std::vector<Index> node_degrees;
  std::vector<Index> edge_degrees;
};

/// Class index per node, together with the number of classes.
struct LabelVector {
  std::vector<int> labels;
  int num_classes = 0;

  LabelVector() = default;
  LabelVector(std::vector<int> labels, int num_classes);

  Index size() const { return static_cast<Index>(labels.size()); }
  int operator[](Index i) const { return labels[static_cast<std::size_t>(i)]; }

  friend bool operator==(const LabelVector&, const LabelVector&) = default;
};

IncidenceMatrix build_incidence(const Hypergraph& h);
DegreeVectors degrees(const IncidenceMatrix& b);

/// A = B * B^T. Entry (i, j) counts edges shared by nodes i and j.
Eigen::SparseMatrix<int, Eigen::RowMajor, Index> adjacency(const IncidenceMatrix& b);

/// Replaces each hyperedge by all pairs of its members (deduplicated).
Hypergraph clique_expansion(const Hypergraph& h);

struct HomophilyScore {
  double score = 0.0;
  Index matching_edges = 0;
  Index total_edges = 0;
  /// Set when the clique expansion has no edges; score is 0 in that case.
  bool no_edges = false;
};

/// Edge homophily of the clique expansion of `h`.
HomophilyScore homophily_score(const Hypergraph& h, const LabelVector& y);

}  // namespace unig
