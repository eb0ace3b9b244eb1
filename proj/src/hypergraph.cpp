#include "unig/hypergraph.hpp"

#include <algorithm>
#include <set>
#include <string>
#include <utility>

namespace unig {

namespace {

std::string describe(const Edge& e) {
  std::string s = "{";
  for (std::size_t k = 0; k < e.size(); ++k) {
    if (k) s += ",";
    s += std::to_string(e[k]);
  }
  return s + "}";
}

}  // namespace

Hypergraph::Hypergraph(Index num_nodes, std::vector<Edge> edges,
                       HypergraphOptions options)
    : num_nodes_(num_nodes) {
  if (num_nodes < 0) throw InvalidInput("hypergraph: negative node count");

  std::set<Edge> seen;
  edges_.reserve(edges.size());
  for (std::size_t j = 0; j < edges.size(); ++j) {
    Edge e = std::move(edges[j]);
    std::sort(e.begin(), e.end());
    const std::string where = "edge " + std::to_string(j) + " " + describe(e);
    if (e.size() < 2)
      throw InvalidInput(where + ": edges need at least two members");
    if (std::adjacent_find(e.begin(), e.end()) != e.end())
      throw InvalidInput(where + ": repeated member");
    if (e.front() < 0 || e.back() >= num_nodes)
      throw InvalidInput(where + ": node index out of range [0, " +
                         std::to_string(num_nodes) + ")");
    if (!seen.insert(e).second) {
      if (options.dedupe) continue;
      throw InvalidInput(where + ": duplicate edge");
    }
    edges_.push_back(std::move(e));
  }
}

bool Hypergraph::is_graph() const {
  return std::all_of(edges_.begin(), edges_.end(),
                     [](const Edge& e) { return e.size() == 2; });
}

Index Hypergraph::num_incidences() const {
  Index n = 0;
  for (const auto& e : edges_) n += static_cast<Index>(e.size());
  return n;
}

LabelVector::LabelVector(std::vector<int> labels_in, int num_classes_in)
    : labels(std::move(labels_in)), num_classes(num_classes_in) {
  if (num_classes < 0) throw InvalidInput("labels: negative class count");
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= num_classes)
      throw InvalidInput("labels: node " + std::to_string(i) + " has label " +
                         std::to_string(labels[i]) + " outside [0, " +
                         std::to_string(num_classes) + ")");
  }
}

IncidenceMatrix build_incidence(const Hypergraph& h) {
  std::vector<Eigen::Triplet<int, Index>> entries;
  entries.reserve(static_cast<std::size_t>(h.num_incidences()));
  for (Index j = 0; j < h.num_edges(); ++j)
    for (Index v : h.edge(j)) entries.emplace_back(v, j, 1);

  IncidenceMatrix b;
  b.by_column.resize(h.num_nodes(), h.num_edges());
  b.by_column.setFromTriplets(entries.begin(), entries.end());
  b.by_row = b.by_column;
  return b;
}

DegreeVectors degrees(const IncidenceMatrix& b) {
  DegreeVectors d;
  d.node_degrees.assign(static_cast<std::size_t>(b.rows()), 0);
  d.edge_degrees.assign(static_cast<std::size_t>(b.cols()), 0);
  for (Index i = 0; i < b.by_row.outerSize(); ++i)
    for (decltype(b.by_row)::InnerIterator it(b.by_row, i); it; ++it)
      d.node_degrees[static_cast<std::size_t>(i)] += it.value();
  for (Index j = 0; j < b.by_column.outerSize(); ++j)
    for (decltype(b.by_column)::InnerIterator it(b.by_column, j); it; ++it)
      d.edge_degrees[static_cast<std::size_t>(j)] += it.value();
  return d;
}

Eigen::SparseMatrix<int, Eigen::RowMajor, Index> adjacency(const IncidenceMatrix& b) {
  Eigen::SparseMatrix<int, Eigen::RowMajor, Index> a = b.by_row * b.by_column.transpose();
  return a;
}

Hypergraph clique_expansion(const Hypergraph& h) {
  std::set<std::pair<Index, Index>> pairs;
  for (const auto& e : h.edges())
    for (std::size_t a = 0; a < e.size(); ++a)
      for (std::size_t c = a + 1; c < e.size(); ++c) pairs.emplace(e[a], e[c]);

  std::vector<Edge> edges;
  edges.reserve(pairs.size());
  for (const auto& [u, v] : pairs) edges.push_back({u, v});
  return Hypergraph(h.num_nodes(), std::move(edges));
}

HomophilyScore homophily_score(const Hypergraph& h, const LabelVector& y) {
  if (y.labels.empty()) throw InvalidInput("homophily: empty label vector");
  if (y.size() != h.num_nodes())
    throw InvalidInput("homophily: " + std::to_string(y.size()) +
                       " labels for " + std::to_string(h.num_nodes()) + " nodes");

  const Hypergraph expanded = clique_expansion(h);
  HomophilyScore out;
  out.total_edges = expanded.num_edges();
  for (const auto& e : expanded.edges())
    if (y[e[0]] == y[e[1]]) ++out.matching_edges;
  if (out.total_edges == 0) {
    out.no_edges = true;
    return out;
  }
  out.score = static_cast<double>(out.matching_edges) /
              static_cast<double>(out.total_edges);
  return out;
}

}  // namespace unig
