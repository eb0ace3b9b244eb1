#include "unig/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

namespace unig {

using nlohmann::json;

std::string_view to_string(GraphKind kind) {
  return kind == GraphKind::graph ? "graph" : "hypergraph";
}

void Dataset::validate() const {
  const Index n = structure.num_nodes();
  if (features.rows() != n)
    throw InvalidInput("dataset '" + name + "': " + std::to_string(features.rows()) +
                       " feature rows for " + std::to_string(n) + " nodes");
  if (labels.size() != n)
    throw InvalidInput("dataset '" + name + "': " + std::to_string(labels.size()) +
                       " labels for " + std::to_string(n) + " nodes");
  if (!features.allFinite()) throw InvalidInput("dataset '" + name + "': non-finite feature");
  std::vector<Index> count(static_cast<std::size_t>(labels.num_classes), 0);
  for (int y : labels.labels) ++count[static_cast<std::size_t>(y)];
  for (std::size_t c = 0; c < count.size(); ++c)
    if (count[c] == 0)
      throw InvalidInput("dataset '" + name + "': class " + std::to_string(c) + " has no nodes");
  if (kind == GraphKind::graph && !structure.is_graph())
    throw InvalidInput("dataset '" + name + "': kind 'graph' but an edge has more than two members");
}

json to_json(const Dataset& d) {
  std::vector<Edge> edges = d.structure.edges();
  std::sort(edges.begin(), edges.end());

  json features = json::array();
  for (Index i = 0; i < d.features.rows(); ++i) {
    json row = json::array();
    for (Index c = 0; c < d.features.cols(); ++c) row.push_back(d.features(i, c));
    features.push_back(std::move(row));
  }
  json j;
  j["name"] = d.name;
  j["kind"] = std::string(to_string(d.kind));
  j["num_nodes"] = d.structure.num_nodes();
  j["num_classes"] = d.labels.num_classes;
  j["edges"] = edges;
  j["features"] = std::move(features);
  j["labels"] = d.labels.labels;
  return j;
}

namespace {

template <typename T>
T field(const json& j, const char* key) {
  if (!j.contains(key)) throw InvalidInput(std::string("dataset: missing key '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("dataset: key '") + key + "': " + e.what());
  }
}

}  // namespace

Dataset dataset_from_json(const json& j, const LoadOptions& opts) {
  if (!j.is_object()) throw InvalidInput("dataset: top level must be an object");
  Dataset d;
  d.name = field<std::string>(j, "name");
  const auto kind = field<std::string>(j, "kind");
  if (kind == "graph")
    d.kind = GraphKind::graph;
  else if (kind == "hypergraph")
    d.kind = GraphKind::hypergraph;
  else
    throw InvalidInput("dataset: kind must be 'graph' or 'hypergraph', got '" + kind + "'");

  const auto n = field<Index>(j, "num_nodes");
  const auto num_classes = field<int>(j, "num_classes");
  auto edges = field<std::vector<Edge>>(j, "edges");
  if (opts.one_based)
    for (auto& e : edges)
      for (auto& v : e) --v;
  d.structure = Hypergraph(n, std::move(edges), HypergraphOptions{opts.dedupe});

  const auto rows = field<std::vector<std::vector<double>>>(j, "features");
  const Index dim = rows.empty() ? 0 : static_cast<Index>(rows.front().size());
  d.features.resize(static_cast<Index>(rows.size()), dim);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (static_cast<Index>(rows[i].size()) != dim)
      throw InvalidInput("dataset: feature row " + std::to_string(i) + " has " +
                         std::to_string(rows[i].size()) + " entries, expected " + std::to_string(dim));
    for (Index c = 0; c < dim; ++c)
      d.features(static_cast<Index>(i), c) = rows[i][static_cast<std::size_t>(c)];
  }
  d.labels = LabelVector(field<std::vector<int>>(j, "labels"), num_classes);
  d.validate();
  return d;
}

Dataset load_dataset(const std::filesystem::path& path, const LoadOptions& opts) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("dataset: cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw InvalidInput("dataset: " + path.string() + ": " + e.what());
  }
  return dataset_from_json(j, opts);
}

void save_dataset(const Dataset& d, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("dataset: cannot write " + path.string());
  out << to_json(d).dump() << '\n';
}

// ---- splits ---------------------------------------------------------------

void SplitSpec::validate() const {
  double sum = 0.0;
  for (double f : fractions) {
    if (!(f > 0.0)) throw InvalidInput("split: fractions must be positive");
    sum += f;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw InvalidInput("split: fractions must sum to 1");
  if (num_splits < 1) throw InvalidInput("split: need at least one split");
}

SplitSpec SplitSpec::parse(std::string_view text) {
  SplitSpec spec;
  const auto colon = text.find(':');
  const auto name = text.substr(0, colon);
  if (name == "per-class") {
    spec.protocol = Protocol::per_class;
    spec.fractions = {0.48, 0.32, 0.20};
  } else if (name == "uniform") {
    spec.protocol = Protocol::uniform;
    spec.fractions = {0.50, 0.25, 0.25};
  } else {
    throw InvalidInput("split: protocol must be 'per-class' or 'uniform', got '" +
                       std::string(name) + "'");
  }
  if (colon != std::string_view::npos) {
    std::istringstream in{std::string(text.substr(colon + 1))};
    std::string part;
    std::size_t k = 0;
    while (std::getline(in, part, ',')) {
      if (k == 3) throw InvalidInput("split: expected three fractions");
      try {
        spec.fractions[k++] = std::stod(part);
      } catch (const std::exception&) {
        throw InvalidInput("split: bad fraction '" + part + "'");
      }
    }
    if (k != 3) throw InvalidInput("split: expected three fractions");
  }
  spec.validate();
  return spec;
}

std::string SplitSpec::to_string() const {
  std::ostringstream out;
  out << (protocol == Protocol::per_class ? "per-class" : "uniform") << ':' << fractions[0] << ','
      << fractions[1] << ',' << fractions[2];
  return out.str();
}

namespace {

// Floor with slack for products such as 0.32 * 25 landing just below 8.
Index take(double fraction, std::size_t n) {
  return static_cast<Index>(std::floor(fraction * static_cast<double>(n) + 1e-9));
}

void deal(std::vector<Index> nodes, const std::array<double, 3>& f, std::mt19937_64& rng,
          Split& out) {
  std::shuffle(nodes.begin(), nodes.end(), rng);
  const auto n_train = take(f[0], nodes.size());
  const auto n_val = take(f[1], nodes.size());
  auto it = nodes.begin();
  out.train.insert(out.train.end(), it, it + n_train);
  it += n_train;
  out.val.insert(out.val.end(), it, it + n_val);
  it += n_val;
  out.test.insert(out.test.end(), it, nodes.end());
}

}  // namespace

std::vector<Split> make_splits(const Dataset& d, const SplitSpec& spec) {
  spec.validate();
  const Index n = d.num_nodes();
  std::vector<std::vector<Index>> by_class;
  if (spec.protocol == SplitSpec::Protocol::per_class) {
    by_class.resize(static_cast<std::size_t>(d.labels.num_classes));
    for (Index i = 0; i < n; ++i) by_class[static_cast<std::size_t>(d.labels[i])].push_back(i);
    for (std::size_t c = 0; c < by_class.size(); ++c)
      if (by_class[c].size() < 3)
        throw InvalidInput("split: class " + std::to_string(c) + " has " +
                           std::to_string(by_class[c].size()) +
                           " nodes; per-class protocol needs at least 3");
  } else {
    by_class.emplace_back(static_cast<std::size_t>(n));
    std::iota(by_class[0].begin(), by_class[0].end(), Index(0));
  }

  std::vector<Split> splits;
  for (int s = 0; s < spec.num_splits; ++s) {
    std::seed_seq seq{static_cast<std::uint32_t>(spec.seed), static_cast<std::uint32_t>(spec.seed >> 32),
                      static_cast<std::uint32_t>(s)};
    std::mt19937_64 rng(seq);
    Split split;
    for (const auto& members : by_class) deal(members, spec.fractions, rng, split);
    std::sort(split.train.begin(), split.train.end());
    std::sort(split.val.begin(), split.val.end());
    std::sort(split.test.begin(), split.test.end());
    splits.push_back(std::move(split));
  }
  return splits;
}

// ---- synthetic data -------------------------------------------------------

SynthResult synth_extend(const Dataset& graph, const SynthSpec& spec) {
  if (graph.kind != GraphKind::graph) throw InvalidInput("synth: input must be a graph dataset");
  if (spec.rank < 2) throw InvalidInput("synth: rank must be >= 2");
  if (spec.rank > graph.num_nodes())
    throw InvalidInput("synth: rank " + std::to_string(spec.rank) + " exceeds node count " +
                       std::to_string(graph.num_nodes()));
  if (!(spec.probability >= 0.0 && spec.probability <= 1.0))
    throw InvalidInput("synth: probability must lie in [0, 1]");

  const Index n = graph.num_nodes();
  const auto& y = graph.labels;
  std::mt19937_64 rng(spec.seed);
  std::bernoulli_distribution same_label(spec.probability);

  SynthResult result;
  std::vector<Edge> grown;
  std::vector<char> in_edge(static_cast<std::size_t>(n), 0);
  std::vector<char> label_present(static_cast<std::size_t>(y.num_classes), 0);
  std::vector<Index> candidates;
  candidates.reserve(static_cast<std::size_t>(n));

  for (const Edge& original : graph.structure.edges()) {
    Edge e = original;
    for (Index v : e) {
      in_edge[static_cast<std::size_t>(v)] = 1;
      label_present[static_cast<std::size_t>(y[v])] = 1;
    }
    while (static_cast<Index>(e.size()) < spec.rank) {
      const bool want_same = same_label(rng);
      candidates.clear();
      if (want_same) {
        for (Index v = 0; v < n; ++v)
          if (!in_edge[static_cast<std::size_t>(v)] && label_present[static_cast<std::size_t>(y[v])])
            candidates.push_back(v);
        if (candidates.empty()) ++result.fallback_count;
      }
      if (candidates.empty())
        for (Index v = 0; v < n; ++v)
          if (!in_edge[static_cast<std::size_t>(v)]) candidates.push_back(v);
      std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
      const Index v = candidates[pick(rng)];
      e.push_back(v);
      in_edge[static_cast<std::size_t>(v)] = 1;
      label_present[static_cast<std::size_t>(y[v])] = 1;
    }
    for (Index v : e) {
      in_edge[static_cast<std::size_t>(v)] = 0;
      label_present[static_cast<std::size_t>(y[v])] = 0;
    }
    std::sort(e.begin(), e.end());
    grown.push_back(std::move(e));
  }

  const auto before = static_cast<Index>(grown.size());
  result.dataset = graph;
  result.dataset.structure = Hypergraph(n, std::move(grown), HypergraphOptions{.dedupe = true});
  result.duplicates_removed = before - result.dataset.structure.num_edges();
  if (spec.rank > 2) {
    result.dataset.kind = GraphKind::hypergraph;
    std::ostringstream name;
    name << graph.name << "-syn-r" << spec.rank << "-p" << spec.probability;
    result.dataset.name = name.str();
  }
  return result;
}

Dataset synth_graph(const Dataset& hypergraph) {
  if (hypergraph.kind != GraphKind::hypergraph)
    throw InvalidInput("synth_graph: input must be a hypergraph dataset");
  Dataset out = hypergraph;
  out.kind = GraphKind::graph;
  out.structure = clique_expansion(hypergraph.structure);
  out.name = hypergraph.name + "-clique";
  return out;
}

Matrix<double> gaussian_label_features(const LabelVector& labels, Index dim, double sigma,
                                       std::uint64_t seed) {
  if (dim < labels.num_classes)
    throw InvalidInput("features: dimension smaller than the number of classes");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, sigma);
  Matrix<double> x(labels.size(), dim);
  for (Index i = 0; i < x.rows(); ++i)
    for (Index c = 0; c < dim; ++c) x(i, c) = (c == labels[i] ? 1.0 : 0.0) + noise(rng);
  return x;
}

}  // namespace unig
