#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "unig/hypergraph.hpp"
#include "unig/projection.hpp"

namespace unig {

enum class GraphKind { graph, hypergraph };

std::string_view to_string(GraphKind kind);

/// Node features, labels and structure of one benchmark.
struct Dataset {
  std::string name;
  GraphKind kind = GraphKind::hypergraph;
  Hypergraph structure;
  Matrix<double> features;
  LabelVector labels;

  Index num_nodes() const { return structure.num_nodes(); }
  /// Throws InvalidInput if shapes disagree, a class is empty, or a
  /// "graph" has an edge that is not a pair.
  void validate() const;

  friend bool operator==(const Dataset& a, const Dataset& b) {
    return a.name == b.name && a.kind == b.kind && a.structure == b.structure &&
           a.labels == b.labels && a.features.rows() == b.features.rows() &&
           a.features.cols() == b.features.cols() && a.features == b.features;
  }
};

struct LoadOptions {
  bool dedupe = false;
  /// Edge indices in the file start at 1.
  bool one_based = false;
};

nlohmann::json to_json(const Dataset& d);
Dataset dataset_from_json(const nlohmann::json& j, const LoadOptions& opts = {});

Dataset load_dataset(const std::filesystem::path& path, const LoadOptions& opts = {});
/// Writes the canonical form: sorted keys, sorted edges, round-trip floats.
void save_dataset(const Dataset& d, const std::filesystem::path& path);

// ---- splits ---------------------------------------------------------------

struct SplitSpec {
  enum class Protocol { per_class, uniform };

  Protocol protocol = Protocol::per_class;
  std::array<double, 3> fractions{0.48, 0.32, 0.20};
  int num_splits = 10;
  std::uint64_t seed = 0;

  void validate() const;
  /// "per-class:0.48,0.32,0.2" or "uniform:0.5,0.25,0.25"; a bare protocol
  /// name takes that protocol's default fractions.
  static SplitSpec parse(std::string_view text);
  std::string to_string() const;
};

struct Split {
  std::vector<Index> train;
  std::vector<Index> val;
  std::vector<Index> test;

  friend bool operator==(const Split&, const Split&) = default;
};

std::vector<Split> make_splits(const Dataset& d, const SplitSpec& spec);

// ---- synthetic data -------------------------------------------------------

struct SynthSpec {
  Index rank = 3;
  double probability = 0.0;
  std::uint64_t seed = 0;
};

struct SynthResult {
  Dataset dataset;
  /// Same-label draws that found no candidate and fell back to uniform.
  Index fallback_count = 0;
  /// Grown edges dropped because they duplicated an earlier one.
  Index duplicates_removed = 0;
};

/// Grows every pair of a graph dataset into a hyperedge of `rank` members.
SynthResult synth_extend(const Dataset& graph, const SynthSpec& spec);

/// Graph with the clique expansion of a hypergraph dataset's edges.
Dataset synth_graph(const Dataset& hypergraph);

/// One-hot label encoding padded to `dim` columns plus N(0, sigma^2) noise.
Matrix<double> gaussian_label_features(const LabelVector& labels, Index dim, double sigma,
                                       std::uint64_t seed);

}  // namespace unig
