#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "unig/dataset.hpp"
#include "unig/mlp.hpp"
#include "unig/projection.hpp"

namespace unig {

class DivergenceError : public NumericError {
 public:
  using NumericError::NumericError;
};

struct Hyperparams {
  double learning_rate = 0.01;
  double weight_decay = 0.0;
  double dropout = 0.0;
  int epochs = 500;
  std::uint64_t seed = 0;
};

/// Architecture of one encoder: layer count, hidden width, projection.
struct EncoderSpec {
  int num_layers = 2;
  Index hidden = 64;
  ProjectionConfig projection;
  /// Unset means a plain MLP.
  std::optional<Placement> placement = Placement{0, 2};
  /// Train in 32-bit floats.
  bool single_precision = false;

  /// [C0, hidden, ..., hidden, num_classes].
  std::vector<Index> layer_dims(Index input_dim, int num_classes) const;
};

struct SplitOutcome {
  double test_accuracy = 0.0;
  double best_val_accuracy = 0.0;
  /// Train accuracy at the selected epoch.
  double train_accuracy = 0.0;
  double final_train_accuracy = 0.0;
  /// 0-based; the earliest epoch with the highest validation accuracy.
  int best_val_epoch = 0;
  std::vector<double> loss_history;
};

struct TrainReport {
  std::vector<SplitOutcome> splits;
  double mean_accuracy = 0.0;
  /// Population standard deviation over splits.
  double std_accuracy = 0.0;
  double mean_val_accuracy = 0.0;
  nlohmann::json config;

  nlohmann::json to_json() const;
};

nlohmann::json config_to_json(const EncoderSpec& spec, const Hyperparams& hp);

/// Full-batch training on one split. `split_index` perturbs the seeds so
/// different splits get different initializations.
SplitOutcome train_split(const Dataset& d, const Split& split, const EncoderSpec& spec,
                         const Hyperparams& hp, int split_index = 0);

/// Trains once per split and aggregates the test accuracies.
TrainReport train(const Dataset& d, const std::vector<Split>& splits, const EncoderSpec& spec,
                  const Hyperparams& hp);

double accuracy(std::span<const int> predicted, std::span<const int> labels,
                std::span<const Index> nodes);

}  // namespace unig
