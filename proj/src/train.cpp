#include "unig/train.hpp"

#include <cmath>
#include <random>
#include <string>

namespace unig {

std::vector<Index> EncoderSpec::layer_dims(Index input_dim, int num_classes) const {
  if (num_layers < 1) throw InvalidInput("encoder: need at least one layer");
  if (hidden < 1) throw InvalidInput("encoder: hidden width must be >= 1");
  std::vector<Index> dims{input_dim};
  for (int k = 1; k < num_layers; ++k) dims.push_back(hidden);
  dims.push_back(num_classes);
  return dims;
}

double accuracy(std::span<const int> predicted, std::span<const int> labels,
                std::span<const Index> nodes) {
  if (nodes.empty()) return 0.0;
  Index hits = 0;
  for (Index i : nodes)
    if (predicted[static_cast<std::size_t>(i)] == labels[static_cast<std::size_t>(i)]) ++hits;
  return static_cast<double>(hits) / static_cast<double>(nodes.size());
}

namespace {

std::uint64_t split_seed(std::uint64_t seed, int split_index, std::uint64_t salt) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(split_index), static_cast<std::uint32_t>(salt)};
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

template <typename Scalar>
std::optional<ProjectionMatrix<Scalar>> projection_for(const Dataset& d, const EncoderSpec& spec) {
  if (!spec.placement) return std::nullopt;
  return build_projection<Scalar>(d.structure, spec.projection);
}

template <typename Scalar>
SplitOutcome run(const Dataset& d, const Matrix<Scalar>& x, const Split& split, const EncoderSpec& spec,
                 const Hyperparams& hp, const std::optional<ProjectionMatrix<Scalar>>& projection,
                 int split_index) {
  if (split.train.empty()) throw InvalidInput("train: split has no training nodes");
  if (hp.epochs < 1) throw InvalidInput("train: epochs must be >= 1");
  if (!(hp.learning_rate > 0.0)) throw InvalidInput("train: learning rate must be positive");
  if (!(hp.weight_decay >= 0.0)) throw InvalidInput("train: weight decay must be >= 0");

  MlpConfig cfg{spec.layer_dims(x.cols(), d.labels.num_classes), hp.dropout,
                split_seed(hp.seed, split_index, 1)};
  EncoderPipeline<Scalar> pipe(cfg, projection, spec.placement);
  AdamState<Scalar> adam(pipe.parameters(), hp.learning_rate, hp.weight_decay);
  std::mt19937_64 dropout_rng(split_seed(hp.seed, split_index, 2));
  const std::span<const int> labels(d.labels.labels);

  SplitOutcome out;
  out.best_val_accuracy = -1.0;
  ForwardCache<Scalar> cache;
  for (int epoch = 0; epoch < hp.epochs; ++epoch) {
    const Matrix<Scalar> logits = mlp_forward(pipe, x, Mode::train, dropout_rng, &cache);
    const auto loss = cross_entropy_masked<Scalar>(logits, labels, split.train);
    if (!std::isfinite(static_cast<double>(loss.loss)))
      throw DivergenceError("train: non-finite loss at epoch " + std::to_string(epoch) +
                            " (lr=" + std::to_string(hp.learning_rate) + ")");
    out.loss_history.push_back(static_cast<double>(loss.loss));
    const auto grads = backward(pipe, cache, loss.dlogits);
    adam_step(adam, pipe.mutable_parameters(), grads);

    const auto predicted = predict<Scalar>(mlp_forward(pipe, x, Mode::eval, dropout_rng));
    const double val = accuracy(predicted, labels, split.val);
    out.final_train_accuracy = accuracy(predicted, labels, split.train);
    if (val > out.best_val_accuracy) {
      out.best_val_accuracy = val;
      out.best_val_epoch = epoch;
      out.test_accuracy = accuracy(predicted, labels, split.test);
      out.train_accuracy = out.final_train_accuracy;
    }
  }
  return out;
}

template <typename Scalar>
TrainReport train_as(const Dataset& d, const std::vector<Split>& splits, const EncoderSpec& spec,
                     const Hyperparams& hp) {
  const Matrix<Scalar> x = d.features.cast<Scalar>();
  const auto projection = projection_for<Scalar>(d, spec);
  TrainReport report;
  for (std::size_t s = 0; s < splits.size(); ++s)
    report.splits.push_back(run<Scalar>(d, x, splits[s], spec, hp, projection, static_cast<int>(s)));
  return report;
}

}  // namespace

SplitOutcome train_split(const Dataset& d, const Split& split, const EncoderSpec& spec,
                         const Hyperparams& hp, int split_index) {
  if (spec.single_precision)
    return run<float>(d, d.features.cast<float>(), split, spec, hp, projection_for<float>(d, spec),
                      split_index);
  return run<double>(d, d.features, split, spec, hp, projection_for<double>(d, spec), split_index);
}

TrainReport train(const Dataset& d, const std::vector<Split>& splits, const EncoderSpec& spec,
                  const Hyperparams& hp) {
  if (splits.empty()) throw InvalidInput("train: no splits");
  TrainReport report = spec.single_precision ? train_as<float>(d, splits, spec, hp)
                                             : train_as<double>(d, splits, spec, hp);
  const double n = static_cast<double>(report.splits.size());
  for (const auto& s : report.splits) {
    report.mean_accuracy += s.test_accuracy / n;
    report.mean_val_accuracy += s.best_val_accuracy / n;
  }
  double var = 0.0;
  for (const auto& s : report.splits)
    var += (s.test_accuracy - report.mean_accuracy) * (s.test_accuracy - report.mean_accuracy) / n;
  report.std_accuracy = std::sqrt(var);
  report.config = config_to_json(spec, hp);
  return report;
}

nlohmann::json config_to_json(const EncoderSpec& spec, const Hyperparams& hp) {
  nlohmann::json j;
  j["layers"] = spec.num_layers;
  j["hidden"] = spec.hidden;
  j["placement"] = to_string(spec.placement);
  j["norm"] = std::string(to_string(spec.projection.normalization));
  j["pv_weight"] = spec.projection.pv_weight;
  j["pv_mode"] = std::string(to_string(spec.projection.pv_weight_mode));
  j["hops"] = spec.projection.hops;
  j["lr"] = hp.learning_rate;
  j["weight_decay"] = hp.weight_decay;
  j["dropout"] = hp.dropout;
  j["epochs"] = hp.epochs;
  j["seed"] = hp.seed;
  j["precision"] = spec.single_precision ? "float32" : "float64";
  return j;
}

nlohmann::json TrainReport::to_json() const {
  nlohmann::json j;
  j["config"] = config;
  j["mean_accuracy"] = mean_accuracy;
  j["std_accuracy"] = std_accuracy;
  j["mean_val_accuracy"] = mean_val_accuracy;
  auto& per_split = j["per_split_test_accuracy"] = nlohmann::json::array();
  auto& details = j["splits"] = nlohmann::json::array();
  for (const auto& s : splits) {
    per_split.push_back(s.test_accuracy);
    details.push_back({{"test_accuracy", s.test_accuracy},
                       {"best_val_accuracy", s.best_val_accuracy},
                       {"best_val_epoch", s.best_val_epoch},
                       {"train_accuracy", s.train_accuracy},
                       {"final_train_accuracy", s.final_train_accuracy},
                       {"final_loss", s.loss_history.empty() ? 0.0 : s.loss_history.back()}});
  }
  return j;
}

}  // namespace unig
