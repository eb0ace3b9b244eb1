#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "unig/error.hpp"
#include "unig/projection.hpp"

namespace unig {

template <typename Scalar>
using RowVector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

struct MlpConfig {
  /// [C0, C1, ..., Cl]; l = layer_dims.size() - 1 linear layers.
  std::vector<Index> layer_dims;
  double dropout_rate = 0.0;
  std::uint64_t seed = 0;

  int num_layers() const { return static_cast<int>(layer_dims.size()) - 1; }
  void validate() const;
};

/// Embedding stages at which the forward and the reverse projection act.
/// Stage 0 is the input, stage k the output of layer k.
struct Placement {
  int forward_stage = 0;
  int reverse_stage = 0;

  bool is_compound() const { return forward_stage == reverse_stage; }
  friend bool operator==(const Placement&, const Placement&) = default;
};

/// "none", "f,r", or "full" (0,layers).
std::optional<Placement> parse_placement(std::string_view s, int num_layers);
std::string to_string(const std::optional<Placement>& p);

template <typename Scalar>
struct DenseLayer {
  Matrix<Scalar> weight;  // fan_in x fan_out
  RowVector<Scalar> bias;
};

/// Weights and biases of every layer. Gradients use the same shape.
template <typename Scalar>
struct MlpParameters {
  std::vector<DenseLayer<Scalar>> layers;

  MlpParameters zeros_like() const {
    MlpParameters z;
    for (const auto& l : layers)
      z.layers.push_back({Matrix<Scalar>::Zero(l.weight.rows(), l.weight.cols()),
                          RowVector<Scalar>::Zero(l.bias.size())});
    return z;
  }
};

/// Glorot-uniform weights, zero biases.
template <typename Scalar>
MlpParameters<Scalar> init_parameters(const MlpConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  MlpParameters<Scalar> p;
  for (int k = 0; k < cfg.num_layers(); ++k) {
    const Index fan_in = cfg.layer_dims[static_cast<std::size_t>(k)];
    const Index fan_out = cfg.layer_dims[static_cast<std::size_t>(k) + 1];
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    DenseLayer<Scalar> layer{Matrix<Scalar>(fan_in, fan_out), RowVector<Scalar>::Zero(fan_out)};
    for (Index i = 0; i < fan_in; ++i)
      for (Index j = 0; j < fan_out; ++j) layer.weight(i, j) = static_cast<Scalar>(dist(rng));
    p.layers.push_back(std::move(layer));
  }
  return p;
}

enum class Mode { train, eval };

/// Activations recorded by a train-mode forward pass.
template <typename Scalar>
struct ForwardCache {
  std::vector<Matrix<Scalar>> layer_inputs;
  std::vector<Matrix<Scalar>> pre_activations;
  /// Inverted-dropout multipliers per hidden layer; empty when dropout is off.
  std::vector<Matrix<Scalar>> dropout_masks;
  std::uint64_t parameter_version = 0;
  bool valid = false;
};

/// An MLP wrapped by an optional forward/reverse projection pair.
template <typename Scalar>
class EncoderPipeline {
 public:
  EncoderPipeline(MlpConfig cfg, std::optional<ProjectionMatrix<Scalar>> projection,
                  std::optional<Placement> placement)
      : cfg_(std::move(cfg)), projection_(std::move(projection)), placement_(placement) {
    cfg_.validate();
    if (placement_) {
      if (!projection_) throw InvalidInput("pipeline: placement given without a projection");
      const int l = cfg_.num_layers();
      if (placement_->forward_stage < 0 || placement_->forward_stage > placement_->reverse_stage ||
          placement_->reverse_stage > l)
        throw InvalidInput("pipeline: placement " + to_string(placement_) +
                           " needs 0 <= f <= r <= " + std::to_string(l));
      if (projection_->hops > 1 && !placement_->is_compound())
        throw InvalidInput("pipeline: hops > 1 requires a compound placement (f == r)");
    }
    params_ = init_parameters<Scalar>(cfg_);
  }

  const MlpConfig& config() const { return cfg_; }
  const std::optional<Placement>& placement() const { return placement_; }
  const std::optional<ProjectionMatrix<Scalar>>& projection() const { return projection_; }
  const MlpParameters<Scalar>& parameters() const { return params_; }
  std::uint64_t parameter_version() const { return version_; }

  /// Mutable access invalidates any outstanding forward cache.
  MlpParameters<Scalar>& mutable_parameters() {
    ++version_;
    return params_;
  }

  /// Applies the projections scheduled at `stage`.
  void project_at(Matrix<Scalar>& h, int stage) const {
    if (!placement_) return;
    const auto& pm = *projection_;
    if (placement_->is_compound()) {
      if (stage != placement_->forward_stage) return;
      for (int k = 0; k < pm.hops; ++k) {
        Matrix<Scalar> t = pm.forward * h;
        h = pm.reverse * t;
      }
      return;
    }
    if (stage == placement_->forward_stage) h = Matrix<Scalar>(pm.forward * h);
    if (stage == placement_->reverse_stage) h = Matrix<Scalar>(pm.reverse * h);
  }

  /// Transpose of project_at, for backpropagation.
  void project_back_at(Matrix<Scalar>& g, int stage) const {
    if (!placement_) return;
    const auto& pm = *projection_;
    if (placement_->is_compound()) {
      if (stage != placement_->forward_stage) return;
      for (int k = 0; k < pm.hops; ++k) {
        Matrix<Scalar> t = pm.reverse.transpose() * g;
        g = pm.forward.transpose() * t;
      }
      return;
    }
    if (stage == placement_->reverse_stage) g = Matrix<Scalar>(pm.reverse.transpose() * g);
    if (stage == placement_->forward_stage) g = Matrix<Scalar>(pm.forward.transpose() * g);
  }

 private:
  MlpConfig cfg_;
  std::optional<ProjectionMatrix<Scalar>> projection_;
  std::optional<Placement> placement_;
  MlpParameters<Scalar> params_;
  std::uint64_t version_ = 0;
};

/// Runs the pipeline on node features `x` (|V| x C0) and returns |V| x Cl
/// logits. In train mode, dropout is drawn from `rng` and, if `cache` is
/// given, the activations needed by backward() are recorded.
template <typename Scalar, typename Derived>
Matrix<Scalar> mlp_forward(const EncoderPipeline<Scalar>& pipe, const Eigen::MatrixBase<Derived>& x,
                           Mode mode, std::mt19937_64& rng, ForwardCache<Scalar>* cache = nullptr) {
  const auto& cfg = pipe.config();
  const auto& params = pipe.parameters();
  const int l = cfg.num_layers();
  if (x.cols() != cfg.layer_dims.front())
    throw DimensionMismatch("mlp_forward: input has " + std::to_string(x.cols()) +
                            " columns, expected " + std::to_string(cfg.layer_dims.front()));
  const Index n = x.rows();
  if (pipe.projection() && pipe.projection()->num_nodes != n)
    throw DimensionMismatch("mlp_forward: input has " + std::to_string(n) +
                            " rows, projection expects " + std::to_string(pipe.projection()->num_nodes));

  const bool dropout = mode == Mode::train && cfg.dropout_rate > 0.0;
  const Scalar keep_scale = static_cast<Scalar>(1.0 / (1.0 - cfg.dropout_rate));
  std::bernoulli_distribution keep(1.0 - cfg.dropout_rate);

  if (cache) {
    *cache = ForwardCache<Scalar>{};
    cache->parameter_version = pipe.parameter_version();
  }

  Matrix<Scalar> h = x;
  pipe.project_at(h, 0);
  for (int k = 0; k < l; ++k) {
    const auto& layer = params.layers[static_cast<std::size_t>(k)];
    Matrix<Scalar> z = h * layer.weight;
    z.rowwise() += layer.bias;
    if (cache) cache->layer_inputs.push_back(std::move(h));
    if (k + 1 < l) {
      if (cache) cache->pre_activations.push_back(z);
      h = z.cwiseMax(Scalar(0));
      if (dropout) {
        Matrix<Scalar> mask(h.rows(), h.cols());
        for (Index i = 0; i < mask.size(); ++i)
          mask.data()[i] = keep(rng) ? keep_scale : Scalar(0);
        h.array() *= mask.array();
        if (cache) cache->dropout_masks.push_back(std::move(mask));
      }
    } else {
      if (cache) cache->pre_activations.push_back(z);
      h = std::move(z);
    }
    pipe.project_at(h, k + 1);
  }
  if (h.rows() != n) throw DimensionMismatch("mlp_forward: output rows differ from node count");
  if (cache) cache->valid = mode == Mode::train;
  return h;
}

template <typename Scalar>
struct LossResult {
  Scalar loss;
  Matrix<Scalar> dlogits;
};

/// Mean softmax cross-entropy over the rows in `mask`, with its gradient.
template <typename Scalar>
LossResult<Scalar> cross_entropy_masked(const Matrix<Scalar>& logits, std::span<const int> labels,
                                        std::span<const Index> mask) {
  if (mask.empty()) throw InvalidInput("cross_entropy: empty mask");
  if (static_cast<Index>(labels.size()) != logits.rows())
    throw DimensionMismatch("cross_entropy: label count differs from logit rows");

  LossResult<Scalar> out{Scalar(0), Matrix<Scalar>::Zero(logits.rows(), logits.cols())};
  const Scalar inv = Scalar(1) / static_cast<Scalar>(mask.size());
  for (Index i : mask) {
    if (i < 0 || i >= logits.rows()) throw DimensionMismatch("cross_entropy: mask index out of range");
    const int y = labels[static_cast<std::size_t>(i)];
    if (y < 0 || y >= logits.cols()) throw DimensionMismatch("cross_entropy: label exceeds logit width");
    const auto row = logits.row(i);
    const Scalar top = row.maxCoeff();
    const auto shifted = (row.array() - top).matrix();
    const Scalar log_norm = std::log(shifted.array().exp().sum());
    out.loss += (log_norm - shifted(y)) * inv;
    out.dlogits.row(i) = (shifted.array() - log_norm).exp().matrix() * inv;
    out.dlogits(i, y) -= inv;
  }
  return out;
}

/// Exact gradients of the loss behind `dlogits` w.r.t. every weight and bias.
template <typename Scalar>
MlpParameters<Scalar> backward(const EncoderPipeline<Scalar>& pipe, const ForwardCache<Scalar>& cache,
                               const Matrix<Scalar>& dlogits) {
  if (!cache.valid || cache.parameter_version != pipe.parameter_version())
    throw InvalidInput("backward: stale or missing forward cache");
  const auto& params = pipe.parameters();
  const int l = pipe.config().num_layers();
  MlpParameters<Scalar> grads = params.zeros_like();

  Matrix<Scalar> g = dlogits;
  for (int k = l - 1; k >= 0; --k) {
    const auto ks = static_cast<std::size_t>(k);
    pipe.project_back_at(g, k + 1);
    if (k + 1 < l) {
      if (!cache.dropout_masks.empty()) g.array() *= cache.dropout_masks[ks].array();
      g.array() *= (cache.pre_activations[ks].array() > Scalar(0)).template cast<Scalar>();
    }
    grads.layers[ks].weight.noalias() = cache.layer_inputs[ks].transpose() * g;
    grads.layers[ks].bias = g.colwise().sum();
    if (k > 0) g = g * params.layers[ks].weight.transpose();
  }
  return grads;
}

/// Adam with bias correction and coupled L2 weight decay.
template <typename Scalar>
struct AdamState {
  double learning_rate = 0.01;
  double weight_decay = 0.0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::int64_t step = 0;
  MlpParameters<Scalar> first_moment;
  MlpParameters<Scalar> second_moment;

  AdamState() = default;
  AdamState(const MlpParameters<Scalar>& like, double lr, double decay)
      : learning_rate(lr),
        weight_decay(decay),
        first_moment(like.zeros_like()),
        second_moment(like.zeros_like()) {}
};

namespace detail {

template <typename Scalar, typename P, typename G, typename M, typename V>
void adam_update(P&& param, const G& grad, M& m, V& v, Scalar lr_t, Scalar b1, Scalar b2,
                 Scalar eps, Scalar decay, Scalar bias2) {
  auto p = param.array();
  const auto g = (grad.array() + decay * p).eval();
  m.array() = b1 * m.array() + (Scalar(1) - b1) * g;
  v.array() = b2 * v.array() + (Scalar(1) - b2) * g.square();
  p -= lr_t * m.array() / ((v.array() / bias2).sqrt() + eps);
}

}  // namespace detail

template <typename Scalar>
void adam_step(AdamState<Scalar>& state, MlpParameters<Scalar>& params,
               const MlpParameters<Scalar>& grads) {
  if (state.first_moment.layers.empty()) {
    state.first_moment = params.zeros_like();
    state.second_moment = params.zeros_like();
  }
  if (grads.layers.size() != params.layers.size())
    throw DimensionMismatch("adam_step: gradient layer count differs");
  ++state.step;
  const double t = static_cast<double>(state.step);
  const auto lr_t = static_cast<Scalar>(state.learning_rate / (1.0 - std::pow(state.beta1, t)));
  const auto bias2 = static_cast<Scalar>(1.0 - std::pow(state.beta2, t));
  const auto b1 = static_cast<Scalar>(state.beta1);
  const auto b2 = static_cast<Scalar>(state.beta2);
  const auto eps = static_cast<Scalar>(state.epsilon);
  const auto decay = static_cast<Scalar>(state.weight_decay);
  for (std::size_t k = 0; k < params.layers.size(); ++k) {
    auto& p = params.layers[k];
    const auto& g = grads.layers[k];
    detail::adam_update(p.weight, g.weight, state.first_moment.layers[k].weight,
                        state.second_moment.layers[k].weight, lr_t, b1, b2, eps, decay, bias2);
    detail::adam_update(p.bias, g.bias, state.first_moment.layers[k].bias,
                        state.second_moment.layers[k].bias, lr_t, b1, b2, eps, decay, bias2);
  }
}

/// Index of the largest logit per row (first on ties).
template <typename Scalar>
std::vector<int> predict(const Matrix<Scalar>& logits) {
  std::vector<int> out(static_cast<std::size_t>(logits.rows()));
  for (Index i = 0; i < logits.rows(); ++i) {
    Index best = 0;
    logits.row(i).maxCoeff(&best);
    out[static_cast<std::size_t>(i)] = static_cast<int>(best);
  }
  return out;
}

}  // namespace unig
