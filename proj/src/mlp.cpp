#include "unig/mlp.hpp"

#include <charconv>

namespace unig {

void MlpConfig::validate() const {
  if (layer_dims.size() < 2) throw InvalidInput("mlp: need at least one layer");
  for (Index d : layer_dims)
    if (d < 1) throw InvalidInput("mlp: layer dimensions must be >= 1");
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0))
    throw InvalidInput("mlp: dropout rate must lie in [0, 1)");
}

namespace {

int parse_stage(std::string_view s) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw InvalidInput("placement: bad stage '" + std::string(s) + "'");
  return v;
}

}  // namespace

std::optional<Placement> parse_placement(std::string_view s, int num_layers) {
  if (s == "none") return std::nullopt;
  if (s == "full") return Placement{0, num_layers};
  const auto comma = s.find(',');
  if (comma == std::string_view::npos)
    throw InvalidInput("placement: expected 'none', 'full' or 'f,r', got '" + std::string(s) + "'");
  Placement p{parse_stage(s.substr(0, comma)), parse_stage(s.substr(comma + 1))};
  if (p.forward_stage < 0 || p.forward_stage > p.reverse_stage || p.reverse_stage > num_layers)
    throw InvalidInput("placement " + std::string(s) + " needs 0 <= f <= r <= " +
                       std::to_string(num_layers));
  return p;
}

std::string to_string(const std::optional<Placement>& p) {
  if (!p) return "none";
  return std::to_string(p->forward_stage) + "," + std::to_string(p->reverse_stage);
}

}  // namespace unig
