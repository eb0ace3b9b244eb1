#include "unig/projection.hpp"

#include <cmath>

namespace unig {

std::string_view to_string(PvWeightMode mode) {
  return mode == PvWeightMode::constant ? "constant" : "degree";
}

std::string_view to_string(Normalization n) {
  switch (n) {
    case Normalization::none: return "none";
    case Normalization::row_row: return "row-row";
    case Normalization::col_col: return "col-col";
    case Normalization::row_col: return "row-col";
    case Normalization::col_row: return "col-row";
  }
  return "?";
}

PvWeightMode parse_pv_weight_mode(std::string_view s) {
  if (s == "constant") return PvWeightMode::constant;
  if (s == "degree" || s == "degree-scaled") return PvWeightMode::degree_scaled;
  throw InvalidInput("unknown pv weight mode '" + std::string(s) + "' (constant|degree)");
}

Normalization parse_normalization(std::string_view s) {
  for (auto n : {Normalization::none, Normalization::row_row, Normalization::col_col,
                 Normalization::row_col, Normalization::col_row})
    if (to_string(n) == s) return n;
  throw InvalidInput("unknown normalization '" + std::string(s) +
                     "' (none|row-row|col-col|row-col|col-row)");
}

void ProjectionConfig::validate(Index num_nodes) const {
  if (!(pv_weight > 0.0) || !std::isfinite(pv_weight))
    throw InvalidInput("projection: pv_weight must be positive and finite");
  if (hops < 1) throw InvalidInput("projection: hops must be >= 1");
  if (!permutation) return;
  if (static_cast<Index>(permutation->size()) != num_nodes)
    throw InvalidInput("projection: permutation has length " +
                       std::to_string(permutation->size()) + ", expected " +
                       std::to_string(num_nodes));
  std::vector<bool> hit(static_cast<std::size_t>(num_nodes), false);
  for (Index v : *permutation) {
    if (v < 0 || v >= num_nodes || hit[static_cast<std::size_t>(v)])
      throw InvalidInput("projection: permutation is not a bijection on [0, " +
                         std::to_string(num_nodes) + ")");
    hit[static_cast<std::size_t>(v)] = true;
  }
}

}  // namespace unig
