#include "growthbound/elimination.hpp"

namespace growthbound {

std::string_view to_string(PivotStrategy s) {
  switch (s) {
    case PivotStrategy::Complete: return "complete";
    case PivotStrategy::Partial: return "partial";
    case PivotStrategy::None: return "none";
  }
  return "unknown";
}

PivotStrategy parse_pivot_strategy(std::string_view token) {
  if (token == "complete") return PivotStrategy::Complete;
  if (token == "partial") return PivotStrategy::Partial;
  if (token == "none") return PivotStrategy::None;
  throw std::invalid_argument("unknown pivot strategy: " + std::string(token));
}

}  // namespace growthbound
