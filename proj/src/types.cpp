#include <gowl/types.hpp>

#include <cmath>

namespace gowl {

const char* to_string(LossKind kind) {
  switch (kind) {
    case LossKind::squared:
      return "regression";
    case LossKind::multinomial:
      return "multinomial";
  }
  return "unknown";
}

WeightVector::WeightVector(Vector values) : values_(std::move(values)) {
  for (Index i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i]) || values_[i] < 0.0) {
      throw Error("weights must be finite and nonnegative");
    }
    if (i + 1 < values_.size() && values_[i] < values_[i + 1]) {
      throw Error("weights must be non-increasing");
    }
  }
}

WeightVector WeightVector::head(Index k) const {
  if (k < 0 || k > size()) throw Error("weight truncation out of range");
  WeightVector out;
  out.values_ = values_.head(k);
  return out;
}

}  // namespace gowl
