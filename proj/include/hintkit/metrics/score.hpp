#pragma once

#include <optional>

#include "hintkit/model.hpp"

namespace hintkit {

/// A metric value plus optional structured detail (flags, raw values).
struct Score {
  double value = 0.0;
  std::optional<Json> detail;
};

inline double clamp_unit(double x) { return x < 0.0 ? 0.0 : (x > 1.0 ? 1.0 : x); }

}  // namespace hintkit
