#pragma once

// Randomized self-checks of the numerical building blocks and of screening
// safety, shared by the C API and the acceptance tests.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace gowl::verify {

struct Options {
  bool quick = false;
  /// Screen with unscaled dual points; the safety property must then fail.
  bool fault_skip_scaling = false;
  std::uint64_t seed = 20240601;
};

struct PropertyResult {
  std::string name;
  bool passed = true;
  std::uint64_t seed = 0;  // instance seed of the first failure
  std::string detail;
};

/// Runs every property, reporting each through `on_result` as it finishes.
std::vector<PropertyResult> run_all(const Options& options,
                                    const std::function<void(const PropertyResult&)>& on_result);

}  // namespace gowl::verify
