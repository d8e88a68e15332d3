#pragma once

#include <cstdint>

#include "ixa/network.hpp"

namespace ixa {

struct AdamState {
  Params m;
  Params v;
  std::int64_t t = 0;
  double lr = 5e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

AdamState make_adam(const NetworkSpec& spec, double lr);

/// One bias-corrected Adam update in place. Throws Error naming the first
/// tensor holding a non-finite gradient; nothing is modified in that case.
void adam_step(Params& params, const Gradients& grads, AdamState& state);

}  // namespace ixa
