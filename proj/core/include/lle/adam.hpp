#pragma once

#include <cstddef>
#include <vector>

#include "lle/refine_net.hpp"

namespace lle {

/// Adam hyper-parameters and per-parameter moments. Weight decay is classic
/// L2: `weight_decay * p` is added to the raw gradient before the moments.
struct AdamState {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 1e-4;
  std::size_t step = 0;
  std::vector<std::vector<float>> m;
  std::vector<std::vector<float>> v;
};

/// One bias-corrected Adam update of `params` from their accumulated
/// gradients. Throws ArgumentError naming the first parameter without a
/// gradient; `params` must be passed in the same order on every call.
void adam_step(const std::vector<NamedParam>& params, AdamState& state);

}  // namespace lle
