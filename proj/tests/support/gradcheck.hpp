#pragma once

#include <functional>
#include <random>
#include <string>
#include <vector>

#include "lle/tensor.hpp"
#include "reference.hpp"

namespace lle::testing {

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::size_t leaf = 0;
  std::size_t index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  /// Largest |engine - reference| over the forward value(s).
  double forward_error = 0.0;
  std::size_t probes = 0;
  /// Probes skipped because x - h and x + h fall on different pieces of a
  /// piecewise-smooth function (a relu sign or pool argmax changed).
  std::size_t skipped_kinks = 0;
  std::string describe() const;
};

using Leaves = std::vector<ag::Tensor>;

/// Compares the engine's backward pass of `loss` against central differences
/// of `reference`, a double-precision re-implementation of the same scalar
/// function. Every element of every leaf is probed with step h; the error is
/// |a - n| / max(|a|, |n|, 1e-6).
/// When `pattern` is given it reports the reference's activation pattern at
/// the current leaf values; probes whose endpoints change it are skipped.
GradCheckResult grad_check(const Leaves& leaves, const std::function<ag::Tensor()>& loss,
                           const std::function<double()>& reference, double h = 1e-3,
                           const std::function<Pattern()>& pattern = {});

/// Same check for a tensor-valued op through the probe sum(r * op(leaves))
/// with fixed random weights r.
GradCheckResult grad_check_op(const Leaves& leaves, const std::function<ag::Tensor(const Leaves&)>& op,
                              const std::function<RefTensor(const Leaves&)>& reference, std::uint64_t seed,
                              double h = 1e-3);

/// Leaf tensor with samples uniform in [lo, hi].
ag::Tensor random_tensor(const ag::Shape& shape, std::mt19937_64& rng, float lo = -1.0f, float hi = 1.0f,
                         bool requires_grad = true);

}  // namespace lle::testing
