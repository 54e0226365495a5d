#pragma once

#include <cstdint>
#include <vector>

#include "lle/ops.hpp"

namespace lle {

/// Coefficients of the generator objective
///   total = l_rec + w_per * l_per + w_tv * l_tv + w_adv * l_adv_g.
/// Defaults: perceptual 1, TV 0.1, adversarial 1.
struct LossWeights {
  double w_per = 1.0;
  double w_tv = 0.1;
  double w_adv = 1.0;

  void validate() const;
};

struct LossBreakdown {
  double l_rec = 0.0;
  double l_per = 0.0;
  double l_tv = 0.0;
  double l_adv_g = 0.0;
  double l_adv_d = 0.0;
  double total = 0.0;
};

/// Weighted generator objective from its parts (l_adv_d is not included).
double total_loss(const LossBreakdown& parts, const LossWeights& w);

/// Frozen feature stack used by the perceptual term:
///   conv 3->8, relu, pool, conv 8->16, relu, pool, conv 16->16, relu, conv 16->16.
/// Weights are drawn once from `seed` and never updated.
class FeatureExtractor {
 public:
  explicit FeatureExtractor(std::uint64_t seed = 0x5eedf00dULL);

  /// Input extents must be divisible by 4.
  ag::Tensor features(const ag::Tensor& img) const;
  std::vector<ag::Tensor> weights() const;

 private:
  std::vector<ag::ConvParams> layers_;
};

/// mean |Y - Y'|
ag::Tensor loss_rec(const ag::Tensor& refined, const ag::Tensor& pre);
/// mean (phi(Y) - phi(Y'))^2
ag::Tensor loss_perceptual(const ag::Tensor& refined, const ag::Tensor& pre, const FeatureExtractor& phi);
/// Anisotropic TV: mean |horizontal forward difference| + mean |vertical forward difference|.
/// An axis of extent 1 contributes nothing; a 1x1 image is rejected.
ag::Tensor loss_tv(const ag::Tensor& refined);

struct AdversarialLoss {
  ag::Tensor generator;      // ((d_fake - d_real) - 1)^2 + (d_real - d_fake)^2, real side detached
  ag::Tensor discriminator;  // ((d_real - d_fake) - 1)^2 + (d_fake - d_real)^2
};

/// Relativistic least-squares objectives from scalar critic values. The
/// generator objective sees the real score as a constant. For the critic
/// update, `d_fake` must come from detached generator output so that no
/// gradient reaches the generator.
AdversarialLoss loss_adversarial(const ag::Tensor& d_fake, const ag::Tensor& d_real);

/// Plain-number form of the two objectives.
struct AdversarialValues {
  double generator;
  double discriminator;
};
AdversarialValues adversarial_values(double d_fake, double d_real);

}  // namespace lle
