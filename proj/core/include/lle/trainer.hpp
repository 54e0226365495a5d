#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <vector>

#include "lle/adam.hpp"
#include "lle/dataset.hpp"
#include "lle/losses.hpp"
#include "lle/refine_net.hpp"
#include "lle/tone_map.hpp"

namespace lle {

struct TrainConfig {
  std::size_t patch_size = 128;
  std::size_t batch_size = 64;
  std::size_t epochs = 1000;
  /// Stops early once this many steps ran; 0 means no cap.
  std::size_t max_steps = 0;
  std::uint64_t seed = 0;
  double width_scale = 1.0;
  LossWeights weights;
  double lr = 1e-4;
  /// Critic learning rate as a multiple of `lr`.
  double critic_lr_ratio = 1.0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double weight_decay = 1e-4;
  ToneMapConfig tone_map;
  /// Writes checkpoint_epoch<N>.lle every this many epochs; 0 disables.
  std::size_t checkpoint_every = 0;
  /// Checkpoints and loss.csv go here when set.
  std::optional<std::filesystem::path> output_dir;

  /// Full-size reference schedule: 128px patches, batch 64, 1000 epochs.
  static TrainConfig full_scale();
  /// CPU-sized schedule: 32px patches, width 1/8, a few epochs.
  static TrainConfig desk_scale();

  void validate() const;
};

struct StepRecord {
  std::size_t step = 0;
  std::size_t epoch = 0;
  LossBreakdown losses;
};

struct TrainResult {
  ModelPair models;
  std::vector<StepRecord> log;
};

/// CSV header of the loss log.
inline constexpr const char* kLossLogHeader = "step,epoch,l_rec,l_per,l_tv,l_adv_g,l_adv_d,total";

/// Alternating critic/generator training on unpaired pools. Low-light patches
/// pass through the tone-map stage before the generator sees them.
class Trainer {
 public:
  Trainer(UnpairedDataset dataset, TrainConfig cfg);

  const TrainConfig& config() const { return cfg_; }
  ModelPair& models() { return models_; }
  const ModelPair& models() const { return models_; }

  /// Samples patches and pre-enhances the low-light side.
  struct Batch {
    ag::Tensor pre;     // tone-mapped low-light patches
    ag::Tensor normal;  // normal-light patches
  };
  Batch next_batch();

  /// Updates only the critic. Returns its loss.
  double discriminator_step(const Batch& batch);
  /// Updates only the generator. l_adv_d is left at zero.
  LossBreakdown generator_step(const Batch& batch);
  /// One critic step then one generator step on a fresh batch.
  StepRecord step();

  std::size_t steps_per_epoch() const;

  /// Runs the whole schedule, writing the CSV log and checkpoints when an
  /// output directory is configured. A final checkpoint is always written
  /// there, including after zero epochs.
  TrainResult run();

 private:
  void check_parameters_finite() const;

  UnpairedDataset dataset_;
  TrainConfig cfg_;
  ModelPair models_;
  FeatureExtractor phi_;
  AdamState gen_opt_;
  AdamState disc_opt_;
  std::mt19937_64 rng_;
  std::size_t steps_done_ = 0;
};

/// Convenience wrapper: Trainer(dataset, cfg).run().
TrainResult train(UnpairedDataset dataset, const TrainConfig& cfg);

}  // namespace lle
