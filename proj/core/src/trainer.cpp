#include "lle/trainer.hpp"

#include <spdlog/spdlog.h>

#include <cmath>
#include <fstream>
#include <iomanip>

#include "lle/checkpoint.hpp"
#include "lle/error.hpp"

namespace lle {

namespace {

AdamState make_optimizer(const TrainConfig& cfg, double lr) {
  AdamState s;
  s.lr = lr;
  s.beta1 = cfg.beta1;
  s.beta2 = cfg.beta2;
  s.weight_decay = cfg.weight_decay;
  return s;
}

void require_finite(double value, const char* term, std::size_t step) {
  if (!std::isfinite(value)) {
    throw NumericError(std::string("non-finite ") + term + " at step " + std::to_string(step));
  }
}

void write_log_row(std::ostream& out, const StepRecord& r) {
  const auto& l = r.losses;
  out << r.step << ',' << r.epoch << ',' << std::setprecision(6) << l.l_rec << ',' << l.l_per << ',' << l.l_tv << ','
      << l.l_adv_g << ',' << l.l_adv_d << ',' << l.total << '\n';
}

TrainConfig validated(TrainConfig cfg) {
  cfg.validate();
  return cfg;
}

}  // namespace

TrainConfig TrainConfig::full_scale() { return TrainConfig{}; }

TrainConfig TrainConfig::desk_scale() {
  TrainConfig cfg;
  cfg.patch_size = 32;
  cfg.batch_size = 16;
  cfg.epochs = 5;
  cfg.width_scale = 0.125;
  cfg.lr = 5e-3;
  cfg.critic_lr_ratio = 0.03;
  return cfg;
}

void TrainConfig::validate() const {
  if (patch_size == 0 || patch_size % 16 != 0) throw ArgumentError("patch_size must be a positive multiple of 16");
  if (batch_size == 0) throw ArgumentError("batch_size must be at least 1");
  if (!(width_scale > 0.0)) throw ArgumentError("width_scale must be positive");
  if (!(lr > 0.0)) throw ArgumentError("learning rate must be positive");
  if (!(critic_lr_ratio > 0.0)) throw ArgumentError("critic_lr_ratio must be positive");
  weights.validate();
  tone_map.validate();
}

Trainer::Trainer(UnpairedDataset dataset, TrainConfig cfg)
    : dataset_(std::move(dataset)),
      cfg_(validated(std::move(cfg))),
      models_(cfg_.width_scale, cfg_.seed),
      gen_opt_(make_optimizer(cfg_, cfg_.lr)),
      disc_opt_(make_optimizer(cfg_, cfg_.lr * cfg_.critic_lr_ratio)),
      rng_(cfg_.seed ^ 0x9e3779b97f4a7c15ULL) {
  dataset_.check_patch_size(cfg_.patch_size);
  if (cfg_.patch_size < models_.discriminator.min_input_extent()) {
    throw ArgumentError("patch_size " + std::to_string(cfg_.patch_size) + " is below the critic's minimum extent " +
                        std::to_string(models_.discriminator.min_input_extent()));
  }
}

std::size_t Trainer::steps_per_epoch() const {
  return (dataset_.low().size() + cfg_.batch_size - 1) / cfg_.batch_size;
}

Trainer::Batch Trainer::next_batch() {
  PatchBatch raw = sample_batch(dataset_, cfg_.patch_size, cfg_.batch_size, rng_);
  for (auto& img : raw.low) img = pre_enhance(img, cfg_.tone_map);
  return {to_tensor(raw.low), to_tensor(raw.normal)};
}

double Trainer::discriminator_step(const Batch& batch) {
  const ag::Tensor fake = models_.generator.forward(batch.pre).detach();
  const ag::Tensor d_fake = models_.discriminator.score(fake);
  const ag::Tensor d_real = models_.discriminator.score(batch.normal);
  const ag::Tensor loss = loss_adversarial(d_fake, d_real).discriminator;
  require_finite(loss.item(), "l_adv_d", steps_done_);
  loss.backward();
  adam_step(models_.discriminator.parameters(), disc_opt_);
  return loss.item();
}

LossBreakdown Trainer::generator_step(const Batch& batch) {
  const ag::Tensor refined = models_.generator.forward(batch.pre);
  const ag::Tensor rec = loss_rec(refined, batch.pre);
  const ag::Tensor per = loss_perceptual(refined, batch.pre, phi_);
  const ag::Tensor tv = loss_tv(refined);
  const ag::Tensor d_fake = models_.discriminator.score(refined);
  const ag::Tensor d_real = models_.discriminator.score(batch.normal).detach();
  const ag::Tensor adv = loss_adversarial(d_fake, d_real).generator;

  LossBreakdown parts;
  parts.l_rec = rec.item();
  parts.l_per = per.item();
  parts.l_tv = tv.item();
  parts.l_adv_g = adv.item();
  require_finite(parts.l_rec, "l_rec", steps_done_);
  require_finite(parts.l_per, "l_per", steps_done_);
  require_finite(parts.l_tv, "l_tv", steps_done_);
  require_finite(parts.l_adv_g, "l_adv_g", steps_done_);
  parts.total = total_loss(parts, cfg_.weights);

  const auto& w = cfg_.weights;
  ag::Tensor total = ag::add(rec, ag::scale(per, static_cast<float>(w.w_per)));
  total = ag::add(total, ag::scale(tv, static_cast<float>(w.w_tv)));
  total = ag::add(total, ag::scale(adv, static_cast<float>(w.w_adv)));
  total.backward();
  adam_step(models_.generator.parameters(), gen_opt_);
  return parts;
}

void Trainer::check_parameters_finite() const {
  for (const auto& params : {models_.generator.parameters(), models_.discriminator.parameters()}) {
    for (const auto& p : params) {
      for (float v : p.tensor.data()) {
        if (!std::isfinite(v)) throw NumericError("non-finite value in parameter '" + p.name + "'");
      }
    }
  }
}

StepRecord Trainer::step() {
  check_parameters_finite();
  const Batch batch = next_batch();
  StepRecord rec;
  rec.step = steps_done_;
  rec.epoch = steps_done_ / std::max<std::size_t>(1, steps_per_epoch());
  const double d_loss = discriminator_step(batch);
  rec.losses = generator_step(batch);
  rec.losses.l_adv_d = d_loss;
  ++steps_done_;
  return rec;
}

TrainResult Trainer::run() {
  std::ofstream log;
  if (cfg_.output_dir) {
    std::filesystem::create_directories(*cfg_.output_dir);
    log.open(*cfg_.output_dir / "loss.csv", std::ios::trunc);
    if (!log) throw IoError("cannot write loss log in '" + cfg_.output_dir->string() + "'");
    log << kLossLogHeader << '\n';
  }
  std::vector<StepRecord> records;
  const std::size_t per_epoch = steps_per_epoch();
  bool capped = false;
  for (std::size_t epoch = 0; epoch < cfg_.epochs && !capped; ++epoch) {
    for (std::size_t i = 0; i < per_epoch; ++i) {
      if (cfg_.max_steps != 0 && steps_done_ >= cfg_.max_steps) {
        capped = true;
        break;
      }
      StepRecord r = step();
      r.epoch = epoch;
      if (log.is_open()) write_log_row(log, r);
      records.push_back(r);
    }
    spdlog::debug("epoch {} done, last total {:.6g}", epoch, records.empty() ? 0.0 : records.back().losses.total);
    if (cfg_.output_dir && cfg_.checkpoint_every != 0 && (epoch + 1) % cfg_.checkpoint_every == 0) {
      save_checkpoint(models_, *cfg_.output_dir / ("checkpoint_epoch" + std::to_string(epoch + 1) + ".lle"));
    }
  }
  if (cfg_.output_dir) save_checkpoint(models_, *cfg_.output_dir / "checkpoint_final.lle");
  return {models_, std::move(records)};
}

TrainResult train(UnpairedDataset dataset, const TrainConfig& cfg) { return Trainer(std::move(dataset), cfg).run(); }

}  // namespace lle
