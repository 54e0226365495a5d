#include <spdlog/spdlog.h>

#include <algorithm>
#include <ostream>

#include "CLI11.hpp"
#include "lle/error.hpp"
#include "lle/version.hpp"
#include "lle_cli/cli.hpp"

namespace lle::cli {

namespace {

void add_common(CLI::App& app, CommonOptions& common) {
  app.add_option("--seed", common.seed, "Random seed");
  app.add_option("--jobs", common.jobs, "Worker threads for per-image work (1 is bit-deterministic)")
      ->check(CLI::PositiveNumber);
  app.add_option("--out", common.out, "Output directory (enhance, train) or CSV file (eval-*)");
  app.add_option("--manifest", common.manifest, "Where to write the run manifest");
}

void add_train_flags(CLI::App& app, TrainOptions& t, TrainConfig& overrides, std::vector<std::string>& set_fields) {
  app.add_option("--low", t.low_dir, "Directory of low-light images")->required();
  app.add_option("--normal", t.normal_dir, "Directory of normal-light images")->required();
  app.add_option("--preset", t.preset, "Base schedule")->check(CLI::IsMember({"desk", "full"}));
  auto field = [&](const char* flag, auto& target, const char* help) {
    app.add_option(flag, target, help)->each([&set_fields, flag](const std::string&) { set_fields.push_back(flag); });
  };
  field("--epochs", overrides.epochs, "Training epochs");
  field("--max-steps", overrides.max_steps, "Stop after this many steps (0: no cap)");
  field("--batch-size", overrides.batch_size, "Patches per pool per step");
  field("--patch-size", overrides.patch_size, "Crop size in pixels (multiple of 16)");
  field("--width-scale", overrides.width_scale, "Channel width multiplier");
  field("--lr", overrides.lr, "Generator learning rate");
  field("--critic-lr-ratio", overrides.critic_lr_ratio, "Critic learning rate over generator learning rate");
  field("--checkpoint-every", overrides.checkpoint_every, "Checkpoint period in epochs (0: final only)");
  field("--w-per", overrides.weights.w_per, "Perceptual weight");
  field("--w-tv", overrides.weights.w_tv, "Total-variation weight");
  field("--w-adv", overrides.weights.w_adv, "Adversarial weight");
}

TrainConfig resolve_train_config(const std::string& preset, const TrainConfig& o, const std::vector<std::string>& set) {
  TrainConfig cfg = preset == "full" ? TrainConfig::full_scale() : TrainConfig::desk_scale();
  auto has = [&](const char* f) { return std::find(set.begin(), set.end(), f) != set.end(); };
  if (has("--epochs")) cfg.epochs = o.epochs;
  if (has("--max-steps")) cfg.max_steps = o.max_steps;
  if (has("--batch-size")) cfg.batch_size = o.batch_size;
  if (has("--patch-size")) cfg.patch_size = o.patch_size;
  if (has("--width-scale")) cfg.width_scale = o.width_scale;
  if (has("--lr")) cfg.lr = o.lr;
  if (has("--critic-lr-ratio")) cfg.critic_lr_ratio = o.critic_lr_ratio;
  if (has("--checkpoint-every")) cfg.checkpoint_every = o.checkpoint_every;
  if (has("--w-per")) cfg.weights.w_per = o.weights.w_per;
  if (has("--w-tv")) cfg.weights.w_tv = o.weights.w_tv;
  if (has("--w-adv")) cfg.weights.w_adv = o.weights.w_adv;
  return cfg;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Two-stage low-light image enhancement and evaluation", "lle"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(lle::version_string()));

  CommonOptions common;

  EnhanceOptions enhance;
  bool stage1_only = false, full = false;
  auto* enh = app.add_subcommand("enhance", "Enhance one image or a directory of images");
  enh->add_option("input", enhance.input, "Image file or directory")->required();
  auto* s1 = enh->add_flag("--stage1-only", stage1_only, "Tone-map stage only");
  enh->add_flag("--full", full, "Tone map then refinement network (default)")->excludes(s1);
  enh->add_option("--checkpoint", enhance.checkpoint, "Trained model checkpoint");
  add_common(*enh, common);

  TrainOptions train_opts;
  TrainConfig overrides;
  std::vector<std::string> set_fields;
  auto* tr = app.add_subcommand("train", "Train the refinement network on unpaired images");
  add_train_flags(*tr, train_opts, overrides, set_fields);
  add_common(*tr, common);

  EvalMetricsOptions metrics;
  auto* em = app.add_subcommand("eval-metrics", "PSNR/SSIM against references and NIQE against a pristine model");
  em->add_option("enhanced", metrics.enhanced_dir, "Directory of images to score")->required();
  em->add_option("--reference", metrics.reference_dir, "Directory of reference images with matching names");
  em->add_option("--niqe-corpus", metrics.niqe_corpus, "Directory of pristine images for the NIQE model");
  em->add_option("--niqe-model", metrics.niqe_model, "Saved NIQE model")->excludes("--niqe-corpus");
  em->add_option("--niqe-patch", metrics.niqe_patch, "NIQE patch size when fitting");
  em->add_option("--save-niqe-model", metrics.save_niqe_model, "Store the fitted NIQE model here");
  add_common(*em, common);

  EvalMatchingOptions matching;
  std::string enhancer = "none";
  auto* mt = app.add_subcommand("eval-matching", "Feature match rate between low-light and normal-light pairs");
  mt->add_option("--low", matching.low_dir, "Directory of low-light images")->required();
  mt->add_option("--normal", matching.normal_dir, "Directory of normal-light images")->required();
  mt->add_option("--enhancer", enhancer, "Enhancement applied to low-light images")
      ->check(CLI::IsMember({"none", "stage1", "full"}));
  mt->add_option("--checkpoint", matching.checkpoint, "Trained model checkpoint (full)");
  mt->add_option("--max-points", matching.max_points, "Detector budget per image");
  mt->add_option("--ratio", matching.ratio, "Nearest/second-nearest ratio threshold");
  add_common(*mt, common);

  std::vector<std::string> argv{"lle"};
  argv.insert(argv.end(), args.begin(), args.end());
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUser;
  }

  try {
    if (*enh) {
      enhance.mode = stage1_only ? EnhanceMode::Stage1 : EnhanceMode::Full;
      return cmd_enhance(enhance, common, argv);
    }
    if (*tr) {
      train_opts.config = resolve_train_config(train_opts.preset, overrides, set_fields);
      return cmd_train(train_opts, common, argv);
    }
    if (*em) return cmd_eval_metrics(metrics, common, argv, out);
    matching.enhancer = enhancer == "stage1" ? MatchEnhancer::Stage1
                        : enhancer == "full" ? MatchEnhancer::Full
                                             : MatchEnhancer::None;
    return cmd_eval_matching(matching, common, argv, out);
  } catch (const NumericError& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  } catch (const GraphError& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitUser;
}

}  // namespace lle::cli
