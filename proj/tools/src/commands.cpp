#include <spdlog/spdlog.h>

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include "lle/checkpoint.hpp"
#include "lle/dataset.hpp"
#include "lle/error.hpp"
#include "lle/matching.hpp"
#include "lle/metrics.hpp"
#include "lle/niqe.hpp"
#include "lle/refine_net.hpp"
#include "lle/tone_map.hpp"
#include "lle_cli/cli.hpp"
#include "manifest.hpp"
#include "parallel.hpp"

namespace lle::cli {

namespace fs = std::filesystem;

namespace {

std::vector<fs::path> images_in(const fs::path& dir, const char* role) {
  if (!fs::is_directory(dir)) throw ArgumentError(std::string(role) + " directory '" + dir.string() + "' does not exist");
  auto files = list_images(dir);
  if (files.empty()) throw ArgumentError(std::string(role) + " directory '" + dir.string() + "' holds no images");
  return files;
}

/// File names present in both directories; throws listing every orphan.
std::vector<std::string> paired_names(const fs::path& a_dir, const char* a_role, const fs::path& b_dir,
                                      const char* b_role) {
  std::set<std::string> a, b;
  for (const auto& p : images_in(a_dir, a_role)) a.insert(p.filename().string());
  for (const auto& p : images_in(b_dir, b_role)) b.insert(p.filename().string());
  std::vector<std::string> orphans;
  for (const auto& n : a) {
    if (!b.contains(n)) orphans.push_back((a_dir / n).string());
  }
  for (const auto& n : b) {
    if (!a.contains(n)) orphans.push_back((b_dir / n).string());
  }
  if (!orphans.empty()) {
    std::string msg = "unpaired files (names must match across directories):";
    for (const auto& o : orphans) msg += "\n  " + o;
    throw ArgumentError(msg);
  }
  return {a.begin(), a.end()};
}

/// Edge-replicates to the next multiple of 16 in both extents.
RgbImage pad_to_16(const RgbImage& img) {
  const std::size_t w = (img.width() + 15) / 16 * 16, h = (img.height() + 15) / 16 * 16;
  if (w == img.width() && h == img.height()) return img;
  RgbImage out(w, h);
  for (std::size_t c = 0; c < 3; ++c) {
    for (std::size_t y = 0; y < h; ++y) {
      for (std::size_t x = 0; x < w; ++x) {
        out.at(c, x, y) = img.at(c, std::min(x, img.width() - 1), std::min(y, img.height() - 1));
      }
    }
  }
  return out;
}

RgbImage crop_to(const RgbImage& img, std::size_t w, std::size_t h) {
  if (img.width() == w && img.height() == h) return img;
  RgbImage out(w, h);
  for (std::size_t c = 0; c < 3; ++c) {
    for (std::size_t y = 0; y < h; ++y) {
      for (std::size_t x = 0; x < w; ++x) out.at(c, x, y) = img.at(c, x, y);
    }
  }
  return out;
}

ImageTransform full_pipeline(const fs::path& checkpoint) {
  auto models = std::make_shared<ModelPair>(load_checkpoint(checkpoint));
  return [models](const RgbImage& img) {
    const RgbImage pre = pre_enhance(img);
    const RgbImage refined = to_image(models->generator.forward(to_tensor(pad_to_16(pre))));
    return crop_to(refined, img.width(), img.height());
  };
}

std::ostream& csv_target(const CommonOptions& common, std::ostream& fallback, std::ofstream& file) {
  if (!common.out) return fallback;
  if (common.out->has_parent_path()) fs::create_directories(common.out->parent_path());
  file.open(*common.out, std::ios::trunc);
  if (!file) throw IoError("cannot write '" + common.out->string() + "'");
  return file;
}

fs::path eval_manifest_path(const CommonOptions& common) {
  return manifest_path(common, common.out ? fs::path(common.out->string() + ".manifest.json") : fs::path());
}

std::string optional_number(const std::optional<double>& v) { return v ? format_number(*v) : ""; }

const char* enhancer_name(MatchEnhancer e) {
  switch (e) {
    case MatchEnhancer::None:
      return "none";
    case MatchEnhancer::Stage1:
      return "stage1";
    case MatchEnhancer::Full:
      return "full";
  }
  return "";
}

}  // namespace

std::string format_number(double v) {
  std::ostringstream s;
  s << std::setprecision(6) << v;
  return s.str();
}

int cmd_enhance(const EnhanceOptions& opts, const CommonOptions& common, const std::vector<std::string>& argv) {
  if (opts.mode == EnhanceMode::Full && !opts.checkpoint) {
    throw ArgumentError("checkpoint required for full enhancement (pass --checkpoint or use --stage1-only)");
  }
  if (!common.out) throw ArgumentError("--out directory required");
  std::vector<fs::path> inputs;
  if (fs::is_directory(opts.input)) {
    inputs = images_in(opts.input, "input");
  } else if (fs::is_regular_file(opts.input)) {
    inputs.push_back(opts.input);
  } else {
    throw ArgumentError("input '" + opts.input.string() + "' does not exist");
  }
  const ImageTransform enhance =
      opts.mode == EnhanceMode::Full ? full_pipeline(*opts.checkpoint) : [](const RgbImage& x) { return pre_enhance(x); };

  fs::create_directories(*common.out);
  std::vector<std::string> outputs(inputs.size());
  parallel_for(inputs.size(), common.jobs, [&](std::size_t i) {
    const fs::path target = *common.out / inputs[i].filename().replace_extension(".png");
    save_image(enhance(load_image(inputs[i])), target);
    outputs[i] = target.string();
  });

  auto m = manifest_base("enhance", argv, common);
  m["mode"] = opts.mode == EnhanceMode::Full ? "full" : "stage1";
  m["input"] = opts.input.string();
  m["checkpoint"] = opts.checkpoint ? opts.checkpoint->string() : "";
  m["outputs"] = outputs;
  write_manifest(manifest_path(common, *common.out / "manifest.json"), m);
  spdlog::info("enhanced {} image(s) into {}", outputs.size(), common.out->string());
  return kExitOk;
}

int cmd_train(const TrainOptions& opts, const CommonOptions& common, const std::vector<std::string>& argv) {
  if (!common.out) throw ArgumentError("--out directory required");
  images_in(opts.low_dir, "low-light");
  images_in(opts.normal_dir, "normal-light");
  TrainConfig cfg = opts.config;
  cfg.seed = common.seed;
  cfg.output_dir = *common.out;
  cfg.validate();
  if (common.jobs > 1) spdlog::info("training runs on one worker; --jobs only affects data loading elsewhere");

  auto m = manifest_base("train", argv, common);
  m["preset"] = opts.preset;
  m["low_dir"] = opts.low_dir.string();
  m["normal_dir"] = opts.normal_dir.string();
  m["config"] = to_json(cfg);
  const fs::path manifest_file = manifest_path(common, *common.out / "manifest.json");
  write_manifest(manifest_file, m);

  const TrainResult result = train(UnpairedDataset::from_directories(opts.low_dir, opts.normal_dir), cfg);
  m["steps"] = result.log.size();
  m["outputs"] = {(*common.out / "loss.csv").string(), (*common.out / "checkpoint_final.lle").string()};
  write_manifest(manifest_file, m);
  if (!result.log.empty()) {
    spdlog::info("trained {} steps, final total {}", result.log.size(), format_number(result.log.back().losses.total));
  }
  return kExitOk;
}

int cmd_eval_metrics(const EvalMetricsOptions& opts, const CommonOptions& common, const std::vector<std::string>& argv,
                     std::ostream& out) {
  const bool want_niqe = opts.niqe_corpus || opts.niqe_model;
  if (!opts.reference_dir && !want_niqe) {
    throw ArgumentError("nothing to compute: pass --reference and/or --niqe-corpus/--niqe-model");
  }
  std::vector<std::string> names;
  if (opts.reference_dir) {
    names = paired_names(opts.enhanced_dir, "enhanced", *opts.reference_dir, "reference");
  } else {
    for (const auto& p : images_in(opts.enhanced_dir, "enhanced")) names.push_back(p.filename().string());
  }

  std::optional<NiqeModel> model;
  if (opts.niqe_model) {
    model = load_niqe_model(*opts.niqe_model);
  } else if (opts.niqe_corpus) {
    std::vector<RgbImage> corpus;
    for (const auto& p : images_in(*opts.niqe_corpus, "NIQE corpus")) corpus.push_back(load_image(p));
    NiqeOptions no;
    no.patch_size = opts.niqe_patch;
    no.corpus_id = opts.niqe_corpus->filename().string();
    model = niqe_fit(corpus, no);
    // Score with the precision a saved model has, so a reloaded model reproduces these numbers.
    model->mean = model->mean.cast<float>().cast<double>();
    model->cov = model->cov.cast<float>().cast<double>();
  }
  if (model && opts.save_niqe_model) save_niqe_model(*model, *opts.save_niqe_model);

  std::vector<MetricReport> rows(names.size());
  parallel_for(names.size(), common.jobs, [&](std::size_t i) {
    const RgbImage img = load_image(opts.enhanced_dir / names[i]);
    if (opts.reference_dir) {
      const RgbImage ref = load_image(*opts.reference_dir / names[i]);
      rows[i].psnr = psnr(img, ref);
      rows[i].ssim = ssim(img, ref);
    }
    if (model) rows[i].niqe = niqe_score(img, *model);
  });

  std::ofstream file;
  std::ostream& csv = csv_target(common, out, file);
  csv << "image,psnr_db,ssim,niqe\n";
  for (std::size_t i = 0; i < names.size(); ++i) {
    csv << names[i] << ',' << optional_number(rows[i].psnr) << ',' << optional_number(rows[i].ssim) << ','
        << optional_number(rows[i].niqe) << '\n';
  }

  if (const fs::path mp = eval_manifest_path(common); !mp.empty()) {
    auto m = manifest_base("eval-metrics", argv, common);
    m["enhanced_dir"] = opts.enhanced_dir.string();
    m["reference_dir"] = opts.reference_dir ? opts.reference_dir->string() : "";
    m["niqe_corpus"] = opts.niqe_corpus ? opts.niqe_corpus->string() : "";
    m["niqe_model"] = opts.niqe_model ? opts.niqe_model->string() : "";
    m["niqe_patch"] = opts.niqe_patch;
    m["rows"] = names.size();
    write_manifest(mp, m);
  }
  return kExitOk;
}

int cmd_eval_matching(const EvalMatchingOptions& opts, const CommonOptions& common,
                      const std::vector<std::string>& argv, std::ostream& out) {
  if (opts.enhancer == MatchEnhancer::Full && !opts.checkpoint) {
    throw ArgumentError("checkpoint required for --enhancer full");
  }
  const auto names = paired_names(opts.low_dir, "low-light", opts.normal_dir, "normal-light");
  ImageTransform enhancer;
  if (opts.enhancer == MatchEnhancer::Stage1) enhancer = [](const RgbImage& x) { return pre_enhance(x); };
  if (opts.enhancer == MatchEnhancer::Full) enhancer = full_pipeline(*opts.checkpoint);

  MatchEvalConfig cfg;
  cfg.max_points = opts.max_points;
  cfg.ratio = opts.ratio;
  cfg.ransac.seed = common.seed;
  std::vector<MatchReport> reports(names.size());
  parallel_for(names.size(), common.jobs, [&](std::size_t i) {
    reports[i] = evaluate_pair(load_image(opts.low_dir / names[i]), load_image(opts.normal_dir / names[i]), enhancer, cfg);
  });

  std::ofstream file;
  std::ostream& csv = csv_target(common, out, file);
  const char* tag = enhancer_name(opts.enhancer);
  auto row = [&](const std::string& name, const MatchReport& r) {
    csv << name << ',' << r.detected_low << ',' << r.detected_normal << ',' << r.matches << ','
        << format_number(r.match_rate) << ',' << tag << '\n';
  };
  csv << "pair,detected_low,detected_normal,matches,match_rate,enhancer\n";
  for (std::size_t i = 0; i < names.size(); ++i) row(names[i], reports[i]);
  row("aggregate", aggregate(reports));

  if (const fs::path mp = eval_manifest_path(common); !mp.empty()) {
    auto m = manifest_base("eval-matching", argv, common);
    m["low_dir"] = opts.low_dir.string();
    m["normal_dir"] = opts.normal_dir.string();
    m["enhancer"] = tag;
    m["checkpoint"] = opts.checkpoint ? opts.checkpoint->string() : "";
    m["max_points"] = opts.max_points;
    m["ratio"] = opts.ratio;
    m["pairs"] = names.size();
    write_manifest(mp, m);
  }
  return kExitOk;
}

}  // namespace lle::cli
