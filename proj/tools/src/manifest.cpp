#include "manifest.hpp"

#include <fstream>

#include "lle/error.hpp"
#include "lle/version.hpp"

namespace lle::cli {

nlohmann::json manifest_base(const std::string& subcommand, const std::vector<std::string>& argv,
                             const CommonOptions& common) {
  nlohmann::json m;
  m["subcommand"] = subcommand;
  m["version"] = std::string(version_string());
  m["argv"] = argv;
  m["seed"] = common.seed;
  m["jobs"] = common.jobs;
  return m;
}

nlohmann::json to_json(const TrainConfig& cfg) {
  return {
      {"patch_size", cfg.patch_size},
      {"batch_size", cfg.batch_size},
      {"epochs", cfg.epochs},
      {"max_steps", cfg.max_steps},
      {"seed", cfg.seed},
      {"width_scale", cfg.width_scale},
      {"lr", cfg.lr},
      {"critic_lr_ratio", cfg.critic_lr_ratio},
      {"beta1", cfg.beta1},
      {"beta2", cfg.beta2},
      {"weight_decay", cfg.weight_decay},
      {"checkpoint_every", cfg.checkpoint_every},
      {"weights", {{"w_per", cfg.weights.w_per}, {"w_tv", cfg.weights.w_tv}, {"w_adv", cfg.weights.w_adv}}},
      {"tone_map", {{"sigma", cfg.tone_map.sigma}, {"epsilon_div", cfg.tone_map.epsilon_div}}},
  };
}

void write_manifest(const std::filesystem::path& path, const nlohmann::json& manifest) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write manifest '" + path.string() + "'");
  out << manifest.dump(2) << '\n';
}

std::filesystem::path manifest_path(const CommonOptions& common, const std::filesystem::path& fallback) {
  return common.manifest ? *common.manifest : fallback;
}

}  // namespace lle::cli
