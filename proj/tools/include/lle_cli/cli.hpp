#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lle/trainer.hpp"

namespace lle::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUser = 1;
inline constexpr int kExitInternal = 2;

/// Flags every subcommand accepts.
struct CommonOptions {
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
  std::optional<std::filesystem::path> out;
  std::optional<std::filesystem::path> manifest;
};

enum class EnhanceMode { Stage1, Full };

struct EnhanceOptions {
  std::filesystem::path input;
  EnhanceMode mode = EnhanceMode::Full;
  std::optional<std::filesystem::path> checkpoint;
};

struct TrainOptions {
  std::filesystem::path low_dir;
  std::filesystem::path normal_dir;
  TrainConfig config;
  std::string preset = "desk";
};

struct EvalMetricsOptions {
  std::filesystem::path enhanced_dir;
  std::optional<std::filesystem::path> reference_dir;
  std::optional<std::filesystem::path> niqe_corpus;
  std::optional<std::filesystem::path> niqe_model;
  std::optional<std::filesystem::path> save_niqe_model;
  std::size_t niqe_patch = 96;
};

enum class MatchEnhancer { None, Stage1, Full };

struct EvalMatchingOptions {
  std::filesystem::path low_dir;
  std::filesystem::path normal_dir;
  MatchEnhancer enhancer = MatchEnhancer::None;
  std::optional<std::filesystem::path> checkpoint;
  std::size_t max_points = 1000;
  double ratio = 0.3;
};

/// Each command writes CSV (when it has any) to `out` or the --out file and
/// returns an exit code. Library errors propagate as exceptions.
int cmd_enhance(const EnhanceOptions& opts, const CommonOptions& common, const std::vector<std::string>& argv);
int cmd_train(const TrainOptions& opts, const CommonOptions& common, const std::vector<std::string>& argv);
int cmd_eval_metrics(const EvalMetricsOptions& opts, const CommonOptions& common, const std::vector<std::string>& argv,
                     std::ostream& out);
int cmd_eval_matching(const EvalMatchingOptions& opts, const CommonOptions& common,
                      const std::vector<std::string>& argv, std::ostream& out);

/// Parses `args` (without the program name), dispatches, and maps errors to
/// exit codes: 1 for bad input, 2 for internal failures.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Formats with 6 significant digits.
std::string format_number(double v);

}  // namespace lle::cli
