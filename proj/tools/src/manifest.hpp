#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "lle_cli/cli.hpp"

namespace lle::cli {

/// Skeleton shared by every run manifest: subcommand, argv, version, seed, jobs.
nlohmann::json manifest_base(const std::string& subcommand, const std::vector<std::string>& argv,
                             const CommonOptions& common);

nlohmann::json to_json(const TrainConfig& cfg);

void write_manifest(const std::filesystem::path& path, const nlohmann::json& manifest);

/// --manifest when given, else `fallback`.
std::filesystem::path manifest_path(const CommonOptions& common, const std::filesystem::path& fallback);

}  // namespace lle::cli
