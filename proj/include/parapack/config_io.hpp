#pragma once

#include <filesystem>
#include <string>

#include "parapack/params.hpp"

namespace parapack {

/// JSON module files. The schema is described in docs/formats.md.
/// Errors are ConfigError with the dotted path of the offending field.
std::string config_to_json(const ModuleConfig& cfg);
ModuleConfig config_from_json(const std::string& text);

ModuleConfig load_config(const std::filesystem::path& path);
void save_config(const ModuleConfig& cfg, const std::filesystem::path& path);

std::string cell_to_json(const CellParameters& cell);

}  // namespace parapack
