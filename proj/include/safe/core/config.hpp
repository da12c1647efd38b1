#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "safe/core/types.hpp"

namespace safe {

using ConfigOverrides = std::map<std::string, std::string>;

// Throws ConfigError naming the first offending field.
void validate(const PipelineConfig& config);

// Config files are flat `key = value` lines. Blank lines and lines starting
// with '#' are ignored. Keys are the PipelineConfig field names.
PipelineConfig parse_config(std::string_view text, const ConfigOverrides& overrides = {});
PipelineConfig load_config(const std::filesystem::path& path, const ConfigOverrides& overrides = {});

void apply_override(PipelineConfig& config, std::string_view key, std::string_view value);

std::string serialize_config(const PipelineConfig& config);

const std::vector<std::string>& config_keys();

}  // namespace safe
