#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace flamespeed::io {

/// Writes to `path.tmp` and renames over `path`, so readers never see a partial file.
void write_atomic(const std::filesystem::path& path, const std::string& content);

/// Compact, key-sorted serialization with a trailing newline; doubles round-trip exactly.
std::string dump_json(const nlohmann::json& j);

/// Fixed-width round-trip formatting (%.17g) for CSV cells.
std::string format_double(double x);

/// Header row plus one row per index; all columns must have the same length.
std::string csv(const std::vector<std::string>& header, const std::vector<std::vector<double>>& columns);

/// --out, then the config value, then $FLAMESPEED_OUT, then "flamespeed_out".
std::filesystem::path resolve_output_dir(const std::string& flag, const std::string& config_value);

}  // namespace flamespeed::io
