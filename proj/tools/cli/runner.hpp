#pragma once

#include <filesystem>
#include <vector>

#include "cli/config.hpp"

namespace nvmag::cli {

/// Executes the configured scenario and writes its outputs, plus
/// summary.json, into cfg.output_dir (created if needed). Returns the paths
/// written, in order. Library errors propagate as exceptions.
std::vector<std::filesystem::path> run(const RunConfig& cfg);

}  // namespace nvmag::cli
