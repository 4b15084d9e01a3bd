#pragma once

#include <string>
#include <utility>
#include <vector>

#include "qmelab/experiments.hpp"

namespace qmelab {

// 17 significant digits, enough to round-trip a double exactly.
std::string format_double(double v);

// Metadata emitted ahead of the data: tool/version, config hash, seed and
// the model flags that pin down the channel conventions.
using Metadata = std::vector<std::pair<std::string, std::string>>;

std::string render_csv(const ExperimentResult& result, const Metadata& header);
std::string render_json(const ExperimentResult& result, const Metadata& header);

// Writes through a temporary file and renames on success, so a failed run
// never leaves a partial result behind.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace qmelab
