#pragma once

#include <string>
#include <vector>

namespace pcot {

// Headerless CSV, one row per sample, one column per variable.
using Dataset = std::vector<std::vector<double>>;

Dataset load_csv(const std::string& path);
void save_csv(const std::string& path, const Dataset& data);

} // namespace pcot
