#pragma once

#include <CLI11.hpp>

namespace pcot_cli {

inline constexpr const char* kVersion = "1.0.0";

void register_commands(CLI::App& app);

// 0 ok, 2 compatibility, 3 format/domain, 4 resource caps
int exit_code_for(const std::string& error_code);

} // namespace pcot_cli
