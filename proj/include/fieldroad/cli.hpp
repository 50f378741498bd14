#pragma once

#include <string>
#include <vector>

namespace fieldroad {

inline constexpr const char* kVersion = "0.1.0";

// Subcommands: dispersion, simulate, speed, certify-super, certify-sub,
// mass-check, properties. Exit codes: 0 success, 1 invalid certificate or
// failed property, 2 usage/config error.
int cli_main(const std::vector<std::string>& args);
int cli_main(int argc, char** argv);

}  // namespace fieldroad
