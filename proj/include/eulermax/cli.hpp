#pragma once

#include <string>
#include <vector>

namespace eulermax {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitConstruction = 3;
inline constexpr int kExitInternal = 4;

// Entry point of the eulermax command; args excludes the program name.
int run_cli(const std::vector<std::string>& args);

}  // namespace eulermax
