#pragma once

#include <string>

namespace trendguard::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

// Entry point behind the trendguard binary. Never throws.
int run(int argc, char** argv);

// "+3", "-5", "+05:30" or "0". Throws Errc::BadParams.
int parse_tz_offset(const std::string& text);

}  // namespace trendguard::cli
