#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace droidcall::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kConfigError = 2;
inline constexpr int kIoError = 3;
inline constexpr int kBackendError = 4;
inline constexpr int kValidationError = 5;
inline constexpr int kBelowFloor = 6;  // evaluate: acc below --acc-floor

// Runs the droidcall command line. args[0] is the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace droidcall::cli
