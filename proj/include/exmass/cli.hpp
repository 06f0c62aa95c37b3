#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace exmass::cli {

//! Exit codes: 0 success, 2 usage error, 3 input error, 4 numeric failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitInput = 3;
inline constexpr int kExitNumeric = 4;

//! Thrown for unreadable/malformed inputs (exit 3).
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args);  // args without argv[0]

}  // namespace exmass::cli
