#pragma once

#include <iosfwd>

namespace qtomo::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitIo = 2;

/// Entry point of the `qtomo` tool. Subcommands: duals, estimate, simulate,
/// report. Returns 0 on success, 1 on validation errors (including bad
/// flags), 2 on I/O errors.
int parse_and_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qtomo::cli
