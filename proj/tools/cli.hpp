#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace protpat::cli {

enum ExitCode : int {
    exit_ok = 0,
    exit_usage = 1,
    exit_io = 2,
    exit_degenerate = 3,
    exit_calibration = 4,
};

/// Runs one subcommand. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

std::string sha256_hex(std::string_view data);

}  // namespace protpat::cli
