#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace wslat::cli
{
    inline constexpr int kExitOk = 0;
    inline constexpr int kExitValidation = 2;
    inline constexpr int kExitBudget = 3;
    inline constexpr int kExitInternal = 1;

    /// Entry point behind the ws_sim binary. `args` excludes the program name.
    /// Results go to `out`; diagnostics and warnings to `err`.
    int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);
} // namespace wslat::cli
