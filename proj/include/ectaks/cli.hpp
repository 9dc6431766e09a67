#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "ectaks/error.hpp"

namespace ectaks::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitReject = 3;
inline constexpr int kExitInfeasible = 4;

int exit_code_for(ErrorCode code);

// args excludes the program name. Reports go to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ectaks::cli
