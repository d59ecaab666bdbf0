#pragma once

#include <string>
#include <vector>

namespace geomag::cli {

enum ExitCode { kSuccess = 0, kConfigError = 1, kNumericalError = 2, kAcceptanceFailure = 3 };

int run(int argc, const char* const* argv);

}  // namespace geomag::cli
