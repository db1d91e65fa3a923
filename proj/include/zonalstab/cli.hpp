#pragma once

namespace zonal::cli {

enum ExitCode : int {
  kOk = 0,
  kConfigError = 2,
  kNumericError = 3,
  kIoError = 4,
};

/// Entry point of the command-line tool.
int run(int argc, char** argv);

}  // namespace zonal::cli
