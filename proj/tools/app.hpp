#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace npbcli {

enum ExitCode { kExitOk = 0, kExitRunFailed = 1, kExitBadConfig = 2, kExitIo = 3 };

/// Full command-line behaviour; args excludes the program name.
int run_app(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace npbcli
