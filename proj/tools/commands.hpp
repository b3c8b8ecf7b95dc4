#pragma once

#include <stdexcept>
#include <string>

#include "config.hpp"
#include "output.hpp"

namespace npbcli {

/// A library call failed while running a command.
class RunError : public std::runtime_error {
 public:
  RunError(std::string code, const std::string& message) : std::runtime_error(message), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

Result run_command(const RunConfig& config);

}  // namespace npbcli
