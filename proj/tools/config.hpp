#pragma once

// Run configuration for the npbayes command-line tool: a JSON document
// validated against a per-command schema, with defaults filled in.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace npbcli {

using nlohmann::json;

enum class Format { csv, json };

struct Violation {
  std::string path;
  std::string message;
};

/// Raised for malformed JSON or any schema violation; carries every problem found.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string code, std::vector<Violation> violations);
  const std::string& code() const { return code_; }
  const std::vector<Violation>& violations() const { return violations_; }

 private:
  std::string code_;
  std::vector<Violation> violations_;
};

struct RunConfig {
  std::string command;
  int version = 1;
  std::optional<std::uint64_t> seed;
  json params;  ///< resolved parameter block, defaults filled
  std::optional<std::string> output;
  Format format = Format::csv;
};

inline constexpr int kConfigVersion = 1;

std::vector<std::string> command_names();
bool is_command(const std::string& name);
/// True when the command draws random numbers for these (resolved) params.
bool needs_seed(const std::string& command, const json& params);

/// Parses and validates `text` for `command`. A "command" key in the
/// document, when present, must agree with `command`.
RunConfig parse_config(const std::string& text, const std::string& command);

/// Full resolved document, as embedded in outputs.
json resolved_document(const RunConfig& config);

/// JSON Schema (draft-07) for configuration documents.
json config_schema();

}  // namespace npbcli
