#include "app.hpp"

#include <fstream>
#include <iterator>
#include <sstream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "config.hpp"
#include "npbayes/npbayes.h"
#include "output.hpp"

namespace npbcli {

namespace {

void error_record(std::ostream& err, const std::string& code, const std::string& message, const std::string& command,
                  const std::vector<Violation>& violations = {}) {
  json rec = {{"code", code}, {"message", message}};
  if (!command.empty()) rec["command"] = command;
  if (!violations.empty()) {
    json list = json::array();
    for (const auto& v : violations) list.push_back({{"path", v.path}, {"message", v.message}});
    rec["violations"] = list;
  }
  err << json{{"error", rec}}.dump() << "\n";
}

}  // namespace

int run_app(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Nonparametric Bayesian simulation and estimation", "npbayes"};
  std::string command;
  std::string config_path;
  std::string out_path;
  std::string format;
  std::vector<std::string> choices = command_names();
  choices.push_back("schema");
  app.add_option("command", command, "command to run, or 'schema' to print the configuration schema")
      ->required()
      ->check(CLI::IsMember(choices));
  app.add_option("--config", config_path, "JSON configuration file");
  app.add_option("--out", out_path, "output file (default: the config's output, else standard output)");
  app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app.set_version_flag("--version", std::string("npbayes ") + npb_version());

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << "npbayes " << npb_version() << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    error_record(err, "usage", e.what(), command);
    return kExitBadConfig;
  }

  if (command == "schema") {
    out << config_schema().dump(2) << "\n";
    return kExitOk;
  }
  if (config_path.empty()) {
    error_record(err, "usage", "--config is required", command);
    return kExitBadConfig;
  }

  std::ifstream in(config_path, std::ios::binary);
  if (!in) {
    error_record(err, "io_error", "cannot read config file '" + config_path + "'", command);
    return kExitIo;
  }
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  RunConfig cfg;
  try {
    cfg = parse_config(text, command);
  } catch (const ConfigError& e) {
    error_record(err, e.code(), "invalid configuration", command, e.violations());
    return kExitBadConfig;
  }
  if (!out_path.empty()) cfg.output = out_path;
  if (format == "csv") cfg.format = Format::csv;
  if (format == "json") cfg.format = Format::json;

  Result result;
  try {
    result = run_command(cfg);
  } catch (const RunError& e) {
    error_record(err, e.code(), e.what(), command);
    return kExitRunFailed;
  } catch (const std::exception& e) {
    error_record(err, "internal error", e.what(), command);
    return kExitRunFailed;
  }

  const json resolved = resolved_document(cfg);
  const std::string body = cfg.format == Format::csv ? render_csv(result, resolved) : render_json(result, resolved);
  if (!cfg.output) {
    out << body;
    return kExitOk;
  }
  std::ofstream file(*cfg.output, std::ios::binary | std::ios::trunc);
  file << body;
  file.close();
  if (!file) {
    error_record(err, "io_error", "cannot write output file '" + *cfg.output + "'", command);
    return kExitIo;
  }
  out << render_summary(result);
  return kExitOk;
}

}  // namespace npbcli
