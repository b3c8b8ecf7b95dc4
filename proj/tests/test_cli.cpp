#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "app.hpp"
#include "config.hpp"

namespace fs = std::filesystem;
using namespace npbcli;

namespace {

const fs::path kSource = NPB_SOURCE_DIR;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_app(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "npbayes_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

fs::path write_config(const std::string& name, const std::string& text) {
  const auto p = scratch(name);
  std::ofstream(p, std::ios::binary) << text;
  return p;
}

std::vector<Violation> violations_of(const std::string& text, const std::string& command, std::string* code = nullptr) {
  try {
    parse_config(text, command);
  } catch (const ConfigError& e) {
    if (code) *code = e.code();
    return e.violations();
  }
  return {};
}

}  // namespace

TEST(ParseConfig, MinimalDocumentGetsDefaults) {
  const auto cfg = parse_config(R"({"version":1,"seed":5,"params":{}})", "dp-sample");
  EXPECT_EQ(cfg.command, "dp-sample");
  EXPECT_EQ(*cfg.seed, 5u);
  EXPECT_EQ(cfg.format, Format::csv);
  EXPECT_EQ(cfg.params.at("b").get<double>(), 1.0);
  EXPECT_TRUE(cfg.params.contains("truncation_eps"));
  EXPECT_TRUE(cfg.params.contains("base"));
}

TEST(ParseConfig, UnknownKeyIsNamed) {
  std::string code;
  const auto v = violations_of(R"({"version":1,"params":{"b":1,"p_max":4,"colour":"red"}})", "mean-moments", &code);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(code, "schema_violation");
  EXPECT_EQ(v[0].path, "params.colour");
}

TEST(ParseConfig, EveryViolationIsListed) {
  const auto v = violations_of(R"({"version":2,"extra":0,"params":{"b":-1,"p_max":"x"}})", "mean-moments");
  EXPECT_GE(v.size(), 4u);
}

TEST(ParseConfig, MissingSeed) {
  std::string code;
  const auto v = violations_of(R"({"version":1,"params":{"steps":1000}})", "mean-chain", &code);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(code, "missing_seed");
  EXPECT_EQ(v[0].path, "seed");
}

TEST(ParseConfig, MalformedJson) {
  std::string code;
  violations_of(R"({"version":1,)", "mean-moments", &code);
  EXPECT_EQ(code, "malformed_json");
}

TEST(ParseConfig, CommandMustAgree) {
  EXPECT_FALSE(violations_of(R"({"version":1,"command":"envelope","params":{"b":1}})", "mean-moments").empty());
}

TEST(ParseConfig, CrossFieldRules) {
  EXPECT_FALSE(violations_of(R"({"version":1,"params":{"x":[0,1],"y":[1]}})", "localreg-fit").empty());
  EXPECT_FALSE(violations_of(R"({"version":1,"seed":1,"params":{"steps":100,"burn_in":100}})", "mean-chain").empty());
}

TEST(ParseConfig, SeedOnlyWhenStochastic) {
  EXPECT_FALSE(needs_seed("localreg-fit", {{"x", {0}}, {"y", {0}}}));
  EXPECT_TRUE(needs_seed("localreg-fit", {{"hierarchical", json::object()}}));
  EXPECT_TRUE(needs_seed("pyramid-fit", json::object()));
  EXPECT_FALSE(needs_seed("mean-moments", json::object()));
}

TEST(ParseConfig, ShippedConfigsAreValid) {
  for (const auto& name : command_names()) {
    const auto path = kSource / "configs" / (name + ".json");
    ASSERT_TRUE(fs::exists(path)) << path;
    EXPECT_NO_THROW(parse_config(slurp(path), name)) << name;
  }
}

TEST(Schema, PublishedCopyIsCurrent) {
  const auto published = json::parse(slurp(kSource / "docs" / "config-schema.json"));
  EXPECT_EQ(published, config_schema());
  const auto r = run({"schema"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(json::parse(r.out), config_schema());
}

TEST(App, TransformCheckReport) {
  const auto r = run({"transform-check", "--config", (kSource / "configs" / "transform-check.json").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("# seed: 3"), std::string::npos);
  EXPECT_NE(r.out.find("u,lhs_mc,mc_se,rhs_exact,z,within_3se"), std::string::npos);
  EXPECT_NE(r.out.find("1,0.6799"), std::string::npos);
  EXPECT_NE(r.out.find(",0.67957045711476138,"), std::string::npos);
  // every row within 3 se
  std::istringstream in(r.out);
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line[0] == 'u') continue;
    EXPECT_EQ(line.back(), '1') << line;
    ++rows;
  }
  EXPECT_EQ(rows, 3);
}

TEST(App, DensityBoundary) {
  const auto r = run({"density-estimate", "--config", (kSource / "configs" / "density-estimate.json").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("\n0,0.5,0\n"), std::string::npos);
  EXPECT_NE(r.out.find("\n3,0.25,1\n"), std::string::npos);
}

TEST(App, JsonOutputCarriesSeedAndConfig) {
  const auto out = scratch("chain.json");
  const auto r = run({"mean-chain", "--config", (kSource / "configs" / "mean-chain.json").string(), "--format", "json",
                      "--out", out.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = json::parse(slurp(out));
  EXPECT_EQ(doc.at("seed").get<std::uint64_t>(), 1u);
  EXPECT_EQ(doc.at("config").at("params").at("steps").get<int>(), 200000);
  EXPECT_TRUE(doc.at("tables").is_object());
  EXPECT_FALSE(r.out.empty());  // summary goes to stdout when writing a file
}

TEST(App, ByteIdenticalReruns) {
  for (const auto& name : command_names()) {
    const auto cfg = (kSource / "configs" / (name + ".json")).string();
    for (const std::string fmt : {"csv", "json"}) {
      const auto a = scratch(name + ".a." + fmt), b = scratch(name + ".b." + fmt);
      ASSERT_EQ(run({name, "--config", cfg, "--format", fmt, "--out", a.string()}).code, 0) << name;
      ASSERT_EQ(run({name, "--config", cfg, "--format", fmt, "--out", b.string()}).code, 0) << name;
      EXPECT_EQ(slurp(a), slurp(b)) << name << " " << fmt;
    }
  }
}

TEST(App, SeedChangesStochasticOutput) {
  const auto a = write_config("s1.json", R"({"version":1,"seed":1,"params":{"draws":2}})");
  const auto b = write_config("s2.json", R"({"version":1,"seed":2,"params":{"draws":2}})");
  EXPECT_NE(run({"dp-sample", "--config", a.string()}).out, run({"dp-sample", "--config", b.string()}).out);
}

TEST(App, ExitCodesAndErrorRecords) {
  auto r = run({"mean-moments", "--config", scratch("does-not-exist.json").string()});
  EXPECT_EQ(r.code, kExitIo);
  EXPECT_EQ(json::parse(r.err).at("error").at("code"), "io_error");

  const auto bad = write_config("bad.json", R"({"version":1,"params":{"b":-1}})");
  r = run({"mean-moments", "--config", bad.string()});
  EXPECT_EQ(r.code, kExitBadConfig);
  const auto rec = json::parse(r.err).at("error");
  EXPECT_EQ(rec.at("code"), "schema_violation");
  EXPECT_EQ(rec.at("command"), "mean-moments");
  EXPECT_EQ(rec.at("violations").at(0).at("path"), "params.b");

  const auto noseed = write_config("noseed.json", R"({"version":1,"params":{}})");
  r = run({"pyramid-fit", "--config", noseed.string()});
  EXPECT_EQ(r.code, kExitBadConfig);
  EXPECT_EQ(json::parse(r.err).at("error").at("code"), "missing_seed");

  EXPECT_EQ(run({"no-such-command"}).code, kExitBadConfig);
  EXPECT_EQ(run({"mean-moments"}).code, kExitBadConfig);

  // a valid config the library rejects at run time
  const auto runtime = write_config("ties.json", R"({"version":1,"params":{"data":[1,1,2]}})");
  r = run({"density-estimate", "--config", runtime.string()});
  EXPECT_EQ(r.code, kExitRunFailed);
  EXPECT_EQ(json::parse(r.err).at("error").at("command"), "density-estimate");

  r = run({"mean-moments", "--config", (kSource / "configs" / "mean-moments.json").string(), "--out",
           (scratch("no-dir") / "x" / "y.csv").string()});
  EXPECT_EQ(r.code, kExitIo);
}

TEST(App, Version) {
  const auto r = run({"--version"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "npbayes 0.1.0\n");
}
