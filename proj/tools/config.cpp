#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <memory>

namespace npbcli {

namespace {

enum class Kind { number, integer, boolean, choice, numbers, matrix, object, objects, variant, grid };

struct Schema;
using SchemaPtr = std::shared_ptr<const Schema>;

struct Field {
  std::string name;
  Kind kind = Kind::number;
  std::string doc;
  bool required = false;
  json fallback;  // null when there is no default
  std::optional<double> lo;
  bool lo_open = false;
  std::optional<double> hi;
  std::size_t min_items = 0;
  std::optional<std::size_t> exact_items;
  std::vector<std::string> choices;
  SchemaPtr nested;
  std::vector<std::pair<std::string, SchemaPtr>> variants;

  Field&& req() && {
    required = true;
    return std::move(*this);
  }
  Field&& def(json v) && {
    fallback = std::move(v);
    return std::move(*this);
  }
  Field&& above(double v) && {
    lo = v;
    lo_open = true;
    return std::move(*this);
  }
  Field&& at_least(double v) && {
    lo = v;
    return std::move(*this);
  }
  Field&& at_most(double v) && {
    hi = v;
    return std::move(*this);
  }
  Field&& items(std::size_t n) && {
    min_items = n;
    return std::move(*this);
  }
  Field&& exactly(std::size_t n) && {
    exact_items = n;
    return std::move(*this);
  }
};

struct Schema {
  std::vector<Field> fields;
};

SchemaPtr schema(std::vector<Field> fields) { return std::make_shared<Schema>(Schema{std::move(fields)}); }

Field make(std::string name, Kind kind, std::string doc) {
  Field f;
  f.name = std::move(name);
  f.kind = kind;
  f.doc = std::move(doc);
  return f;
}
Field number(std::string name, std::string doc) { return make(std::move(name), Kind::number, std::move(doc)); }
Field integer(std::string name, std::string doc) {
  return make(std::move(name), Kind::integer, std::move(doc)).at_least(0);
}
Field boolean(std::string name, std::string doc) { return make(std::move(name), Kind::boolean, std::move(doc)); }
Field numbers(std::string name, std::string doc) { return make(std::move(name), Kind::numbers, std::move(doc)); }
Field matrix(std::string name, std::string doc) { return make(std::move(name), Kind::matrix, std::move(doc)); }
Field grid(std::string name, std::string doc) { return make(std::move(name), Kind::grid, std::move(doc)); }
Field choice(std::string name, std::vector<std::string> options, std::string doc) {
  auto f = make(std::move(name), Kind::choice, std::move(doc));
  f.choices = std::move(options);
  return f;
}
Field object(std::string name, SchemaPtr s, std::string doc) {
  auto f = make(std::move(name), Kind::object, std::move(doc));
  f.nested = std::move(s);
  return f;
}
Field objects(std::string name, SchemaPtr s, std::string doc) {
  auto f = make(std::move(name), Kind::objects, std::move(doc));
  f.nested = std::move(s);
  return f;
}
Field variant(std::string name, std::vector<std::pair<std::string, SchemaPtr>> v, std::string doc) {
  auto f = make(std::move(name), Kind::variant, std::move(doc));
  f.variants = std::move(v);
  return f;
}

// ---- validation

class Validator {
 public:
  std::vector<Violation> violations;

  void add(const std::string& path, std::string message) { violations.push_back({path, std::move(message)}); }

  json object(const json& in, const Schema& s, const std::string& path) {
    json out = json::object();
    if (!in.is_object()) {
      add(path, "expected an object");
      return out;
    }
    for (const auto& [key, value] : in.items()) {
      const bool known = std::any_of(s.fields.begin(), s.fields.end(), [&](const Field& f) { return f.name == key; });
      if (!known) add(join(path, key), "unknown key '" + key + "'");
    }
    for (const auto& f : s.fields) {
      const auto it = in.find(f.name);
      if (it != in.end()) {
        out[f.name] = value(*it, f, join(path, f.name));
      } else if (f.required) {
        add(join(path, f.name), "missing required key '" + f.name + "'");
      } else if (!f.fallback.is_null()) {
        out[f.name] = value(f.fallback, f, join(path, f.name));
      }
    }
    return out;
  }

 private:
  static std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }

  bool real(const json& v, const Field& f, const std::string& path) {
    if (!v.is_number()) {
      add(path, "expected a number");
      return false;
    }
    const double x = v.get<double>();
    if (!std::isfinite(x)) {
      add(path, "must be finite");
      return false;
    }
    if (f.lo && (f.lo_open ? !(x > *f.lo) : !(x >= *f.lo))) {
      add(path, std::string("must be ") + (f.lo_open ? "> " : ">= ") + fmt(*f.lo));
      return false;
    }
    if (f.hi && !(x <= *f.hi)) {
      add(path, "must be <= " + fmt(*f.hi));
      return false;
    }
    return true;
  }

  static std::string fmt(double x) {
    json j = x;
    if (x == std::floor(x) && std::fabs(x) < 1e15) j = static_cast<long long>(x);
    return j.dump();
  }

  json number_list(const json& v, const Field& f, const std::string& path) {
    if (!v.is_array()) {
      add(path, "expected an array of numbers");
      return v;
    }
    if (v.size() < f.min_items) add(path, "needs at least " + std::to_string(f.min_items) + " entries");
    if (f.exact_items && v.size() != *f.exact_items) {
      add(path, "needs exactly " + std::to_string(*f.exact_items) + " entries");
    }
    for (std::size_t i = 0; i < v.size(); ++i) real(v[i], f, path + "[" + std::to_string(i) + "]");
    return v;
  }

  json value(const json& v, const Field& f, const std::string& path) {
    switch (f.kind) {
      case Kind::number:
        real(v, f, path);
        return v;
      case Kind::integer:
        if (!v.is_number_integer()) {
          add(path, "expected a nonnegative integer");
          return v;
        }
        if (v.is_number_unsigned() || v.get<long long>() >= 0) {
          real(v, f, path);
        } else {
          add(path, "expected a nonnegative integer");
        }
        return v;
      case Kind::boolean:
        if (!v.is_boolean()) add(path, "expected true or false");
        return v;
      case Kind::choice:
        if (!v.is_string() || std::find(f.choices.begin(), f.choices.end(), v.get<std::string>()) == f.choices.end()) {
          std::string list;
          for (const auto& c : f.choices) list += (list.empty() ? "" : ", ") + c;
          add(path, "expected one of: " + list);
        }
        return v;
      case Kind::numbers:
        return number_list(v, f, path);
      case Kind::matrix:
        if (!v.is_array() || v.empty()) {
          add(path, "expected a nonempty array of number arrays");
          return v;
        }
        for (std::size_t i = 0; i < v.size(); ++i) {
          Field row = f;
          row.min_items = 0;
          number_list(v[i], row, path + "[" + std::to_string(i) + "]");
        }
        return v;
      case Kind::object:
        return object(v, *f.nested, path);
      case Kind::objects: {
        if (!v.is_array()) {
          add(path, "expected an array of objects");
          return v;
        }
        if (v.size() < f.min_items) add(path, "needs at least " + std::to_string(f.min_items) + " entries");
        json out = json::array();
        for (std::size_t i = 0; i < v.size(); ++i) out.push_back(object(v[i], *f.nested, path + "[" + std::to_string(i) + "]"));
        return out;
      }
      case Kind::variant: {
        if (!v.is_object() || !v.contains("kind") || !v["kind"].is_string()) {
          add(path, "expected an object with a string \"kind\"");
          return v;
        }
        const auto kind = v["kind"].get<std::string>();
        for (const auto& [name, s] : f.variants) {
          if (name != kind) continue;
          Schema with_kind = *s;
          with_kind.fields.insert(with_kind.fields.begin(), choice("kind", {name}, "variant tag"));
          return object(v, with_kind, path);
        }
        std::string list;
        for (const auto& [name, s] : f.variants) list += (list.empty() ? "" : ", ") + name;
        add(path + ".kind", "unknown kind '" + kind + "', expected one of: " + list);
        return v;
      }
      case Kind::grid: {
        if (v.is_array()) {
          Field list = numbers(f.name, "").items(1);
          return number_list(v, list, path);
        }
        const Schema range{{number("from", "first grid point").req(), number("to", "last grid point").req(),
                            integer("count", "number of grid points").at_least(1).req()}};
        json out = object(v, range, path);
        if (out.contains("from") && out.contains("to") && out["from"].is_number() && out["to"].is_number() &&
            out["to"].get<double>() < out["from"].get<double>()) {
          add(path, "'to' must be >= 'from'");
        }
        return out;
      }
    }
    return v;
  }
};

// ---- JSON Schema rendering

json field_schema(const Field& f);

json object_schema(const Schema& s) {
  json props = json::object();
  json required = json::array();
  for (const auto& f : s.fields) {
    props[f.name] = field_schema(f);
    if (f.required) required.push_back(f.name);
  }
  json out = {{"type", "object"}, {"additionalProperties", false}, {"properties", props}};
  if (!required.empty()) out["required"] = required;
  return out;
}

json number_schema(const Field& f) {
  json s = {{"type", f.kind == Kind::integer ? "integer" : "number"}};
  if (f.lo) s[f.lo_open ? "exclusiveMinimum" : "minimum"] = *f.lo;
  if (f.hi) s["maximum"] = *f.hi;
  return s;
}

json field_schema(const Field& f) {
  json s;
  switch (f.kind) {
    case Kind::number:
    case Kind::integer:
      s = number_schema(f);
      break;
    case Kind::boolean:
      s = {{"type", "boolean"}};
      break;
    case Kind::choice:
      s = {{"type", "string"}, {"enum", f.choices}};
      break;
    case Kind::numbers:
      s = {{"type", "array"}, {"items", number_schema(f)}};
      if (f.min_items) s["minItems"] = f.min_items;
      if (f.exact_items) s["minItems"] = s["maxItems"] = *f.exact_items;
      break;
    case Kind::matrix:
      s = {{"type", "array"}, {"minItems", 1}, {"items", {{"type", "array"}, {"items", number_schema(f)}}}};
      break;
    case Kind::object:
      s = object_schema(*f.nested);
      break;
    case Kind::objects:
      s = {{"type", "array"}, {"items", object_schema(*f.nested)}};
      if (f.min_items) s["minItems"] = f.min_items;
      break;
    case Kind::variant: {
      json options = json::array();
      for (const auto& [name, v] : f.variants) {
        Schema with_kind = *v;
        with_kind.fields.insert(with_kind.fields.begin(), choice("kind", {name}, "variant tag").req());
        options.push_back(object_schema(with_kind));
      }
      s = {{"oneOf", options}};
      break;
    }
    case Kind::grid:
      s = {{"oneOf",
            {{{"type", "array"}, {"minItems", 1}, {"items", {{"type", "number"}}}},
             object_schema(Schema{{number("from", "first grid point").req(), number("to", "last grid point").req(),
                                   integer("count", "number of grid points").at_least(1).req()}})}}};
      break;
  }
  if (!f.doc.empty()) s["description"] = f.doc;
  if (!f.fallback.is_null()) s["default"] = f.fallback;
  return s;
}

// ---- command schemas

SchemaPtr base_variants_uniform() {
  return schema({number("lo", "lower end").def(0.0), number("hi", "upper end").def(1.0)});
}

Field base_field(const std::string& name, json fallback, std::string doc) {
  return variant(name,
                 {{"uniform", base_variants_uniform()},
                  {"normal", schema({number("mean", "mean").def(0.0), number("sd", "standard deviation").above(0).def(1.0)})},
                  {"empirical", schema({numbers("points", "support points, equally weighted").items(1).req()})}},
                 std::move(doc))
      .def(std::move(fallback));
}

Field integrand_field() {
  return variant("g",
                 {{"identity", schema({})},
                  {"constant", schema({number("value", "constant value").req()})},
                  {"power", schema({number("exponent", "g(x) = x^exponent").req()})}},
                 "integrand g")
      .def({{"kind", "identity"}});
}

Field concentration() { return number("b", "concentration parameter").above(0).def(1.0); }
Field stick(const char* name) { return number(name, "general stick law Beta(stick_a, stick_b)").above(0); }

Field jump_field() {
  return variant("jump",
                 {{"gamma", schema({number("nu", "shape, unit rate").above(0).def(1.0)})},
                  {"point", schema({number("size", "jump size").at_least(0).def(1.0)})},
                  {"beta_risk", schema({number("alpha", "R ~ Beta(alpha, beta), G = -log(1 - R)").above(0).req(),
                                        number("beta", "second Beta parameter").above(0).req()})}},
                 "law of the jumps G_j")
      .def({{"kind", "gamma"}});
}

SchemaPtr rate_schema() {
  return schema({number("kappa", "Lambda(t) = kappa t^exponent").at_least(0).def(1.0),
                 number("exponent", "power of t").above(0).def(1.0)});
}

Field curve_field(const std::string& name, bool nonnegative, std::string doc) {
  Field value = number("value", "constant value").def(0.0);
  Field table_values = numbers("values", "function values at x").items(1).req();
  if (nonnegative) {
    value.lo = 0.0;
    table_values.lo = 0.0;
  }
  std::vector<std::pair<std::string, SchemaPtr>> v{{"constant", schema({value})}};
  if (!nonnegative) {
    v.push_back({"linear", schema({number("xi0", "intercept").def(0.0), number("xi1", "slope").def(0.0)})});
  }
  v.push_back({"table", schema({numbers("x", "increasing abscissae").items(1).req(), table_values})});
  return variant(name, std::move(v), std::move(doc)).def({{"kind", "constant"}});
}

struct CommandInfo {
  std::string name;
  std::string doc;
  SchemaPtr params;
  std::function<bool(const json&)> stochastic;
  std::function<void(json&, Validator&)> check;  // cross-field rules, may fill derived defaults
};

bool always(const json&) { return true; }
bool never(const json&) { return false; }

void sticks_together(const json& p, Validator& v) {
  if (p.contains("stick_a") != p.contains("stick_b")) {
    v.add("params", "stick_a and stick_b must be given together");
  }
}

bool has(const json& p, const char* key) { return p.contains(key) && !p[key].is_null(); }

const std::vector<CommandInfo>& commands() {
  static const std::vector<CommandInfo> table = [] {
    std::vector<CommandInfo> c;

    c.push_back({"dp-sample", "random measures drawn from a Dirichlet or stick-breaking process",
                 schema({concentration(), base_field("base", {{"kind", "uniform"}}, "base distribution P0"),
                         stick("stick_a"), stick("stick_b"),
                         choice("method", {"stick", "finite", "random_m"}, "construction").def("stick"),
                         integer("m", "atoms for the finite construction").at_least(1).def(1000),
                         number("poisson_mean", "random_m: M = 1 + Poisson(poisson_mean)").above(0).def(100.0),
                         number("truncation_eps", "stick-breaking remaining-mass cutoff").above(0).at_most(0.5).def(1e-12),
                         integer("draws", "number of measures").at_least(1).def(10),
                         numbers("data", "observations; draws then come from the posterior"),
                         number("threshold", "also report P((-inf, threshold])"),
                         boolean("emit_atoms", "write every atom and weight").def(false)}),
                 always, sticks_together});

    c.push_back({"mean-moments", "central moments of a random mean by recursion",
                 schema({concentration(), stick("stick_a"), stick("stick_b"),
                         variant("base",
                                 {{"uniform", base_variants_uniform()},
                                  {"normal", schema({number("mean", "mean").def(0.0),
                                                     number("sd", "standard deviation").above(0).def(1.0)})},
                                  {"point", schema({number("location", "atom").def(0.0)})}},
                                 "law of Y = g(X)")
                             .def({{"kind", "uniform"}}),
                         integer("p_max", "highest moment order").at_least(1).at_most(200).def(10),
                         choice("arithmetic", {"auto", "exact", "float"}, "rational or floating recursion").def("auto")}),
                 never, sticks_together});

    c.push_back({"mean-chain", "samples of a random mean from its stochastic equation",
                 schema({concentration(), stick("stick_a"), stick("stick_b"),
                         base_field("base", {{"kind", "uniform"}}, "base distribution"), integrand_field(),
                         integer("steps", "chain length").at_least(1).def(100000),
                         integer("burn_in", "discarded initial steps (default steps/100)"),
                         choice("table", {"moments", "samples"}, "what to write").def("moments"),
                         integer("p_max", "moment orders reported").at_least(1).at_most(20).def(4)}),
                 always, [](json& p, Validator& v) {
                   sticks_together(p, v);
                   if (!has(p, "burn_in") && p["steps"].is_number_unsigned()) {
                     p["burn_in"] = p["steps"].get<std::uint64_t>() / 100;
                   }
                   if (p["burn_in"].is_number_unsigned() && p["steps"].is_number_unsigned() &&
                       p["burn_in"].get<std::uint64_t>() >= p["steps"].get<std::uint64_t>()) {
                     v.add("params.burn_in", "must be smaller than steps");
                   }
                 }});

    c.push_back({"transform-check", "Monte Carlo check of the transform identity for a random mean",
                 schema({concentration(), base_field("base", {{"kind", "uniform"}}, "base distribution"),
                         integrand_field(), numbers("u", "transform arguments").items(1).at_least(0).def({0.5, 1.0, 2.0}),
                         integer("n_sim", "Monte Carlo draws per u").at_least(2).def(100000),
                         integer("quad_points", "quadrature nodes").at_least(2).def(64)}),
                 always, nullptr});

    c.push_back({"quantile-estimate", "Bernstein and posterior-mean quantile curves with point masses",
                 schema({numbers("data", "distinct observations").items(1).req(),
                         numbers("levels", "quantile levels in (0,1)").items(1).at_least(0).at_most(1),
                         integer("grid_size", "levels i/(grid_size+1) when levels is absent").at_least(1).def(99),
                         number("b", "prior concentration; 0 gives the non-informative limit only").at_least(0).def(0.0),
                         base_field("base", nullptr, "prior guess F0, required when b > 0"),
                         numbers("mass_levels", "levels for which point masses are written").at_least(0).at_most(1)
                             .def({0.25, 0.5, 0.75})}),
                 never, [](json& p, Validator& v) {
                   if (p["b"].is_number() && p["b"].get<double>() > 0.0 && !has(p, "base")) {
                     v.add("params.base", "required when b > 0");
                   }
                 }});

    c.push_back({"density-estimate", "automatic density estimate on a grid",
                 schema({numbers("data", "distinct observations").items(3).req(),
                         grid("grid", "evaluation points"),
                         integer("grid_size", "even grid over the data range when grid is absent").at_least(2).def(101)}),
                 never, nullptr});

    c.push_back({"pyramid-fit", "posterior simulation for a quantile pyramid on [0,1]",
                 schema({integer("depth", "pyramid depth m").at_least(1).at_most(12).def(4),
                         numbers("data", "observations in [0,1]").at_least(0).at_most(1).def(json::array()),
                         choice("likelihood", {"interpolation", "substitute"}, "data likelihood").def("interpolation"),
                         variant("h",
                                 {{"uniform", schema({})},
                                  {"beta", schema({number("alpha", "first parameter").above(0).req(),
                                                   number("beta", "second parameter").above(0).req()})}},
                                 "level density")
                             .def({{"kind", "uniform"}}),
                         integer("iterations", "sweeps").at_least(1).def(10000),
                         integer("burn_in", "discarded sweeps").def(1000),
                         integer("thin", "keep every thin-th sweep").at_least(1).def(1),
                         number("proposal_scale", "random-walk half-width relative to the parent interval")
                             .above(0).def(0.5),
                         boolean("emit_draws", "write every retained pyramid").def(false)}),
                 always, [](json& p, Validator& v) {
                   if (p["burn_in"].is_number_unsigned() && p["iterations"].is_number_unsigned() &&
                       p["burn_in"].get<std::uint64_t>() >= p["iterations"].get<std::uint64_t>()) {
                     v.add("params.burn_in", "must be smaller than iterations");
                   }
                 }});

    c.push_back({"frailty-sim", "damage-process paths against the closed-form survival",
                 schema({number("theta", "multiplier").at_least(0).def(1.0), jump_field(),
                         object("rate", rate_schema(), "cumulative Poisson rate").def(json::object()),
                         numbers("times", "comparison times").items(1).at_least(0).def({0.5, 1.0, 2.0}),
                         number("t_max", "simulation horizon (default: largest time)").above(0),
                         integer("paths", "simulated paths").at_least(2).def(10000),
                         integer("emit_paths", "paths written in full").def(0),
                         object("regression",
                                schema({choice("structure", {"cox", "beta_multiplier"}, "hazard structure").req(),
                                        matrix("covariates", "one row per individual").req(),
                                        numbers("beta", "regression coefficients").req(),
                                        numbers("gamma", "logistic coefficients for mu(x)"),
                                        number("c", "Beta precision").above(0).def(1.0),
                                        number("theta", "common multiplier (cox)").at_least(0).def(1.0), jump_field(),
                                        object("baseline", rate_schema(), "baseline rate").def(json::object()),
                                        numbers("times", "evaluation times").items(1).at_least(0).def({0.5, 1.0, 2.0})}),
                                "covariate hazards")}),
                 always, [](json& p, Validator& v) {
                   if (!has(p, "t_max") && p["times"].is_array() && !p["times"].empty()) {
                     double t = 0.0;
                     for (const auto& x : p["times"]) {
                       if (x.is_number()) t = std::max(t, x.get<double>());
                     }
                     if (t > 0.0) p["t_max"] = t;
                     else v.add("params.t_max", "required when every time is 0");
                   }
                   if (has(p, "t_max") && p["times"].is_array()) {
                     for (const auto& x : p["times"]) {
                       if (x.is_number() && x.get<double>() > p["t_max"].get<double>()) {
                         v.add("params.times", "times must not exceed t_max");
                         break;
                       }
                     }
                   }
                   if (!has(p, "regression") || !p["regression"].is_object()) return;
                   const auto& r = p["regression"];
                   const std::size_t k = r.contains("beta") && r["beta"].is_array() ? r["beta"].size() : 0;
                   if (r.contains("covariates") && r["covariates"].is_array()) {
                     for (const auto& row : r["covariates"]) {
                       if (row.is_array() && row.size() != k) {
                         v.add("params.regression.covariates", "every row needs as many entries as beta");
                         break;
                       }
                     }
                   }
                   if (r.value("structure", "") == "beta_multiplier") {
                     if (!r.contains("gamma")) v.add("params.regression.gamma", "required for beta_multiplier");
                     else if (r["gamma"].is_array() && r["gamma"].size() != k)
                       v.add("params.regression.gamma", "needs as many entries as beta");
                   }
                 }});

    c.push_back({"localreg-fit", "local Bayesian regression curve",
                 schema({numbers("x", "covariates").items(1).req(), numbers("y", "responses").items(1).req(),
                         grid("grid", "evaluation points"),
                         integer("grid_size", "even grid over the x range when grid is absent").at_least(1).def(50),
                         number("h", "window width").above(0).req(),
                         choice("kernel", {"uniform", "epanechnikov", "triangular", "biweight"}, "kernel on [-1/2,1/2]")
                             .def("epanechnikov"),
                         object("prior",
                                schema({curve_field("m0", false, "prior guess curve"),
                                        curve_field("w0", true, "prior precision"),
                                        number("sigma", "noise sd (default: plug-in estimate)").above(0)}),
                                "local prior")
                             .def(json::object()),
                         boolean("empirical_bayes", "replace w0 by the plug-in constant").def(false),
                         object("hierarchical",
                                schema({numbers("xi_mean", "prior mean of (xi0, xi1)").exactly(2).def({0.0, 0.0}),
                                        matrix("xi_cov", "prior covariance of (xi0, xi1)").def({{1.0, 0.0}, {0.0, 1.0}}),
                                        integer("n_draws", "curves averaged").at_least(1).def(200)}),
                                "linear background prior on m0")}),
                 [](const json& p) { return has(p, "hierarchical"); },
                 [](json& p, Validator& v) {
                   if (p["x"].is_array() && p["y"].is_array() && p["x"].size() != p["y"].size()) {
                     v.add("params.y", "must have as many entries as x");
                   }
                   if (has(p, "hierarchical") && p["hierarchical"].contains("xi_cov")) {
                     const auto& m = p["hierarchical"]["xi_cov"];
                     if (!m.is_array() || m.size() != 2 || !m[0].is_array() || m[0].size() != 2 || !m[1].is_array() ||
                         m[1].size() != 2) {
                       v.add("params.hierarchical.xi_cov", "must be a 2 x 2 matrix");
                     }
                   }
                 }});

    c.push_back({"envelope", "predictive cdf of residuals and control-set factors",
                 schema({matrix("residuals", "standardized residuals, one row per posterior draw"),
                         object("model",
                                schema({numbers("y", "responses").items(1).req(),
                                        matrix("x", "covariate rows").req(),
                                        objects("draws",
                                                schema({numbers("beta", "coefficients").req(),
                                                        number("sigma", "scale").above(0).req()}),
                                                "posterior draws of (beta, sigma)")
                                            .items(1)
                                            .req()}),
                                "residuals computed from data and draws"),
                         number("b", "prior strength of G0").above(0).def(1.0),
                         base_field("g0", {{"kind", "normal"}}, "prior guess for the error law"),
                         number("w_override", "use this w_n instead of b/(b+n)").at_least(0).at_most(1),
                         grid("grid", "evaluation points").def({{"from", -4.0}, {"to", 4.0}, {"count", 81}}),
                         object("control",
                                schema({numbers("cuts", "increasing cut points").req(),
                                        numbers("z", "target cell masses").items(1).above(0).req(),
                                        number("b", "concentration for the factor (default: b)").above(0)}),
                                "control sets"),
                         object("location_scan",
                                schema({numbers("y", "observations").items(1).req(),
                                        number("sigma", "known scale").above(0).def(1.0),
                                        numbers("thetas", "candidate locations").items(1).req()}),
                                "log control factor over a location grid")}),
                 never, [](json& p, Validator& v) {
                   if (has(p, "residuals") && has(p, "model")) v.add("params", "give residuals or model, not both");
                   if (has(p, "control") && p["control"].contains("cuts") && p["control"].contains("z") &&
                       p["control"]["cuts"].is_array() && p["control"]["z"].is_array() &&
                       p["control"]["z"].size() != p["control"]["cuts"].size() + 1) {
                     v.add("params.control.z", "needs one more entry than cuts");
                   }
                   if (has(p, "location_scan") && !has(p, "control")) {
                     v.add("params.location_scan", "requires control");
                   }
                 }});
    return c;
  }();
  return table;
}

const CommandInfo* find_command(const std::string& name) {
  for (const auto& c : commands()) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

}  // namespace

ConfigError::ConfigError(std::string code, std::vector<Violation> violations)
    : std::runtime_error([&] {
        std::string msg = code;
        for (const auto& v : violations) msg += "; " + (v.path.empty() ? "" : v.path + ": ") + v.message;
        return msg;
      }()),
      code_(std::move(code)),
      violations_(std::move(violations)) {}

std::vector<std::string> command_names() {
  std::vector<std::string> names;
  for (const auto& c : commands()) names.push_back(c.name);
  return names;
}

bool is_command(const std::string& name) { return find_command(name) != nullptr; }

bool needs_seed(const std::string& command, const json& params) {
  const auto* c = find_command(command);
  return c != nullptr && c->stochastic(params);
}

RunConfig parse_config(const std::string& text, const std::string& command) {
  const auto* info = find_command(command);
  if (info == nullptr) throw ConfigError("unknown_command", {{"command", "unknown command '" + command + "'"}});

  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("malformed_json", {{"", e.what()}});
  }

  static const std::vector<std::string> top = {"version", "command", "seed", "params", "output", "format"};

  Validator v;
  RunConfig cfg;
  cfg.command = command;
  if (!doc.is_object()) throw ConfigError("schema_violation", {{"", "configuration must be a JSON object"}});

  for (const auto& [key, value] : doc.items()) {
    if (std::find(top.begin(), top.end(), key) == top.end()) {
      v.add(key, "unknown key '" + key + "'");
    }
  }
  if (!doc.contains("version")) {
    v.add("version", "missing required key 'version'");
  } else if (!doc["version"].is_number_integer() || doc["version"].get<long long>() != kConfigVersion) {
    v.add("version", "unsupported version; this build reads version " + std::to_string(kConfigVersion));
  }
  if (doc.contains("command") && (!doc["command"].is_string() || doc["command"].get<std::string>() != command)) {
    v.add("command", "document is for a different command than '" + command + "'");
  }
  if (doc.contains("seed")) {
    if (doc["seed"].is_number_unsigned() || (doc["seed"].is_number_integer() && doc["seed"].get<long long>() >= 0)) {
      cfg.seed = doc["seed"].get<std::uint64_t>();
    } else {
      v.add("seed", "expected an unsigned 64-bit integer");
    }
  }
  if (doc.contains("output")) {
    if (doc["output"].is_string() && !doc["output"].get<std::string>().empty()) {
      cfg.output = doc["output"].get<std::string>();
    } else {
      v.add("output", "expected a nonempty path string");
    }
  }
  if (doc.contains("format")) {
    if (doc["format"] == "csv") cfg.format = Format::csv;
    else if (doc["format"] == "json") cfg.format = Format::json;
    else v.add("format", "expected one of: csv, json");
  }

  const json params_in = doc.contains("params") ? doc["params"] : json::object();
  cfg.params = v.object(params_in, *info->params, "params");
  if (info->check) info->check(cfg.params, v);
  if (info->stochastic(cfg.params) && !doc.contains("seed")) {
    v.add("seed", "missing seed: '" + command + "' is stochastic and needs an explicit \"seed\"");
  }

  if (!v.violations.empty()) {
    const bool only_seed = v.violations.size() == 1 && v.violations.front().path == "seed" && !doc.contains("seed");
    throw ConfigError(only_seed ? "missing_seed" : "schema_violation", std::move(v.violations));
  }
  return cfg;
}

json resolved_document(const RunConfig& config) {
  json doc = {{"version", config.version}, {"command", config.command}, {"params", config.params}};
  if (config.seed) doc["seed"] = *config.seed;
  doc["format"] = config.format == Format::csv ? "csv" : "json";
  return doc;
}

json config_schema() {
  json defs = json::object();
  json branches = json::array();
  for (const auto& c : commands()) {
    json params = object_schema(*c.params);
    params["description"] = c.doc;
    defs[c.name] = params;
    branches.push_back({{"if", {{"properties", {{"command", {{"const", c.name}}}}}, {"required", {"command"}}}},
                        {"then", {{"properties", {{"params", {{"$ref", "#/definitions/" + c.name}}}}}}}});
  }
  json schema = {
      {"$schema", "http://json-schema.org/draft-07/schema#"},
      {"title", "npbayes run configuration"},
      {"description",
       "Document passed to `npbayes <command> --config <path>`. The params block is checked against the "
       "definition named after the command. Stochastic commands require seed."},
      {"type", "object"},
      {"additionalProperties", false},
      {"required", {"version"}},
      {"properties",
       {{"version", {{"type", "integer"}, {"const", kConfigVersion}}},
        {"command", {{"type", "string"}, {"enum", command_names()}}},
        {"seed", {{"type", "integer"}, {"minimum", 0}, {"maximum", 18446744073709551615ULL}}},
        {"params", {{"type", "object"}}},
        {"output", {{"type", "string"}, {"minLength", 1}}},
        {"format", {{"type", "string"}, {"enum", {"csv", "json"}}}}}},
      {"allOf", branches},
      {"definitions", defs}};
  return schema;
}

}  // namespace npbcli
