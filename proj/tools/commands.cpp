#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <numeric>

#include "npbayes/npbayes.h"

namespace npbcli {

namespace {

template <class T, void (*Destroy)(T*)>
struct Deleter {
  void operator()(T* p) const { Destroy(p); }
};
template <class T, void (*Destroy)(T*)>
using Handle = std::unique_ptr<T, Deleter<T, Destroy>>;

using Rng = Handle<npb_rng, npb_rng_destroy>;
using Base = Handle<npb_base, npb_base_destroy>;
using Dp = Handle<npb_dp, npb_dp_destroy>;
using Measure = Handle<npb_measure, npb_measure_destroy>;
using Density = Handle<npb_density, npb_density_destroy>;
using Chain = Handle<npb_pyramid_chain, npb_pyramid_chain_destroy>;
using Path = Handle<npb_path, npb_path_destroy>;
using Prior = Handle<npb_local_prior, npb_local_prior_destroy>;
using Fit = Handle<npb_local_fit, npb_local_fit_destroy>;

void check(npb_status s, const std::string& context) {
  if (s != NPB_OK) throw RunError(npb_status_string(s), context + ": " + npb_last_error_message());
}

template <class H, class F>
H create(F&& f, const std::string& context) {
  typename H::pointer raw = nullptr;
  check(f(&raw), context);
  return H(raw);
}

double num(const json& p, const char* key) { return p.at(key).get<double>(); }
std::uint64_t count(const json& p, const char* key) { return p.at(key).get<std::uint64_t>(); }
std::vector<double> vec(const json& p, const char* key) { return p.at(key).get<std::vector<double>>(); }
bool has(const json& p, const char* key) { return p.contains(key) && !p.at(key).is_null(); }

std::vector<double> grid_of(const json& g) {
  if (g.is_array()) return g.get<std::vector<double>>();
  const double from = num(g, "from");
  const double to = num(g, "to");
  const auto n = count(g, "count");
  std::vector<double> out(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    out[i] = n == 1 ? from : from + (to - from) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  if (n > 1) out.back() = to;
  return out;
}

std::vector<double> even_grid(double from, double to, std::uint64_t n) {
  return grid_of(json{{"from", from}, {"to", to}, {"count", n}});
}

Rng root_rng(const RunConfig& cfg) {
  return create<Rng>([&](npb_rng** out) { return npb_rng_create(cfg.seed.value_or(0), out); }, "rng");
}

Rng child(const Rng& parent, std::uint64_t stream) {
  return create<Rng>([&](npb_rng** out) { return npb_rng_split(parent.get(), stream, out); }, "rng");
}

Base make_base(const json& b) {
  const auto kind = b.at("kind").get<std::string>();
  return create<Base>(
      [&](npb_base** out) {
        if (kind == "uniform") return npb_base_uniform(num(b, "lo"), num(b, "hi"), out);
        if (kind == "normal") return npb_base_normal(num(b, "mean"), num(b, "sd"), out);
        const auto pts = vec(b, "points");
        return npb_base_empirical(pts.data(), pts.size(), out);
      },
      "base distribution");
}

Dp make_dp(const json& p, const Base& base) {
  return create<Dp>(
      [&](npb_dp** out) {
        if (has(p, "stick_a")) return npb_dp_create_sticks(num(p, "b"), base.get(), num(p, "stick_a"), num(p, "stick_b"), out);
        return npb_dp_create(num(p, "b"), base.get(), out);
      },
      "process parameters");
}

npb_integrand make_integrand(const json& g) {
  const auto kind = g.at("kind").get<std::string>();
  if (kind == "constant") return {NPB_G_CONSTANT, num(g, "value")};
  if (kind == "power") return {NPB_G_POWER, num(g, "exponent")};
  return {NPB_G_IDENTITY, 0.0};
}

std::vector<double> measure_array(const Measure& m, npb_status (*get)(const npb_measure*, double*, size_t)) {
  size_t n = 0;
  check(npb_measure_size(m.get(), &n), "measure");
  std::vector<double> out(n);
  check(get(m.get(), out.data(), n), "measure");
  return out;
}

// Type-7 sample quantile of sorted values.
double sample_quantile(const std::vector<double>& sorted, double y) {
  if (sorted.empty()) return std::nan("");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * y;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

struct Running {
  double n = 0.0, mean = 0.0, m2 = 0.0;
  void add(double x) {
    n += 1.0;
    const double d = x - mean;
    mean += d / n;
    m2 += d * (x - mean);
  }
  double variance() const { return n > 1.0 ? m2 / (n - 1.0) : std::nan(""); }
};

std::string fraction_label(std::uint64_t k, std::uint64_t denom) {
  const auto g = std::gcd(k, denom);
  return std::to_string(k / g) + "/" + std::to_string(denom / g);
}

// ---- commands

Result dp_sample(const RunConfig& cfg) {
  const auto& p = cfg.params;
  const auto root = root_rng(cfg);
  const auto base = make_base(p["base"]);
  auto dp = make_dp(p, base);
  if (has(p, "data")) {
    const auto data = vec(p, "data");
    dp = create<Dp>([&](npb_dp** out) { return npb_dp_posterior(dp.get(), data.data(), data.size(), out); },
                    "posterior update");
  }
  const auto method = p["method"].get<std::string>();
  const bool threshold = has(p, "threshold");

  Table draws{"draws", {"draw", "atoms", "mean", "residual_mass"}, {}};
  if (threshold) draws.columns.push_back("mass_at_or_below");
  Table atoms{"atoms", {"draw", "atom", "location", "weight"}, {}};
  for (std::uint64_t d = 0; d < count(p, "draws"); ++d) {
    const auto rng = child(root, d);
    const auto m = create<Measure>(
        [&](npb_measure** out) {
          if (method == "finite") return npb_dp_finite_sample(dp.get(), count(p, "m"), rng.get(), out);
          if (method == "random_m") return npb_dp_random_m_sample(dp.get(), num(p, "poisson_mean"), rng.get(), out);
          return npb_dp_stick_sample(dp.get(), num(p, "truncation_eps"), rng.get(), out);
        },
        "dp-sample draw " + std::to_string(d));
    const auto loc = measure_array(m, npb_measure_atoms);
    const auto w = measure_array(m, npb_measure_weights);
    double mean = 0.0, residual = 0.0;
    check(npb_measure_mean(m.get(), &mean), "measure mean");
    check(npb_measure_residual(m.get(), &residual), "measure");
    std::vector<Cell> row{d, static_cast<std::uint64_t>(loc.size()), mean, residual};
    if (threshold) {
      double below = 0.0;
      check(npb_measure_mass_below(m.get(), num(p, "threshold"), &below), "measure");
      row.push_back(below);
    }
    draws.add(std::move(row));
    if (p["emit_atoms"].get<bool>()) {
      for (std::size_t i = 0; i < loc.size(); ++i) atoms.add({d, static_cast<std::uint64_t>(i), loc[i], w[i]});
    }
  }
  Result r;
  r.long_form = true;
  double b = 0.0;
  check(npb_dp_concentration(dp.get(), &b), "process parameters");
  r.summary = {{"method", method}, {"concentration", b}, {"draws", count(p, "draws")}};
  r.tables.push_back(std::move(draws));
  if (p["emit_atoms"].get<bool>()) r.tables.push_back(std::move(atoms));
  return r;
}

struct MomentBase {
  npb_moment_base kind;
  double p1, p2, mean;
};

MomentBase moment_base(const json& b) {
  const auto kind = b.at("kind").get<std::string>();
  if (kind == "uniform") return {NPB_MOMENTS_UNIFORM, num(b, "lo"), num(b, "hi"), 0.5 * (num(b, "lo") + num(b, "hi"))};
  if (kind == "normal") return {NPB_MOMENTS_NORMAL, num(b, "mean"), num(b, "sd"), num(b, "mean")};
  return {NPB_MOMENTS_POINT, num(b, "location"), 0.0, num(b, "location")};
}

std::pair<double, double> stick_law(const json& p) {
  if (has(p, "stick_a")) return {num(p, "stick_a"), num(p, "stick_b")};
  return {1.0, num(p, "b")};
}

std::vector<double> recursion(const MomentBase& base, const json& p, int p_max, npb_arithmetic mode) {
  const auto [a, b] = stick_law(p);
  std::vector<double> m(static_cast<std::size_t>(p_max) + 1);
  check(npb_central_moments(base.kind, base.p1, base.p2, a, b, p_max, mode, m.data()), "moment recursion");
  return m;
}

Result mean_moments(const RunConfig& cfg) {
  const auto& p = cfg.params;
  const auto base = moment_base(p["base"]);
  const auto arith = p["arithmetic"].get<std::string>();
  const npb_arithmetic mode = arith == "exact" ? NPB_ARITH_EXACT : arith == "float" ? NPB_ARITH_FLOAT : NPB_ARITH_AUTO;
  const int p_max = static_cast<int>(count(p, "p_max"));
  const auto m = recursion(base, p, p_max, mode);
  Table t{"moments", {"p", "central_moment"}, {}};
  for (int k = 0; k <= p_max; ++k) t.add({static_cast<std::int64_t>(k), m[static_cast<std::size_t>(k)]});
  Result r;
  r.summary = {{"mean", base.mean}, {"variance", m.size() > 2 ? m[2] : std::nan("")}};
  r.tables.push_back(std::move(t));
  return r;
}

Result mean_chain(const RunConfig& cfg) {
  const auto& p = cfg.params;
  const auto rng = root_rng(cfg);
  const auto base = make_base(p["base"]);
  const auto dp = make_dp(p, base);
  const auto g = make_integrand(p["g"]);
  const auto steps = count(p, "steps");
  const auto burn = count(p, "burn_in");
  std::vector<double> chain(steps - burn);
  check(npb_mean_chain(dp.get(), g, steps, burn, rng.get(), chain.data(), chain.size()), "mean-chain");

  Result r;
  if (p["table"] == "samples") {
    Table t{"samples", {"step", "theta"}, {}};
    for (std::size_t i = 0; i < chain.size(); ++i) t.add({static_cast<std::uint64_t>(burn + i + 1), chain[i]});
    r.tables.push_back(std::move(t));
  }

  // The recursion applies when Y = g(X) has a uniform, normal or point law.
  const auto kind = p["base"]["kind"].get<std::string>();
  std::optional<MomentBase> mb;
  if (g.kind == NPB_G_IDENTITY && kind != "empirical") mb = moment_base(p["base"]);
  if (g.kind == NPB_G_CONSTANT) mb = MomentBase{NPB_MOMENTS_POINT, g.param, 0.0, g.param};
  const int p_max = static_cast<int>(count(p, "p_max"));
  const double centre = mb ? mb->mean : std::accumulate(chain.begin(), chain.end(), 0.0) / static_cast<double>(chain.size());
  std::vector<double> emp(static_cast<std::size_t>(p_max) + 1);
  check(npb_empirical_central_moments(chain.data(), chain.size(), centre, p_max, emp.data()), "chain moments");
  std::vector<double> rec;
  if (mb) rec = recursion(*mb, p, p_max, NPB_ARITH_AUTO);
  if (p["table"] == "moments") {
    Table t{"moments", {"p", "chain", "recursion"}, {}};
    for (int k = 1; k <= p_max; ++k) {
      const auto i = static_cast<std::size_t>(k);
      t.add({static_cast<std::int64_t>(k), emp[i], mb ? Cell{rec[i]} : Cell{}});
    }
    r.tables.push_back(std::move(t));
  }
  r.summary = {{"retained", static_cast<std::uint64_t>(chain.size())}, {"centre", centre},
               {"chain_variance", p_max >= 2 ? emp[2] : std::nan("")}};
  return r;
}

Result transform_check(const RunConfig& cfg) {
  const auto& p = cfg.params;
  const auto root = root_rng(cfg);
  const auto base = make_base(p["base"]);
  const auto dp = make_dp(p, base);
  const auto g = make_integrand(p["g"]);
  const auto us = vec(p, "u");
  Table t{"transform", {"u", "lhs_mc", "mc_se", "rhs_exact", "z", "within_3se"}, {}};
  std::uint64_t inside = 0;
  for (std::size_t i = 0; i < us.size(); ++i) {
    const auto rng = child(root, i);
    npb_transform_report rep{};
    check(npb_transform_check(dp.get(), g, us[i], count(p, "n_sim"), count(p, "quad_points"), rng.get(), &rep),
          "transform-check");
    const double z = (rep.lhs_mc - rep.rhs_exact) / rep.mc_se;
    const bool ok = std::fabs(rep.lhs_mc - rep.rhs_exact) <= 3.0 * rep.mc_se;
    inside += ok ? 1 : 0;
    t.add({rep.u, rep.lhs_mc, rep.mc_se, rep.rhs_exact, z, static_cast<std::int64_t>(ok ? 1 : 0)});
  }
  Result r;
  r.summary = {{"within_3se", std::to_string(inside) + "/" + std::to_string(us.size())}};
  r.tables.push_back(std::move(t));
  return r;
}

Result quantile_estimate(const RunConfig& cfg) {
  const auto& p = cfg.params;
  auto data = vec(p, "data");
  std::vector<double> levels;
  if (has(p, "levels")) {
    levels = vec(p, "levels");
  } else {
    const auto n = count(p, "grid_size");
    for (std::uint64_t i = 1; i <= n; ++i) levels.push_back(static_cast<double>(i) / static_cast<double>(n + 1));
  }
  const double b = num(p, "b");
  Base base;
  if (b > 0.0) base = make_base(p["base"]);

  Table curve{"curve", {"y", "bernstein", "bernstein_derivative"}, {}};
  if (b > 0.0) curve.columns.push_back("posterior_mean");
  for (double y : levels) {
    double q = 0.0, dq = 0.0;
    check(npb_bernstein_quantile(data.data(), data.size(), y, &q), "Bernstein quantile");
    check(npb_bernstein_quantile_derivative(data.data(), data.size(), y, &dq), "Bernstein derivative");
    std::vector<Cell> row{y, q, dq};
    if (b > 0.0) {
      double pm = 0.0;
      check(npb_quantile_posterior_mean(data.data(), data.size(), y, b, base.get(), &pm), "posterior mean");
      row.push_back(pm);
    }
    curve.add(std::move(row));
  }

  std::sort(data.begin(), data.end());
  Table masses{"masses", {"y", "i", "order_statistic", "mass"}, {}};
  for (double y : vec(p, "mass_levels")) {
    std::vector<double> w(data.size());
    check(npb_noninf_point_masses(y, data.size(), w.data(), w.size()), "point masses");
    for (std::size_t i = 0; i < w.size(); ++i) masses.add({y, static_cast<std::uint64_t>(i + 1), data[i], w[i]});
  }
  Result r;
  r.long_form = true;
  r.summary = {{"n", static_cast<std::uint64_t>(data.size())}, {"b", b}};
  r.tables.push_back(std::move(curve));
  r.tables.push_back(std::move(masses));
  return r;
}

Result density_estimate(const RunConfig& cfg) {
  const auto& p = cfg.params;
  const auto data = vec(p, "data");
  const auto density =
      create<Density>([&](npb_density** out) { return npb_density_create(data.data(), data.size(), out); }, "density");
  const auto [lo, hi] = std::minmax_element(data.begin(), data.end());
  const auto grid = has(p, "grid") ? grid_of(p["grid"]) : even_grid(*lo, *hi, count(p, "grid_size"));
  Table t{"density", {"x", "density", "cdf"}, {}};
  for (double x : grid) {
    double f = 0.0, F = 0.0;
    check(npb_density_eval(density.get(), x, &f), "density");
    check(npb_density_cdf(density.get(), x, &F), "density cdf");
    t.add({x, f, F});
  }
  double f_lo = 0.0, f_hi = 0.0;
  check(npb_density_eval(density.get(), *lo, &f_lo), "density");
  check(npb_density_eval(density.get(), *hi, &f_hi), "density");
  Result r;
  r.summary = {{"density_at_min", f_lo}, {"density_at_max", f_hi}};
  r.tables.push_back(std::move(t));
  return r;
}

Result pyramid_fit(const RunConfig& cfg) {
  const auto& p = cfg.params;
  const auto rng = root_rng(cfg);
  const int depth = static_cast<int>(count(p, "depth"));
  const auto& hj = p["h"];
  npb_level_density h{NPB_LEVEL_UNIFORM, 1.0, 1.0};
  if (hj["kind"] == "beta") h = {NPB_LEVEL_BETA, num(hj, "alpha"), num(hj, "beta")};
  auto data = vec(p, "data");
  npb_pyramid_options o = npb_pyramid_default_options();
  o.iterations = count(p, "iterations");
  o.burn_in = count(p, "burn_in");
  o.thin = count(p, "thin");
  o.proposal_scale = num(p, "proposal_scale");
  const auto lik = p["likelihood"] == "substitute" ? NPB_PYR_SUBSTITUTE : NPB_PYR_INTERPOLATION;
  const auto chain = create<Chain>(
      [&](npb_pyramid_chain** out) { return npb_pyramid_sample(depth, h, data.data(), data.size(), lik, &o, rng.get(), out); },
      "pyramid sampler");

  size_t n_draws = 0;
  check(npb_pyramid_chain_size(chain.get(), &n_draws), "pyramid chain");
  const std::uint64_t denom = std::uint64_t{1} << depth;
  const std::size_t nodes = denom - 1;
  std::vector<std::vector<double>> by_node(nodes, std::vector<double>(n_draws));
  std::vector<std::size_t> iterations(n_draws);
  std::vector<double> values(nodes);
  for (std::size_t d = 0; d < n_draws; ++d) {
    check(npb_pyramid_chain_draw(chain.get(), d, &iterations[d], values.data(), values.size()), "pyramid chain");
    for (std::size_t k = 0; k < nodes; ++k) by_node[k][d] = values[k];
  }
  std::sort(data.begin(), data.end());

  std::vector<std::string> labels;
  for (std::uint64_t k = 1; k < denom; ++k) labels.push_back(fraction_label(k, denom));

  Table summary{"nodes", {"node", "label", "y", "level", "mean", "sd", "q025", "q975", "sample_quantile"}, {}};
  for (std::uint64_t k = 1; k < denom; ++k) {
    auto v = by_node[k - 1];
    Running acc;
    for (double x : v) acc.add(x);
    std::sort(v.begin(), v.end());
    const double y = static_cast<double>(k) / static_cast<double>(denom);
    const auto level = static_cast<std::int64_t>(depth - __builtin_ctzll(k));
    summary.add({k, labels[k - 1], y, level, acc.mean, std::sqrt(acc.variance()), sample_quantile(v, 0.025),
                 sample_quantile(v, 0.975), sample_quantile(data, y)});
  }
  double acceptance = 0.0;
  check(npb_pyramid_chain_acceptance(chain.get(), &acceptance), "pyramid chain");
  Table stats{"chain", {"acceptance_rate", "retained"}, {}};
  stats.add({acceptance, static_cast<std::uint64_t>(n_draws)});

  Result r;
  r.long_form = true;
  r.summary = {{"acceptance_rate", acceptance}, {"retained", static_cast<std::uint64_t>(n_draws)}};
  r.tables.push_back(std::move(summary));
  r.tables.push_back(std::move(stats));
  if (p["emit_draws"].get<bool>()) {
    Table draws{"draws", {"iteration"}, {}};
    for (const auto& l : labels) draws.columns.push_back(l);
    for (std::size_t d = 0; d < n_draws; ++d) {
      std::vector<Cell> row{static_cast<std::uint64_t>(iterations[d])};
      for (std::size_t k = 0; k < nodes; ++k) row.push_back(by_node[k][d]);
      draws.add(std::move(row));
    }
    r.tables.push_back(std::move(draws));
  }
  return r;
}

void jump_of(const json& j, npb_jump_kind& kind, double& p1, double& p2) {
  const auto k = j.at("kind").get<std::string>();
  p2 = 0.0;
  if (k == "gamma") {
    kind = NPB_JUMP_GAMMA;
    p1 = num(j, "nu");
  } else if (k == "point") {
    kind = NPB_JUMP_POINT;
    p1 = num(j, "size");
  } else {
    kind = NPB_JUMP_BETA_RISK;
    p1 = num(j, "alpha");
    p2 = num(j, "beta");
  }
}

Result frailty_sim(const RunConfig& cfg) {
  const auto& p = cfg.params;
  const auto root = root_rng(cfg);
  npb_frailty_spec spec{};
  spec.theta = num(p, "theta");
  jump_of(p["jump"], spec.jump, spec.jump_p1, spec.jump_p2);
  spec.kappa = num(p["rate"], "kappa");
  spec.exponent = num(p["rate"], "exponent");
  const auto times = vec(p, "times");
  const double t_max = num(p, "t_max");
  const auto n_paths = count(p, "paths");
  const auto emit = count(p, "emit_paths");

  std::vector<Running> surv(times.size()), jumps(times.size());
  Table paths{"paths", {"path", "jump", "time", "level"}, {}};
  std::vector<double> jt, lv;
  for (std::uint64_t i = 0; i < n_paths; ++i) {
    const auto rng = child(root, i);
    const auto path = create<Path>([&](npb_path** out) { return npb_frailty_simulate(&spec, t_max, rng.get(), out); },
                                   "frailty path");
    size_t n = 0;
    check(npb_path_size(path.get(), &n), "path");
    jt.resize(n);
    lv.resize(n);
    check(npb_path_times(path.get(), jt.data(), n), "path");
    check(npb_path_levels(path.get(), lv.data(), n), "path");
    for (std::size_t k = 0; k < times.size(); ++k) {
      const auto below = static_cast<std::size_t>(std::upper_bound(jt.begin(), jt.end(), times[k]) - jt.begin());
      surv[k].add(std::exp(below == 0 ? 0.0 : -lv[below - 1]));
      jumps[k].add(static_cast<double>(below));
    }
    if (i < emit) {
      for (std::size_t j = 0; j < n; ++j) paths.add({i, static_cast<std::uint64_t>(j + 1), jt[j], lv[j]});
    }
  }

  Table cmp{"survival",
            {"t", "mc_survival", "mc_se", "closed_form", "z", "mean_jumps", "expected_jumps", "hazard"},
            {}};
  for (std::size_t k = 0; k < times.size(); ++k) {
    double s = 0.0, h = 0.0;
    check(npb_frailty_survival(&spec, times[k], &s), "marginal survival");
    check(npb_frailty_hazard(&spec, times[k], &h), "hazard");
    const double se = std::sqrt(surv[k].variance() / surv[k].n);
    const double expected = spec.kappa * std::pow(times[k], spec.exponent);
    cmp.add({times[k], surv[k].mean, se, s, (surv[k].mean - s) / se, jumps[k].mean, expected, h});
  }
  double thin = 0.0;
  check(npb_frailty_thinning(&spec, &thin), "thinning factor");

  Result r;
  r.long_form = true;
  r.summary = {{"thinning_factor", thin}, {"paths", n_paths}};
  r.tables.push_back(std::move(cmp));
  if (emit > 0) r.tables.push_back(std::move(paths));

  if (has(p, "regression")) {
    const auto& rg = p["regression"];
    const auto beta = vec(rg, "beta");
    const auto gamma = has(rg, "gamma") ? vec(rg, "gamma") : std::vector<double>(beta.size(), 0.0);
    const auto rows = rg["covariates"].get<std::vector<std::vector<double>>>();
    std::vector<double> flat;
    for (const auto& row : rows) flat.insert(flat.end(), row.begin(), row.end());
    npb_regression_spec rs{};
    rs.structure = rg["structure"] == "cox" ? NPB_HAZARD_COX : NPB_HAZARD_BETA_MULTIPLIER;
    rs.kappa = num(rg["baseline"], "kappa");
    rs.exponent = num(rg["baseline"], "exponent");
    rs.beta = beta.data();
    rs.p = beta.size();
    rs.theta = num(rg, "theta");
    jump_of(rg["jump"], rs.jump, rs.jump_p1, rs.jump_p2);
    rs.gamma = gamma.data();
    rs.c = num(rg, "c");
    Table t{"regression", {"individual", "s", "hazard", "survival", "ratio_to_first"}, {}};
    std::vector<double> hz(rows.size()), sv(rows.size());
    for (double s : vec(rg, "times")) {
      check(npb_regression_hazards(&rs, flat.data(), rows.size(), s, hz.data(), sv.data()), "regression hazards");
      for (std::size_t i = 0; i < rows.size(); ++i) {
        t.add({static_cast<std::uint64_t>(i), s, hz[i], sv[i], hz[i] / hz[0]});
      }
    }
    r.tables.push_back(std::move(t));
  }
  return r;
}

npb_kernel kernel_of(const std::string& k) {
  if (k == "uniform") return NPB_KERNEL_UNIFORM;
  if (k == "triangular") return NPB_KERNEL_TRIANGULAR;
  if (k == "biweight") return NPB_KERNEL_BIWEIGHT;
  return NPB_KERNEL_EPANECHNIKOV;
}

Result localreg_fit(const RunConfig& cfg) {
  const auto& p = cfg.params;
  const auto x = vec(p, "x");
  const auto y = vec(p, "y");
  const double h = num(p, "h");
  const auto kernel = kernel_of(p["kernel"].get<std::string>());
  const auto& pj = p["prior"];
  double sigma = 0.0;
  std::string source = "fixed";
  if (has(pj, "sigma")) {
    sigma = num(pj, "sigma");
  } else {
    check(npb_plugin_sigma(x.data(), y.data(), x.size(), h, kernel, &sigma), "plug-in sigma");
    source = "plugin";
  }
  const auto prior =
      create<Prior>([&](npb_local_prior** out) { return npb_local_prior_create(sigma, out); }, "local prior");
  const auto& m0 = pj["m0"];
  if (m0["kind"] == "constant") {
    check(npb_local_prior_m0_linear(prior.get(), num(m0, "value"), 0.0), "prior m0");
  } else if (m0["kind"] == "linear") {
    check(npb_local_prior_m0_linear(prior.get(), num(m0, "xi0"), num(m0, "xi1")), "prior m0");
  } else {
    const auto xs = vec(m0, "x"), vs = vec(m0, "values");
    if (xs.size() != vs.size()) throw RunError("invalid argument", "prior m0: x and values lengths differ");
    check(npb_local_prior_m0_table(prior.get(), xs.data(), vs.data(), xs.size()), "prior m0");
  }
  const auto& w0 = pj["w0"];
  if (w0["kind"] == "constant") {
    check(npb_local_prior_w0_constant(prior.get(), num(w0, "value")), "prior w0");
  } else {
    const auto xs = vec(w0, "x"), vs = vec(w0, "values");
    if (xs.size() != vs.size()) throw RunError("invalid argument", "prior w0: x and values lengths differ");
    check(npb_local_prior_w0_table(prior.get(), xs.data(), vs.data(), xs.size()), "prior w0");
  }
  npb_fit_options o{};
  o.empirical_bayes = p["empirical_bayes"].get<bool>() ? 1 : 0;
  Rng rng;
  if (has(p, "hierarchical")) {
    const auto& hj = p["hierarchical"];
    o.hierarchical = 1;
    const auto mean = vec(hj, "xi_mean");
    const auto cov = hj["xi_cov"].get<std::vector<std::vector<double>>>();
    o.xi_mean[0] = mean[0];
    o.xi_mean[1] = mean[1];
    o.xi_cov[0] = cov[0][0];
    o.xi_cov[1] = cov[0][1];
    o.xi_cov[2] = cov[1][0];
    o.xi_cov[3] = cov[1][1];
    o.n_draws = count(hj, "n_draws");
    rng = root_rng(cfg);
  }
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  const auto grid = has(p, "grid") ? grid_of(p["grid"]) : even_grid(*lo, *hi, count(p, "grid_size"));
  const auto fit = create<Fit>(
      [&](npb_local_fit** out) {
        return npb_local_fit_create(x.data(), y.data(), x.size(), grid.data(), grid.size(), h, kernel, prior.get(), &o,
                                    rng.get(), out);
      },
      "localreg-fit");
  Table t{"fit", {"x", "mean", "sd", "s0", "m_tilde"}, {}};
  std::uint64_t gaps = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    npb_local_fit_row row{};
    check(npb_local_fit_row_at(fit.get(), i, &row), "local fit");
    gaps += row.gap ? 1 : 0;
    t.add({row.x, row.mean, row.sd, row.s0, row.m_tilde});
  }
  int has_w = 0;
  double w_hat = 0.0;
  check(npb_local_fit_w0_hat(fit.get(), &has_w, &w_hat), "local fit");
  Result r;
  r.summary = {{"sigma", sigma}, {"sigma_source", source}, {"gaps", gaps}};
  if (has_w) r.summary.emplace_back("w0_hat", w_hat);
  r.tables.push_back(std::move(t));
  return r;
}

Result envelope(const RunConfig& cfg) {
  const auto& p = cfg.params;
  std::vector<std::vector<double>> draws;
  if (has(p, "residuals")) {
    draws = p["residuals"].get<std::vector<std::vector<double>>>();
  } else if (has(p, "model")) {
    const auto& m = p["model"];
    const auto y = vec(m, "y");
    const auto xr = m["x"].get<std::vector<std::vector<double>>>();
    if (xr.size() != y.size()) throw RunError("invalid argument", "model: x needs one row per response");
    std::vector<double> flat;
    for (const auto& row : xr) flat.insert(flat.end(), row.begin(), row.end());
    const std::size_t k = xr.front().size();
    for (const auto& d : m["draws"]) {
      const auto beta = vec(d, "beta");
      if (beta.size() != k) throw RunError("invalid argument", "model: beta length differs from the covariate rows");
      std::vector<double> r(y.size());
      check(npb_standardized_residuals(y.data(), flat.data(), y.size(), k, beta.data(), num(d, "sigma"), r.data()),
            "residuals");
      draws.push_back(std::move(r));
    }
  }
  const std::size_t n = draws.empty() ? 0 : draws.front().size();
  std::vector<double> flat;
  for (const auto& d : draws) {
    if (d.size() != n) throw RunError("invalid argument", "residual draws have different lengths");
    flat.insert(flat.end(), d.begin(), d.end());
  }
  const auto g0 = make_base(p["g0"]);
  const double b = num(p, "b");
  const double w_override = has(p, "w_override") ? num(p, "w_override") : std::nan("");
  const auto grid = grid_of(p["grid"]);
  std::vector<double> cdf(grid.size());
  check(npb_predictive_cdf(flat.data(), draws.size(), n, b, g0.get(), w_override, grid.data(), grid.size(), cdf.data()),
        "predictive cdf");
  Table t{"cdf", {"t", "g_hat"}, {}};
  for (std::size_t i = 0; i < grid.size(); ++i) t.add({grid[i], cdf[i]});

  Result r;
  r.long_form = true;
  const double w = std::isnan(w_override) ? b / (b + static_cast<double>(n)) : w_override;
  r.summary = {{"n", static_cast<std::uint64_t>(n)}, {"draws", static_cast<std::uint64_t>(draws.size())}, {"w_n", w}};
  r.tables.push_back(std::move(t));

  if (has(p, "control")) {
    const auto& c = p["control"];
    const auto cuts = vec(c, "cuts");
    const auto z = vec(c, "z");
    const double bc = has(c, "b") ? num(c, "b") : b;
    const auto log_factor = [&](const std::vector<double>& res, std::vector<std::uint64_t>& counts) {
      counts.assign(z.size(), 0);
      check(npb_partition_counts(cuts.data(), cuts.size(), res.data(), res.size(), counts.data()), "control cells");
      double lf = 0.0;
      check(npb_control_log_factor(counts.data(), z.data(), z.size(), bc, &lf), "control factor");
      return lf;
    };
    Table ct{"control", {"draw", "log_factor"}, {}};
    for (std::size_t j = 0; j < z.size(); ++j) ct.columns.push_back("n_" + std::to_string(j + 1));
    std::vector<std::uint64_t> counts;
    for (std::size_t d = 0; d < draws.size(); ++d) {
      std::vector<Cell> row{static_cast<std::uint64_t>(d), log_factor(draws[d], counts)};
      for (auto v : counts) row.push_back(v);
      ct.add(std::move(row));
    }
    r.tables.push_back(std::move(ct));

    if (has(p, "location_scan")) {
      const auto& s = p["location_scan"];
      const auto y = vec(s, "y");
      const double sigma = num(s, "sigma");
      Table st{"scan", {"theta", "log_factor", "tv_distance"}, {}};
      double best = -HUGE_VAL, best_theta = std::nan("");
      const std::vector<double> ones(y.size(), 1.0);
      for (double theta : vec(s, "thetas")) {
        std::vector<double> res(y.size());
        check(npb_standardized_residuals(y.data(), ones.data(), y.size(), 1, &theta, sigma, res.data()), "residuals");
        const double lf = log_factor(res, counts);
        double tv = 0.0;
        for (std::size_t j = 0; j < z.size(); ++j) {
          tv += std::fabs(static_cast<double>(counts[j]) / static_cast<double>(y.size()) - z[j]);
        }
        st.add({theta, lf, 0.5 * tv});
        if (lf > best) {
          best = lf;
          best_theta = theta;
        }
      }
      r.summary.emplace_back("best_theta", best_theta);
      r.tables.push_back(std::move(st));
    }
  }
  return r;
}

}  // namespace

Result run_command(const RunConfig& config) {
  static const std::map<std::string, std::function<Result(const RunConfig&)>> dispatch = {
      {"dp-sample", dp_sample},
      {"mean-moments", mean_moments},
      {"mean-chain", mean_chain},
      {"transform-check", transform_check},
      {"quantile-estimate", quantile_estimate},
      {"density-estimate", density_estimate},
      {"pyramid-fit", pyramid_fit},
      {"frailty-sim", frailty_sim},
      {"localreg-fit", localreg_fit},
      {"envelope", envelope}};
  const auto it = dispatch.find(config.command);
  if (it == dispatch.end()) throw RunError("unknown_command", "unknown command '" + config.command + "'");
  return it->second(config);
}

}  // namespace npbcli
