#include "npbayes/npbayes.h"

#include <cmath>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "npbayes/base_distribution.hpp"
#include "npbayes/dp.hpp"
#include "npbayes/envelope.hpp"
#include "npbayes/error.hpp"
#include "npbayes/frailty.hpp"
#include "npbayes/localreg.hpp"
#include "npbayes/means.hpp"
#include "npbayes/pyramid.hpp"
#include "npbayes/quantile.hpp"
#include "npbayes/randkit.hpp"

struct npb_rng {
  npbayes::RngState state;
};
struct npb_base {
  npbayes::BaseDistribution dist;
};
struct npb_dp {
  npbayes::DPParams params;
};
struct npb_measure {
  npbayes::AtomicMeasure measure;
};
struct npb_qlaw {
  npbayes::QuantilePosteriorLaw law;
};
struct npb_density {
  npbayes::AutomaticDensity density;
};
struct npb_pyramid_chain {
  npbayes::PyramidChain chain;
};
struct npb_path {
  npbayes::DamagePath path;
};
struct npb_local_prior {
  npbayes::LocalPrior prior;
};
struct npb_local_fit {
  npbayes::LocalFit fit;
};

namespace {

using namespace npbayes;

thread_local std::string g_last_error;

struct StatusError {
  npb_status status;
  std::string message;
};

[[noreturn]] void raise(npb_status status, std::string message) { throw StatusError{status, std::move(message)}; }

template <class T>
T* need(T* p, const char* what) {
  if (p == nullptr) raise(NPB_ERR_NULL_POINTER, std::string(what) + " is null");
  return p;
}

npb_status from_errc(Errc code) {
  switch (code) {
    case Errc::domain_error:
      return NPB_ERR_DOMAIN;
    case Errc::invalid_argument:
      return NPB_ERR_INVALID_ARGUMENT;
    case Errc::numerical_failure:
      return NPB_ERR_NUMERICAL;
    case Errc::limit_exceeded:
      return NPB_ERR_LIMIT;
    case Errc::unsupported:
      return NPB_ERR_UNSUPPORTED;
  }
  return NPB_ERR_INTERNAL;
}

template <class F>
npb_status guard(F&& body) {
  try {
    body();
    return NPB_OK;
  } catch (const StatusError& e) {
    g_last_error = e.message;
    return e.status;
  } catch (const Error& e) {
    g_last_error = e.what();
    return from_errc(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return NPB_ERR_LIMIT;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return NPB_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown failure";
    return NPB_ERR_INTERNAL;
  }
}

template <class T, class... Args>
void make(T** out, Args&&... args) {
  need(out, "output handle");
  *out = nullptr;
  *out = new T{std::forward<Args>(args)...};
}

void copy_out(const std::vector<double>& src, double* out, std::size_t capacity) {
  need(out, "output array");
  if (capacity < src.size()) raise(NPB_ERR_BUFFER_TOO_SMALL, "output array too small");
  std::copy(src.begin(), src.end(), out);
}

std::vector<double> array(const double* p, std::size_t n, const char* what) {
  if (n == 0) return {};
  need(p, what);
  return std::vector<double>(p, p + n);
}

Integrand integrand(npb_integrand g) {
  switch (g.kind) {
    case NPB_G_IDENTITY:
      return Integrand::identity();
    case NPB_G_CONSTANT:
      return Integrand::constant(g.param);
    case NPB_G_POWER:
      return Integrand::power(g.param);
  }
  raise(NPB_ERR_INVALID_ARGUMENT, "unknown integrand kind");
}

LevelDensity level_density(npb_level_density h) {
  switch (h.kind) {
    case NPB_LEVEL_UNIFORM:
      return LevelDensity::uniform();
    case NPB_LEVEL_BETA:
      return LevelDensity::beta(h.alpha, h.beta);
  }
  raise(NPB_ERR_INVALID_ARGUMENT, "unknown level density kind");
}

PyramidLikelihood pyramid_likelihood(npb_pyramid_likelihood l) {
  switch (l) {
    case NPB_PYR_INTERPOLATION:
      return PyramidLikelihood::interpolation;
    case NPB_PYR_SUBSTITUTE:
      return PyramidLikelihood::substitute;
  }
  raise(NPB_ERR_INVALID_ARGUMENT, "unknown pyramid likelihood");
}

Pyramid pyramid(int depth, const double* values) {
  if (depth < 1 || depth > 20) raise(NPB_ERR_DOMAIN, "pyramid depth must lie in 1..20");
  const std::size_t nodes = (std::size_t{1} << depth) - 1;
  return Pyramid(depth, array(need(values, "pyramid values"), nodes, "pyramid values"));
}

JumpLaw jump_law(npb_jump_kind kind, double p1, double p2) {
  switch (kind) {
    case NPB_JUMP_GAMMA:
      return JumpLaw::gamma(p1);
    case NPB_JUMP_POINT:
      return JumpLaw::point_mass(p1);
    case NPB_JUMP_BETA_RISK:
      return JumpLaw::beta_risk(p1, p2);
  }
  raise(NPB_ERR_INVALID_ARGUMENT, "unknown jump law");
}

FrailtySpec frailty_spec(const npb_frailty_spec* s) {
  need(s, "frailty spec");
  FrailtySpec spec;
  spec.theta = s->theta;
  spec.jump = jump_law(s->jump, s->jump_p1, s->jump_p2);
  spec.rate = CumulativeRate::power(s->kappa, s->exponent);
  validate(spec);
  return spec;
}

Kernel kernel_of(npb_kernel k) {
  switch (k) {
    case NPB_KERNEL_UNIFORM:
      return Kernel::uniform;
    case NPB_KERNEL_EPANECHNIKOV:
      return Kernel::epanechnikov;
    case NPB_KERNEL_TRIANGULAR:
      return Kernel::triangular;
    case NPB_KERNEL_BIWEIGHT:
      return Kernel::biweight;
  }
  raise(NPB_ERR_INVALID_ARGUMENT, "unknown kernel");
}

RegressionData regression_data(const double* xs, const double* ys, std::size_t n) {
  return RegressionData(array(xs, n, "x"), array(ys, n, "y"));
}

std::vector<std::vector<double>> rows(const double* m, std::size_t n, std::size_t p, const char* what) {
  std::vector<std::vector<double>> out(n);
  if (n > 0 && p > 0) need(m, what);
  for (std::size_t i = 0; i < n; ++i) out[i].assign(m + i * p, m + (i + 1) * p);
  return out;
}

template <class T>
void set(T* out, T value) {
  *need(out, "output") = value;
}

}  // namespace

extern "C" {

const char* npb_last_error_message(void) { return g_last_error.c_str(); }

const char* npb_status_string(npb_status status) {
  switch (status) {
    case NPB_OK:
      return "ok";
    case NPB_ERR_DOMAIN:
      return "domain error";
    case NPB_ERR_INVALID_ARGUMENT:
      return "invalid argument";
    case NPB_ERR_NUMERICAL:
      return "numerical failure";
    case NPB_ERR_LIMIT:
      return "limit exceeded";
    case NPB_ERR_UNSUPPORTED:
      return "unsupported";
    case NPB_ERR_NULL_POINTER:
      return "null pointer";
    case NPB_ERR_BUFFER_TOO_SMALL:
      return "buffer too small";
    case NPB_ERR_INTERNAL:
      return "internal error";
  }
  return "unknown status";
}

const char* npb_version(void) { return "0.1.0"; }

// ---- random numbers and special functions

npb_status npb_rng_create(uint64_t seed, npb_rng** out) {
  return guard([&] { make(out, RngState(seed)); });
}

void npb_rng_destroy(npb_rng* rng) { delete rng; }

npb_status npb_rng_split(const npb_rng* rng, uint64_t stream, npb_rng** out) {
  return guard([&] { make(out, need(rng, "rng")->state.split(stream)); });
}

npb_status npb_rng_uniform(npb_rng* rng, double* out) {
  return guard([&] { set(out, need(rng, "rng")->state.uniform()); });
}

npb_status npb_sample_gamma(double shape, npb_rng* rng, double* out) {
  return guard([&] { set(out, sample_gamma(shape, need(rng, "rng")->state)); });
}

npb_status npb_sample_beta(double a, double b, npb_rng* rng, double* out) {
  return guard([&] { set(out, sample_beta(a, b, need(rng, "rng")->state)); });
}

npb_status npb_reg_inc_beta(double x, double a, double c, double* out) {
  return guard([&] { set(out, reg_inc_beta(x, a, c)); });
}

npb_status npb_log_gamma(double x, double* out) {
  return guard([&] { set(out, log_gamma(x)); });
}

// ---- base distributions

npb_status npb_base_uniform(double lo, double hi, npb_base** out) {
  return guard([&] { make(out, BaseDistribution::uniform(lo, hi)); });
}

npb_status npb_base_normal(double mean, double sd, npb_base** out) {
  return guard([&] { make(out, BaseDistribution::normal(mean, sd)); });
}

npb_status npb_base_empirical(const double* points, size_t n, npb_base** out) {
  return guard([&] { make(out, BaseDistribution::empirical(array(points, n, "points"))); });
}

void npb_base_destroy(npb_base* base) { delete base; }

npb_status npb_base_cdf(const npb_base* base, double x, double* out) {
  return guard([&] { set(out, need(base, "base")->dist.cdf(x)); });
}

npb_status npb_base_quantile(const npb_base* base, double p, double* out) {
  return guard([&] { set(out, need(base, "base")->dist.quantile(p)); });
}

npb_status npb_base_mean(const npb_base* base, double* out) {
  return guard([&] { set(out, need(base, "base")->dist.mean()); });
}

// ---- Dirichlet process

npb_status npb_dp_create(double b, const npb_base* base, npb_dp** out) {
  return guard([&] { make(out, DPParams(b, need(base, "base")->dist)); });
}

npb_status npb_dp_create_sticks(double b, const npb_base* base, double stick_a, double stick_b, npb_dp** out) {
  return guard([&] { make(out, DPParams(b, need(base, "base")->dist, StickLaw{stick_a, stick_b})); });
}

void npb_dp_destroy(npb_dp* dp) { delete dp; }

npb_status npb_dp_concentration(const npb_dp* dp, double* out) {
  return guard([&] { set(out, need(dp, "dp")->params.concentration()); });
}

npb_status npb_dp_posterior(const npb_dp* dp, const double* data, size_t n, npb_dp** out) {
  return guard([&] { make(out, posterior_update(need(dp, "dp")->params, array(data, n, "data"))); });
}

npb_status npb_dp_set_law(const npb_dp* dp, double p0a, npb_set_law* out) {
  return guard([&] {
    const auto law = set_probability_law(need(dp, "dp")->params, p0a);
    npb_set_law r{};
    if (law.law) {
      r.alpha = law.law->alpha;
      r.beta = law.law->beta;
    }
    r.mean = law.mean;
    r.variance = law.variance;
    r.degenerate = law.degenerate ? 1 : 0;
    set(out, r);
  });
}

npb_status npb_dp_finite_sample(const npb_dp* dp, uint64_t m, npb_rng* rng, npb_measure** out) {
  return guard([&] { make(out, finite_approx_sample(m, need(dp, "dp")->params, need(rng, "rng")->state)); });
}

npb_status npb_dp_stick_sample(const npb_dp* dp, double truncation_eps, npb_rng* rng, npb_measure** out) {
  return guard(
      [&] { make(out, stick_breaking_sample(need(dp, "dp")->params, truncation_eps, need(rng, "rng")->state)); });
}

npb_status npb_dp_random_m_sample(const npb_dp* dp, double poisson_mean, npb_rng* rng, npb_measure** out) {
  return guard([&] {
    make(out, random_m_sample(CountLaw::one_plus_poisson(poisson_mean), need(dp, "dp")->params,
                              need(rng, "rng")->state));
  });
}

void npb_measure_destroy(npb_measure* measure) { delete measure; }

npb_status npb_measure_size(const npb_measure* measure, size_t* out) {
  return guard([&] { set(out, need(measure, "measure")->measure.size()); });
}

npb_status npb_measure_atoms(const npb_measure* measure, double* out, size_t capacity) {
  return guard([&] { copy_out(need(measure, "measure")->measure.atoms(), out, capacity); });
}

npb_status npb_measure_weights(const npb_measure* measure, double* out, size_t capacity) {
  return guard([&] { copy_out(need(measure, "measure")->measure.weights(), out, capacity); });
}

npb_status npb_measure_residual(const npb_measure* measure, double* out) {
  return guard([&] { set(out, need(measure, "measure")->measure.residual_mass()); });
}

npb_status npb_measure_mass_below(const npb_measure* measure, double x, double* out) {
  return guard([&] { set(out, need(measure, "measure")->measure.mass_at_or_below(x)); });
}

npb_status npb_measure_mean(const npb_measure* measure, double* out) {
  return guard([&] { set(out, need(measure, "measure")->measure.integrate([](double x) { return x; })); });
}

// ---- random means

npb_status npb_central_moments(npb_moment_base base, double p1, double p2, double stick_a, double stick_b,
                               int p_max, npb_arithmetic arithmetic, double* out) {
  return guard([&] {
    need(out, "output array");
    if (p_max < 0) raise(NPB_ERR_DOMAIN, "p_max must be >= 0");
    BaseMomentSpec spec = [&] {
      switch (base) {
        case NPB_MOMENTS_UNIFORM:
          return BaseMomentSpec::uniform(p1, p2, p_max);
        case NPB_MOMENTS_NORMAL:
          return BaseMomentSpec::normal(p1, p2, p_max);
        case NPB_MOMENTS_POINT:
          return BaseMomentSpec::point_mass(p1, p_max);
      }
      raise(NPB_ERR_INVALID_ARGUMENT, "unknown moment base");
    }();
    MomentArithmetic mode = MomentArithmetic::automatic;
    if (arithmetic == NPB_ARITH_EXACT) mode = MomentArithmetic::exact;
    else if (arithmetic == NPB_ARITH_FLOAT) mode = MomentArithmetic::floating;
    else if (arithmetic != NPB_ARITH_AUTO) raise(NPB_ERR_INVALID_ARGUMENT, "unknown arithmetic mode");
    const auto m = central_moments(spec, StickMomentTable(stick_a, stick_b, p_max), p_max, mode);
    copy_out(m, out, static_cast<std::size_t>(p_max) + 1);
  });
}

npb_status npb_empirical_central_moments(const double* samples, size_t n, double centre, int p_max, double* out) {
  return guard([&] {
    const auto s = array(samples, n, "samples");
    copy_out(empirical_central_moments(s, centre, p_max), out, static_cast<std::size_t>(std::max(p_max, 0)) + 1);
  });
}

npb_status npb_mean_chain(const npb_dp* dp, npb_integrand g, size_t steps, size_t burn_in, npb_rng* rng,
                          double* out, size_t capacity) {
  return guard([&] {
    const auto& params = need(dp, "dp")->params;
    const auto chain = stochastic_chain(params.stick_a(), params.stick_b(),
                                        transformed_sampler(params.base(), integrand(g)), steps, burn_in,
                                        need(rng, "rng")->state);
    copy_out(chain, out, capacity);
  });
}

npb_status npb_transform_rhs(const npb_dp* dp, npb_integrand g, double u, size_t quad_points, double* out) {
  return guard([&] { set(out, transform_rhs(u, need(dp, "dp")->params, integrand(g), quad_points)); });
}

npb_status npb_transform_check(const npb_dp* dp, npb_integrand g, double u, size_t n_sim, size_t quad_points,
                               npb_rng* rng, npb_transform_report* out) {
  return guard([&] {
    const auto r = transform_identity_check(u, need(dp, "dp")->params, integrand(g), n_sim, quad_points,
                                            need(rng, "rng")->state);
    set(out, npb_transform_report{r.u, r.lhs_mc, r.mc_se, r.rhs_exact});
  });
}

// ---- quantiles

npb_status npb_noninf_point_masses(double y, size_t n, double* out, size_t capacity) {
  return guard([&] { copy_out(noninf_point_masses(y, n), out, capacity); });
}

npb_status npb_bernstein_quantile(const double* data, size_t n, double y, double* out) {
  return guard([&] { set(out, bernstein_quantile(y, SortedSample::from_values(array(data, n, "data")))); });
}

npb_status npb_bernstein_quantile_derivative(const double* data, size_t n, double y, double* out) {
  return guard(
      [&] { set(out, bernstein_quantile_derivative(y, SortedSample::from_values(array(data, n, "data")))); });
}

npb_status npb_quantile_posterior_mean(const double* data, size_t n, double y, double b, const npb_base* f0,
                                       double* out) {
  return guard([&] {
    set(out, quantile_posterior_mean(y, SortedSample::from_values(array(data, n, "data")), b,
                                     need(f0, "base")->dist));
  });
}

npb_status npb_prior_quantile_cdf(double y, double x, double b, const npb_base* f0, double* out) {
  return guard([&] { set(out, prior_quantile_cdf(y, x, b, need(f0, "base")->dist)); });
}

npb_status npb_qlaw_create(const double* data, size_t n, double y, double b, const npb_base* f0, npb_qlaw** out) {
  return guard([&] {
    const auto sample = SortedSample::from_values(array(data, n, "data"));
    make(out, posterior_quantile_law(y, sample, b, need(f0, "base")->dist));
  });
}

void npb_qlaw_destroy(npb_qlaw* law) { delete law; }

npb_status npb_qlaw_cdf(const npb_qlaw* law, double x, double* out) {
  return guard([&] { set(out, need(law, "quantile law")->law.cdf(x)); });
}

npb_status npb_qlaw_continuous_mass(const npb_qlaw* law, double* out) {
  return guard([&] { set(out, need(law, "quantile law")->law.continuous_mass()); });
}

npb_status npb_qlaw_mean(const npb_qlaw* law, double* out) {
  return guard([&] { set(out, need(law, "quantile law")->law.mean()); });
}

npb_status npb_density_create(const double* data, size_t n, npb_density** out) {
  return guard([&] { make(out, AutomaticDensity(SortedSample::from_values(array(data, n, "data")))); });
}

void npb_density_destroy(npb_density* density) { delete density; }

npb_status npb_density_eval(const npb_density* density, double x, double* out) {
  return guard([&] { set(out, need(density, "density")->density(x)); });
}

npb_status npb_density_cdf(const npb_density* density, double x, double* out) {
  return guard([&] { set(out, need(density, "density")->density.cdf(x)); });
}

// ---- quantile pyramids

npb_pyramid_options npb_pyramid_default_options(void) {
  const PyramidSamplerOptions d;
  return npb_pyramid_options{d.iterations, d.burn_in, d.thin, d.proposal_scale};
}

npb_status npb_pyramid_sample_prior(int depth, npb_level_density h, npb_rng* rng, double* out, size_t capacity) {
  return guard([&] { copy_out(sample_prior(depth, level_density(h), need(rng, "rng")->state).values(), out, capacity); });
}

npb_status npb_pyramid_log_prior(int depth, const double* values, npb_level_density h, double* out) {
  return guard([&] { set(out, prior_log_density(pyramid(depth, values), level_density(h))); });
}

npb_status npb_pyramid_loglik(int depth, const double* values, const double* data, size_t n,
                              npb_pyramid_likelihood likelihood, double* out) {
  return guard([&] {
    const auto pyr = pyramid(depth, values);
    const auto d = array(data, n, "data");
    set(out, pyramid_likelihood(likelihood) == PyramidLikelihood::interpolation ? loglik_interp(pyr, d)
                                                                                : loglik_substitute(pyr, d));
  });
}

npb_status npb_pyramid_sample(int depth, npb_level_density h, const double* data, size_t n,
                              npb_pyramid_likelihood likelihood, const npb_pyramid_options* options, npb_rng* rng,
                              npb_pyramid_chain** out) {
  return guard([&] {
    need(options, "options");
    PyramidSamplerOptions o;
    o.iterations = options->iterations;
    o.burn_in = options->burn_in;
    o.thin = options->thin;
    o.proposal_scale = options->proposal_scale;
    const auto d = array(data, n, "data");
    make(out, posterior_sampler(depth, level_density(h), d, pyramid_likelihood(likelihood), o,
                                need(rng, "rng")->state));
  });
}

void npb_pyramid_chain_destroy(npb_pyramid_chain* chain) { delete chain; }

npb_status npb_pyramid_chain_size(const npb_pyramid_chain* chain, size_t* out) {
  return guard([&] { set(out, need(chain, "chain")->chain.draws.size()); });
}

npb_status npb_pyramid_chain_draw(const npb_pyramid_chain* chain, size_t index, size_t* iteration, double* values,
                                  size_t capacity) {
  return guard([&] {
    const auto& c = need(chain, "chain")->chain;
    if (index >= c.draws.size()) raise(NPB_ERR_INVALID_ARGUMENT, "draw index out of range");
    if (iteration != nullptr) *iteration = c.iteration[index];
    copy_out(c.draws[index].values(), values, capacity);
  });
}

npb_status npb_pyramid_chain_acceptance(const npb_pyramid_chain* chain, double* out) {
  return guard([&] { set(out, need(chain, "chain")->chain.acceptance_rate); });
}

// ---- frailty

npb_status npb_frailty_simulate(const npb_frailty_spec* spec, double t_max, npb_rng* rng, npb_path** out) {
  return guard([&] { make(out, simulate_path(frailty_spec(spec), t_max, need(rng, "rng")->state)); });
}

void npb_path_destroy(npb_path* path) { delete path; }

npb_status npb_path_size(const npb_path* path, size_t* out) {
  return guard([&] { set(out, need(path, "path")->path.times.size()); });
}

npb_status npb_path_times(const npb_path* path, double* out, size_t capacity) {
  return guard([&] { copy_out(need(path, "path")->path.times, out, capacity); });
}

npb_status npb_path_levels(const npb_path* path, double* out, size_t capacity) {
  return guard([&] { copy_out(need(path, "path")->path.levels, out, capacity); });
}

npb_status npb_path_damage(const npb_path* path, double t, double* out) {
  return guard([&] { set(out, need(path, "path")->path.damage_at(t)); });
}

npb_status npb_frailty_thinning(const npb_frailty_spec* spec, double* out) {
  return guard([&] { set(out, thinning_factor(frailty_spec(spec))); });
}

npb_status npb_frailty_survival(const npb_frailty_spec* spec, double t, double* out) {
  return guard([&] { set(out, marginal_survival(frailty_spec(spec), t)); });
}

npb_status npb_frailty_hazard(const npb_frailty_spec* spec, double s, double* out) {
  return guard([&] { set(out, hazard_rate(frailty_spec(spec), s)); });
}

npb_status npb_regression_hazards(const npb_regression_spec* spec, const double* covariates, size_t n, double s,
                                  double* hazard, double* survival) {
  return guard([&] {
    need(spec, "regression spec");
    RegressionSpec r;
    r.baseline = CumulativeRate::power(spec->kappa, spec->exponent);
    r.beta = array(spec->beta, spec->p, "beta");
    if (spec->structure == NPB_HAZARD_COX) {
      r.structure = HazardStructure::cox;
      r.theta = spec->theta;
      r.jump = jump_law(spec->jump, spec->jump_p1, spec->jump_p2);
    } else if (spec->structure == NPB_HAZARD_BETA_MULTIPLIER) {
      r.structure = HazardStructure::beta_multiplier;
      r.gamma = array(spec->gamma, spec->p, "gamma");
      r.c = spec->c;
    } else {
      raise(NPB_ERR_INVALID_ARGUMENT, "unknown hazard structure");
    }
    const auto x = rows(covariates, n, spec->p, "covariates");
    const auto hazards = regression_hazards(x, r);
    if (n > 0) {
      need(hazard, "hazard output");
      need(survival, "survival output");
    }
    for (std::size_t i = 0; i < n; ++i) {
      hazard[i] = hazards[i](s);
      survival[i] = hazards[i].survival(s);
    }
  });
}

// ---- local regression

npb_status npb_local_prior_create(double sigma, npb_local_prior** out) {
  return guard([&] {
    LocalPrior p;
    p.sigma = sigma;
    p.validate();
    make(out, p);
  });
}

void npb_local_prior_destroy(npb_local_prior* prior) { delete prior; }

npb_status npb_local_prior_m0_linear(npb_local_prior* prior, double xi0, double xi1) {
  return guard([&] { need(prior, "prior")->prior.m0 = CurveSpec::linear(xi0, xi1); });
}

npb_status npb_local_prior_m0_table(npb_local_prior* prior, const double* xs, const double* values, size_t n) {
  return guard([&] {
    need(prior, "prior")->prior.m0 = CurveSpec::tabulated(array(xs, n, "xs"), array(values, n, "values"));
  });
}

npb_status npb_local_prior_w0_constant(npb_local_prior* prior, double w0) {
  return guard([&] {
    if (!(w0 >= 0.0)) raise(NPB_ERR_DOMAIN, "w0 must be nonnegative");
    need(prior, "prior")->prior.w0 = CurveSpec::constant(w0);
  });
}

npb_status npb_local_prior_w0_table(npb_local_prior* prior, const double* xs, const double* values, size_t n) {
  return guard([&] {
    auto curve = CurveSpec::tabulated(array(xs, n, "xs"), array(values, n, "values"));
    if (!(curve.min_value() >= 0.0)) raise(NPB_ERR_DOMAIN, "w0 must be nonnegative");
    need(prior, "prior")->prior.w0 = std::move(curve);
  });
}

npb_status npb_kernel_weights(double x, const double* xs, const double* ys, size_t n, double h, npb_kernel kernel,
                              double* weights, double* s0) {
  return guard([&] {
    const auto w = kernel_weights(x, regression_data(xs, ys, n), h, kernel_of(kernel));
    if (weights != nullptr) std::copy(w.weights.begin(), w.weights.end(), weights);
    set(s0, w.s0);
  });
}

npb_status npb_kernel_density(double x, const double* xs, size_t n, double h, npb_kernel kernel, double* out) {
  return guard([&] { set(out, kernel_density(x, array(xs, n, "xs"), h, kernel_of(kernel))); });
}

npb_status npb_local_constant(double x, const double* xs, const double* ys, size_t n, double h, npb_kernel kernel,
                              double* out) {
  return guard([&] { set(out, local_constant_estimate(x, regression_data(xs, ys, n), h, kernel_of(kernel))); });
}

npb_status npb_local_log_likelihood(double x, const double* xs, const double* ys, size_t n, double h,
                                    npb_kernel kernel, double a, double sigma, double* out) {
  return guard(
      [&] { set(out, local_log_likelihood(x, regression_data(xs, ys, n), h, kernel_of(kernel), a, sigma)); });
}

npb_status npb_local_posterior(double x, const double* xs, const double* ys, size_t n, double h, npb_kernel kernel,
                               const npb_local_prior* prior, double* mean, double* variance) {
  return guard([&] {
    const auto post = local_posterior(x, regression_data(xs, ys, n), h, kernel_of(kernel),
                                      need(prior, "prior")->prior);
    set(mean, post.mean);
    set(variance, post.variance);
  });
}

npb_status npb_plugin_sigma(const double* xs, const double* ys, size_t n, double h, npb_kernel kernel, double* out) {
  return guard([&] { set(out, plugin_sigma(regression_data(xs, ys, n), h, kernel_of(kernel))); });
}

npb_status npb_local_fit_create(const double* xs, const double* ys, size_t n, const double* grid, size_t grid_size,
                                double h, npb_kernel kernel, const npb_local_prior* prior,
                                const npb_fit_options* options, npb_rng* rng, npb_local_fit** out) {
  return guard([&] {
    FitOptions o;
    if (options != nullptr) {
      o.empirical_bayes = options->empirical_bayes != 0;
      if (options->hierarchical) {
        HierarchicalOptions hier;
        hier.xi_mean = {options->xi_mean[0], options->xi_mean[1]};
        hier.xi_cov = {{{options->xi_cov[0], options->xi_cov[1]}, {options->xi_cov[2], options->xi_cov[3]}}};
        hier.n_draws = options->n_draws;
        o.hierarchical = hier;
      }
    }
    const auto g = array(grid, grid_size, "grid");
    make(out, fit_curve(regression_data(xs, ys, n), g, h, kernel_of(kernel), need(prior, "prior")->prior, o,
                        rng != nullptr ? &rng->state : nullptr));
  });
}

void npb_local_fit_destroy(npb_local_fit* fit) { delete fit; }

npb_status npb_local_fit_size(const npb_local_fit* fit, size_t* out) {
  return guard([&] { set(out, need(fit, "fit")->fit.x.size()); });
}

npb_status npb_local_fit_row_at(const npb_local_fit* fit, size_t index, npb_local_fit_row* out) {
  return guard([&] {
    const auto& f = need(fit, "fit")->fit;
    if (index >= f.x.size()) raise(NPB_ERR_INVALID_ARGUMENT, "row index out of range");
    set(out, npb_local_fit_row{f.x[index], f.mean[index], f.sd[index], f.s0[index], f.m_tilde[index],
                               f.gap[index] ? 1 : 0});
  });
}

npb_status npb_local_fit_w0_hat(const npb_local_fit* fit, int* has_value, double* out) {
  return guard([&] {
    const auto& f = need(fit, "fit")->fit;
    set(has_value, f.w0_hat ? 1 : 0);
    set(out, f.w0_hat.value_or(std::nan("")));
  });
}

// ---- envelopes

npb_status npb_predictive_cdf(const double* residuals, size_t draws, size_t n, double b, const npb_base* g0,
                              double w_override, const double* t, size_t count, double* out) {
  return guard([&] {
    const auto r = rows(residuals, draws, n, "residuals");
    std::optional<double> w;
    if (!std::isnan(w_override)) w = w_override;
    const PredictiveCdf cdf(r, b, need(g0, "base")->dist, w);
    if (count > 0) {
      need(t, "t");
      need(out, "output array");
    }
    for (std::size_t i = 0; i < count; ++i) out[i] = cdf(t[i]);
  });
}

npb_status npb_rising_factorial_log(double x, uint64_t m, double* out) {
  return guard([&] { set(out, rising_factorial_log(x, m)); });
}

npb_status npb_control_log_factor(const uint64_t* counts, const double* z, size_t k, double b, double* out) {
  return guard([&] {
    if (k > 0) need(counts, "counts");
    std::vector<std::size_t> c(counts, counts + k);
    set(out, control_log_factor(c, array(z, k, "z"), b));
  });
}

npb_status npb_partition_counts(const double* cuts, size_t ncuts, const double* residuals, size_t n,
                                uint64_t* counts) {
  return guard([&] {
    const ControlPartition part(array(cuts, ncuts, "cuts"));
    const auto c = part.counts(array(residuals, n, "residuals"));
    need(counts, "counts");
    std::copy(c.begin(), c.end(), counts);
  });
}

npb_status npb_standardized_residuals(const double* y, const double* covariates, size_t n, size_t p,
                                      const double* beta, double sigma, double* out) {
  return guard([&] {
    const auto r = standardized_residuals(array(y, n, "y"), rows(covariates, n, p, "covariates"),
                                          array(beta, p, "beta"), sigma);
    copy_out(r, out, n);
  });
}

}  // extern "C"
