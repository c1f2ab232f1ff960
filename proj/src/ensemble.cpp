#include "vtx/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/distributions/normal.hpp>

#include "vtx/errors.hpp"
#include "vtx/parallel.hpp"

namespace vtx {

namespace {

const boost::math::normal kStdNormal;

double phi(double x) { return boost::math::pdf(kStdNormal, x); }
double big_phi(double x) { return boost::math::cdf(kStdNormal, x); }

struct Truncation {
  double alpha, beta, z;
};

Truncation truncation(const PopulationDistributions& d) {
  const double alpha = (d.lower_l - d.mu_l) / d.sigma_l;
  const double beta = (d.upper_l - d.mu_l) / d.sigma_l;
  return {alpha, beta, big_phi(beta) - big_phi(alpha)};
}

// Per-vesicle series reduced from a full trajectory.
struct VesicleSeries {
  std::vector<double> c_h_in;
  std::vector<double> c_s_out;
  double t2 = 0;
  double t4 = 0;
  bool symport = false;
};

VesicleSeries reduce(const Trajectory& traj, double c_s_in0, double v_allotted) {
  VesicleSeries out;
  out.c_h_in.reserve(traj.samples.size());
  out.c_s_out.reserve(traj.samples.size());
  for (const auto& s : traj.samples) {
    out.c_h_in.push_back(s.c_h_in);
    out.c_s_out.push_back((c_s_in0 - s.c_s_in) * traj.rates.v_in / v_allotted);
  }
  if (!traj.schedule.cycles.empty()) {
    const auto& c = traj.schedule.cycles.front();
    out.symport = c.type != CycleType::b;
    out.t2 = c.t2;
    out.t4 = c.t4;
  }
  return out;
}

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  if (n % 2 == 1) return v[n / 2];
  const double lo = v[n / 2 - 1];
  const double hi = v[n / 2];
  return std::isinf(hi) ? hi : 0.5 * (lo + hi);
}

ExperimentStats summarize(const std::vector<VesicleSeries>& ves) {
  ExperimentStats st;
  const std::size_t n = ves.size();
  const std::size_t len = ves.front().c_h_in.size();
  st.mean_c_h_in.assign(len, 0.0);
  st.std_c_h_in.assign(len, 0.0);
  st.mean_c_s_out.assign(len, 0.0);
  st.std_c_s_out.assign(len, 0.0);
  for (const auto& v : ves) {
    for (std::size_t i = 0; i < len; ++i) {
      st.mean_c_h_in[i] += v.c_h_in[i];
      st.mean_c_s_out[i] += v.c_s_out[i];
    }
  }
  for (std::size_t i = 0; i < len; ++i) {
    st.mean_c_h_in[i] /= static_cast<double>(n);
    st.mean_c_s_out[i] /= static_cast<double>(n);
  }
  if (n > 1) {
    for (const auto& v : ves) {
      for (std::size_t i = 0; i < len; ++i) {
        const double dh = v.c_h_in[i] - st.mean_c_h_in[i];
        const double ds = v.c_s_out[i] - st.mean_c_s_out[i];
        st.std_c_h_in[i] += dh * dh;
        st.std_c_s_out[i] += ds * ds;
      }
    }
    for (std::size_t i = 0; i < len; ++i) {
      st.std_c_h_in[i] = std::sqrt(st.std_c_h_in[i] / static_cast<double>(n - 1));
      st.std_c_s_out[i] = std::sqrt(st.std_c_s_out[i] / static_cast<double>(n - 1));
    }
  }
  std::vector<double> t2;
  std::vector<double> t4;
  for (const auto& v : ves) {
    if (!v.symport) continue;
    t2.push_back(v.t2);
    t4.push_back(v.t4);
  }
  st.vesicles_with_symport = static_cast<int>(t2.size());
  st.median_symport_start = median(t2);
  st.median_symport_end = median(t4);
  return st;
}

}  // namespace

void PopulationDistributions::validate() const {
  if (!(l_ves >= 0)) throw ValidationError("population.l_ves", "must be >= 0");
  if (!std::isfinite(mu_ves)) throw ValidationError("population.mu_ves", "must be finite");
  if (!(sigma_ves > 0)) throw ValidationError("population.sigma_ves", "must be > 0");
  if (!(d_mem > 0)) throw ValidationError("population.d_mem", "must be > 0");
  if (!(protein_density >= 0)) throw ValidationError("population.protein_density", "must be >= 0");
  if (!(p_pump >= 0 && p_pump <= 1)) throw ValidationError("population.p_pump", "must lie in [0, 1]");
  if (!std::isfinite(mu_l)) throw ValidationError("population.mu_l", "must be finite");
  if (!(sigma_l > 0)) throw ValidationError("population.sigma_l", "must be > 0");
  if (!(upper_l > lower_l)) throw ValidationError("population.upper_l", "must exceed lower_l");
  if (!(truncation(*this).z > 0)) {
    throw ValidationError("population.lower_l", "truncation interval carries no probability mass");
  }
}

double PopulationDistributions::mean_diameter() const { return l_ves + std::exp(mu_ves + 0.5 * sigma_ves * sigma_ves); }

double PopulationDistributions::mean_permeability() const {
  const auto tr = truncation(*this);
  const double c = std::numbers::ln10 * sigma_l;
  return std::exp(std::numbers::ln10 * mu_l + 0.5 * c * c) * (big_phi(tr.beta - c) - big_phi(tr.alpha - c)) / tr.z;
}

double PopulationDistributions::mean_log10_permeability() const {
  const auto tr = truncation(*this);
  return mu_l + sigma_l * (phi(tr.alpha) - phi(tr.beta)) / tr.z;
}

double PopulationDistributions::variance_log10_permeability() const {
  const auto tr = truncation(*this);
  const double m = (phi(tr.alpha) - phi(tr.beta)) / tr.z;
  return sigma_l * sigma_l * (1.0 + (tr.alpha * phi(tr.alpha) - tr.beta * phi(tr.beta)) / tr.z - m * m);
}

int protein_slots(double d_in, double d_mem, double density) {
  const double d_out = d_in + 2.0 * d_mem;
  return static_cast<int>(std::floor(std::numbers::pi * d_out * d_out * density));
}

double sample_truncated_normal(double mu, double sigma, double lower, double upper, std::mt19937_64& rng) {
  const double lo = big_phi((lower - mu) / sigma);
  const double hi = big_phi((upper - mu) / sigma);
  std::uniform_real_distribution<double> uni(lo, hi);
  double u = uni(rng);
  u = std::clamp(u, std::nextafter(lo, 1.0), std::nextafter(hi, 0.0));
  const double x = mu + sigma * boost::math::quantile(kStdNormal, u);
  return std::clamp(x, std::nextafter(lower, upper), std::nextafter(upper, lower));
}

VesicleSpec sample_vesicle(const PopulationDistributions& dist, std::mt19937_64& rng) {
  VesicleSpec v;
  std::lognormal_distribution<double> excess(dist.mu_ves, dist.sigma_ves);
  v.d_in = dist.l_ves + excess(rng);
  v.d_mem = dist.d_mem;
  const int n_tot = protein_slots(v.d_in, v.d_mem, dist.protein_density);
  std::binomial_distribution<int> pumps(n_tot, dist.p_pump);
  const int n_p = pumps(rng);
  v.n_pumps = n_p;
  v.n_symporters = n_tot - n_p;
  const double x = sample_truncated_normal(dist.mu_l, dist.sigma_l, dist.lower_l, dist.upper_l, rng);
  v.permeability = std::pow(10.0, x);
  return v;
}

std::mt19937_64 vesicle_rng(std::uint64_t seed, std::uint64_t experiment, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(experiment), static_cast<std::uint32_t>(experiment >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

VesicleSpec mean_parameter_vesicle(const PopulationDistributions& dist) {
  VesicleSpec v;
  v.d_in = dist.mean_diameter();
  v.d_mem = dist.d_mem;
  const double n_tot = protein_slots(v.d_in, v.d_mem, dist.protein_density);
  v.n_pumps = dist.p_pump * n_tot;
  v.n_symporters = n_tot - v.n_pumps;
  v.permeability = dist.mean_permeability();
  return v;
}

void EnsembleConfig::validate() const {
  if (!(n_ves >= 1)) throw ValidationError("ensemble.n_ves", "must be >= 1");
  if (n_mod < 1) throw ValidationError("ensemble.n_mod", "must be >= 1");
  if (static_cast<double>(n_mod) > n_ves) throw ValidationError("ensemble.n_mod", "must not exceed n_ves");
  if (n_ex < 1) throw ValidationError("ensemble.n_ex", "must be >= 1");
  if (!(v_out_tot > 0)) throw ValidationError("ensemble.v_out_tot", "must be > 0");
  if (!(dt_out > 0)) throw ValidationError("ensemble.dt_out", "must be > 0");
  if (workers < 1) throw ValidationError("ensemble.workers", "must be >= 1");
  if (solver == EnsembleSolver::fdm) {
    fdm.validate();
    const double stride = dt_out / fdm.dt;
    if (std::abs(stride - std::round(stride)) > 1e-9 * stride) {
      throw ValidationError("ensemble.dt_out", "must be a multiple of fdm.dt");
    }
  }
}

double EnsembleConfig::per_vesicle_volume() const { return v_out_tot / n_ves; }

std::vector<double> aggregate_substrate(std::span<const Trajectory> trajectories) {
  if (trajectories.empty()) throw std::invalid_argument("aggregate_substrate: no trajectories");
  const auto& ref = trajectories.front().samples;
  std::vector<double> out(ref.size(), 0.0);
  for (const auto& traj : trajectories) {
    if (traj.samples.size() != ref.size()) {
      throw std::invalid_argument("aggregate_substrate: trajectories have different lengths");
    }
    for (std::size_t i = 0; i < ref.size(); ++i) {
      if (traj.samples[i].t != ref[i].t) {
        throw std::invalid_argument("aggregate_substrate: time grids differ at sample " + std::to_string(i));
      }
      out[i] += traj.samples[i].c_s_out;
    }
  }
  for (auto& v : out) v /= static_cast<double>(trajectories.size());
  return out;
}

std::vector<double> inter_experiment_variance(std::span<const std::vector<double>> series) {
  if (series.size() < 2) throw std::invalid_argument("inter_experiment_variance: needs at least two experiments");
  const std::size_t len = series.front().size();
  for (const auto& s : series) {
    if (s.size() != len) throw std::invalid_argument("inter_experiment_variance: series lengths differ");
  }
  const double n = static_cast<double>(series.size());
  std::vector<double> var(len, 0.0);
  for (std::size_t i = 0; i < len; ++i) {
    double mean = 0;
    for (const auto& s : series) mean += s[i];
    mean /= n;
    double ss = 0;
    for (const auto& s : series) ss += (s[i] - mean) * (s[i] - mean);
    var[i] = ss / (n - 1.0);
  }
  return var;
}

EnsembleResult run_ensemble(const PopulationDistributions& dist, const KineticConstants& k,
                            const Environment& env, const LightSignal& signal, const EnsembleConfig& cfg) {
  dist.validate();
  cfg.validate();
  signal.validate();

  Environment svs_env = env;
  svs_env.v_out = cfg.per_vesicle_volume();

  EnsembleResult result;
  AnalyticConfig acfg;
  acfg.dt_out = cfg.dt_out;
  FdmConfig fcfg = cfg.fdm;
  fcfg.record_stride = static_cast<int>(std::lround(cfg.dt_out / fcfg.dt));

  auto solve_svs = [&](const VesicleSpec& v) {
    switch (cfg.solver) {
      case EnsembleSolver::closed: return run_analytic(v, k, svs_env, signal, AnalyticMode::closed, acfg);
      case EnsembleSolver::exact: return run_analytic(v, k, svs_env, signal, AnalyticMode::exact, acfg);
      case EnsembleSolver::fdm: return simulate_svs(v, k, svs_env, signal, fcfg);
    }
    throw SolverError("unknown ensemble solver");
  };
  switch (cfg.solver) {
    case EnsembleSolver::closed: result.solver = "closed"; break;
    case EnsembleSolver::exact: result.solver = "exact"; break;
    case EnsembleSolver::fdm: result.solver = "fdm"; break;
  }

  result.reference = solve_svs(mean_parameter_vesicle(dist));
  for (const auto& s : result.reference.samples) result.t.push_back(s.t);

  std::vector<std::vector<double>> pooled_s;
  std::vector<std::vector<double>> pooled_h;
  for (int e = 0; e < cfg.n_ex; ++e) {
    std::vector<VesicleSpec> specs(static_cast<std::size_t>(cfg.n_mod));
    for (int m = 0; m < cfg.n_mod; ++m) {
      auto rng = vesicle_rng(cfg.seed, static_cast<std::uint64_t>(e), static_cast<std::uint64_t>(m));
      specs[static_cast<std::size_t>(m)] = sample_vesicle(dist, rng);
    }
    std::vector<VesicleSeries> series(specs.size());
    if (cfg.solver == EnsembleSolver::fdm) {
      Environment pool_env = env;
      pool_env.v_out = svs_env.v_out * cfg.n_mod;
      const auto pool = simulate_mvs_shared_pool(specs, k, pool_env, signal, fcfg);
      for (std::size_t m = 0; m < specs.size(); ++m) series[m] = reduce(pool.vesicles[m], env.c_s_in0, svs_env.v_out);
    } else {
      parallel_for(cfg.n_mod, cfg.workers, [&](int m) {
        const auto idx = static_cast<std::size_t>(m);
        series[idx] = reduce(solve_svs(specs[idx]), env.c_s_in0, svs_env.v_out);
      });
    }
    auto stats = summarize(series);
    pooled_s.push_back(stats.mean_c_s_out);
    pooled_h.push_back(stats.mean_c_h_in);
    result.experiments.push_back(std::move(stats));
  }

  const std::size_t len = result.t.size();
  result.inter_mean_c_s_out.assign(len, 0.0);
  result.inter_mean_c_h_in.assign(len, 0.0);
  for (int e = 0; e < cfg.n_ex; ++e) {
    for (std::size_t i = 0; i < len; ++i) {
      result.inter_mean_c_s_out[i] += pooled_s[e][i] / cfg.n_ex;
      result.inter_mean_c_h_in[i] += pooled_h[e][i] / cfg.n_ex;
    }
  }
  if (cfg.n_ex >= 2) {
    result.inter_var_c_s_out = inter_experiment_variance(pooled_s);
    result.inter_var_c_h_in = inter_experiment_variance(pooled_h);
  }
  return result;
}

JensenGap jensen_gap_check(const VesicleSpec& base, std::span<const double> n_sym_values,
                           const KineticConstants& k, const Environment& env, const LightSignal& signal,
                           double t_probe) {
  if (n_sym_values.empty()) throw std::invalid_argument("jensen_gap_check: no n_Sym values");
  double n_mean = 0;
  for (double n : n_sym_values) n_mean += n;
  n_mean /= static_cast<double>(n_sym_values.size());

  VesicleSpec mean_vesicle = base;
  mean_vesicle.n_symporters = n_mean;
  AnalyticConfig acfg;
  acfg.dt_out = std::max(signal.horizon, acfg.dt_out);
  const auto traj = run_analytic(mean_vesicle, k, env, signal, AnalyticMode::closed, acfg);

  JensenGap out;
  const auto loc = phase_at(traj.schedule, t_probe);
  if (loc.phase != Phase::p3 && loc.phase != Phase::p4) return out;

  // Symport time accumulated until t_probe; the substrate law is autonomous,
  // so consecutive intervals compose into one.
  double elapsed = 0;
  for (const auto& c : traj.schedule.cycles) {
    if (c.t2 >= t_probe) break;
    elapsed += std::min(t_probe, c.t4) - c.t2;
  }
  if (!(elapsed > 0)) return out;
  out.conclusive = true;

  auto c_s_at = [&](double n_sym, double dt) {
    VesicleSpec v = base;
    v.n_symporters = n_sym;
    return exact_substrate(env.c_s_in0, derive_rates(v, k, env), dt);
  };
  for (double n : n_sym_values) out.ensemble_mean += c_s_at(n, elapsed);
  out.ensemble_mean /= static_cast<double>(n_sym_values.size());
  out.mean_parameter = c_s_at(n_mean, elapsed);
  out.gap = out.ensemble_mean - out.mean_parameter;

  const double h = std::max(1.0, 0.25 * n_mean);
  out.min_second_derivative = std::numeric_limits<double>::infinity();
  constexpr int kGrid = 10;
  for (int j = 1; j <= kGrid; ++j) {
    const double dt = elapsed * j / kGrid;
    const double d2 = (c_s_at(n_mean + h, dt) - 2.0 * c_s_at(n_mean, dt) + c_s_at(std::max(0.0, n_mean - h), dt)) / (h * h);
    out.min_second_derivative = std::min(out.min_second_derivative, d2);
  }
  return out;
}

}  // namespace vtx
