#include <gtest/gtest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <map>
#include <vector>

#include "oracles.hpp"
#include "vtx/analytic.hpp"
#include "vtx/ensemble.hpp"
#include "vtx/errors.hpp"
#include "vtx/lambert_w.hpp"

using namespace vtx;

namespace {

constexpr int kSamples = 100000;

std::vector<VesicleSpec> draw(const PopulationDistributions& d, int n, std::uint64_t seed = 7) {
  std::vector<VesicleSpec> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    auto rng = vesicle_rng(seed, 0, static_cast<std::uint64_t>(i));
    out.push_back(sample_vesicle(d, rng));
  }
  return out;
}

Trajectory flat(double value, std::size_t n) {
  Trajectory t;
  for (std::size_t i = 0; i < n; ++i) {
    TrajectorySample s;
    s.t = static_cast<double>(i);
    s.c_s_out = value;
    t.samples.push_back(s);
  }
  return t;
}

}  // namespace

TEST(ProteinSlots, MeanDiameterGives112) {
  EXPECT_EQ(protein_slots(117.67e-9, 14e-9, 1.685e15), 112);
  EXPECT_EQ(protein_slots(87e-9, 14e-9, 1.685e15), 70);
}

TEST(Sampling, CountsSumToSlots) {
  const PopulationDistributions d;
  for (const auto& v : draw(d, 5000)) {
    ASSERT_EQ(v.n_pumps + v.n_symporters, protein_slots(v.d_in, v.d_mem, d.protein_density));
    ASSERT_EQ(v.n_pumps, std::floor(v.n_pumps));
    ASSERT_GT(v.permeability, std::pow(10.0, d.lower_l));
    ASSERT_LT(v.permeability, std::pow(10.0, d.upper_l));
  }
}

TEST(Sampling, DiameterPassesKs) {
  const PopulationDistributions d;
  std::vector<double> x;
  for (const auto& v : draw(d, kSamples)) x.push_back(v.d_in);
  const double stat = oracle::ks_statistic(x, [&](double di) {
    return di <= d.l_ves ? 0.0 : oracle::normal_cdf((std::log(di - d.l_ves) - d.mu_ves) / d.sigma_ves);
  });
  EXPECT_GT(oracle::ks_p_value(stat, x.size()), 0.01) << "D=" << stat;
}

TEST(Sampling, PermeabilityPassesKs) {
  const PopulationDistributions d;
  std::vector<double> x;
  for (const auto& v : draw(d, kSamples)) x.push_back(std::log10(v.permeability));
  const double a = oracle::normal_cdf((d.lower_l - d.mu_l) / d.sigma_l);
  const double b = oracle::normal_cdf((d.upper_l - d.mu_l) / d.sigma_l);
  const double stat = oracle::ks_statistic(x, [&](double z) {
    if (z <= d.lower_l) return 0.0;
    if (z >= d.upper_l) return 1.0;
    return (oracle::normal_cdf((z - d.mu_l) / d.sigma_l) - a) / (b - a);
  });
  EXPECT_GT(oracle::ks_p_value(stat, x.size()), 0.01) << "D=" << stat;
}

TEST(Sampling, PumpCountPassesChiSquare) {
  const PopulationDistributions d;
  const auto ves = draw(d, kSamples);
  // Conditional on each vesicle's slot count the pump count is binomial;
  // expected bin counts are the summed pmfs.
  std::map<int, double> observed, expected;
  for (const auto& v : ves) {
    const int n = static_cast<int>(v.n_pumps + v.n_symporters);
    observed[static_cast<int>(v.n_pumps)] += 1;
    for (int k = 0; k <= n; ++k) expected[k] += oracle::binomial_pmf(n, k, d.p_pump);
  }
  // Merge sparse bins from both ends until each holds at least 5.
  std::vector<std::pair<double, double>> bins;
  double o_acc = 0, e_acc = 0;
  for (const auto& [k, e] : expected) {
    o_acc += observed.count(k) ? observed[k] : 0.0;
    e_acc += e;
    if (e_acc >= 5) {
      bins.emplace_back(o_acc, e_acc);
      o_acc = e_acc = 0;
    }
  }
  bins.back().first += o_acc;
  bins.back().second += e_acc;
  double chi2 = 0;
  for (const auto& [o, e] : bins) chi2 += (o - e) * (o - e) / e;
  const boost::math::chi_squared dist(static_cast<double>(bins.size() - 1));
  EXPECT_GT(boost::math::cdf(boost::math::complement(dist, chi2)), 0.01) << "chi2=" << chi2;
}

TEST(Sampling, MomentsWithinThreeStandardErrors) {
  const PopulationDistributions d;
  const auto ves = draw(d, kSamples, 11);
  auto check = [](const std::vector<double>& x, double mean, double var, const char* what) {
    const double n = static_cast<double>(x.size());
    double m = 0;
    for (double v : x) m += v;
    m /= n;
    double s2 = 0, m4 = 0;
    for (double v : x) {
      s2 += (v - m) * (v - m);
      m4 += std::pow(v - m, 4);
    }
    s2 /= n - 1;
    m4 /= n;
    EXPECT_LT(std::abs(m - mean), 3.0 * std::sqrt(var / n)) << what << " mean";
    EXPECT_LT(std::abs(s2 - var), 3.0 * std::sqrt((m4 - s2 * s2) / n)) << what << " variance";
  };
  std::vector<double> dia, lg;
  for (const auto& v : ves) {
    dia.push_back(v.d_in);
    lg.push_back(std::log10(v.permeability));
  }
  const double s2 = d.sigma_ves * d.sigma_ves;
  check(dia, d.mean_diameter(), (std::exp(s2) - 1.0) * std::exp(2 * d.mu_ves + s2), "d_in");
  check(lg, d.mean_log10_permeability(), d.variance_log10_permeability(), "log10 g_L");
}

TEST(Sampling, IndependentOfDrawOrder) {
  const PopulationDistributions d;
  auto a = vesicle_rng(3, 2, 17);
  auto b = vesicle_rng(3, 2, 17);
  auto c = vesicle_rng(3, 2, 18);
  const auto va = sample_vesicle(d, a), vb = sample_vesicle(d, b), vc = sample_vesicle(d, c);
  EXPECT_EQ(va.d_in, vb.d_in);
  EXPECT_EQ(va.permeability, vb.permeability);
  EXPECT_NE(va.d_in, vc.d_in);
}

TEST(MeanParameterVesicle, UsesDistributionMeans) {
  const PopulationDistributions d;
  const auto v = mean_parameter_vesicle(d);
  EXPECT_NEAR(v.d_in, 117.39e-9, 1e-11);
  EXPECT_NEAR(v.n_pumps + v.n_symporters, 111.0, 1e-12);
  EXPECT_NEAR(v.n_pumps / (v.n_pumps + v.n_symporters), 4.0 / 7.0, 1e-12);
  // E{10^X} against direct numerical integration of the truncated density.
  const double a = oracle::normal_cdf((d.lower_l - d.mu_l) / d.sigma_l);
  const double b = oracle::normal_cdf((d.upper_l - d.mu_l) / d.sigma_l);
  double mean = 0;
  const int n = 20000;
  const double h = (d.upper_l - d.lower_l) / n;
  for (int i = 0; i < n; ++i) {
    const double x = d.lower_l + (i + 0.5) * h;
    const double z = (x - d.mu_l) / d.sigma_l;
    mean += std::pow(10.0, x) * std::exp(-0.5 * z * z) / (d.sigma_l * std::sqrt(2 * std::numbers::pi)) * h;
  }
  mean /= b - a;
  EXPECT_NEAR(v.permeability / mean, 1.0, 1e-7);
}

TEST(Aggregate, IdentityAndIdenticalInputs) {
  const std::vector<Trajectory> one{flat(2.5, 4)};
  EXPECT_EQ(aggregate_substrate(one), std::vector<double>(4, 2.5));
  const std::vector<Trajectory> same{flat(2.5, 4), flat(2.5, 4), flat(2.5, 4)};
  EXPECT_EQ(aggregate_substrate(same), std::vector<double>(4, 2.5));
  const std::vector<Trajectory> bad{flat(1, 4), flat(1, 3)};
  EXPECT_THROW(aggregate_substrate(bad), std::invalid_argument);
}

TEST(InterExperimentVariance, Cases) {
  const std::vector<std::vector<double>> same{{1, 2, 3}, {1, 2, 3}, {1, 2, 3}};
  EXPECT_EQ(inter_experiment_variance(same), std::vector<double>(3, 0.0));
  const double delta = 0.3;
  const std::vector<std::vector<double>> offset{{1, 2, 3}, {1 + delta, 2 + delta, 3 + delta}};
  for (double v : inter_experiment_variance(offset)) EXPECT_NEAR(v, delta * delta / 2, 1e-15);
  const std::vector<std::vector<double>> single{{1, 2}};
  EXPECT_THROW(inter_experiment_variance(single), std::invalid_argument);
}

TEST(RunEnsemble, DegenerateDistributionsCollapseToSvs) {
  PopulationDistributions d;
  d.sigma_ves = 1e-12;
  d.sigma_l = 1e-9;
  d.p_pump = 1.0;
  EnsembleConfig cfg;
  cfg.n_mod = 5;
  cfg.n_ex = 2;
  LightSignal sig{{{0, 200}}, 400};
  const auto res = run_ensemble(d, KineticConstants{}, Environment{}, sig, cfg);
  for (std::size_t i = 0; i < res.t.size(); ++i) {
    ASSERT_NEAR(res.inter_mean_c_h_in[i] / res.reference.samples[i].c_h_in, 1.0, 1e-6);
    ASSERT_NEAR(res.inter_var_c_h_in[i], 0.0, 1e-24);
  }
}

TEST(RunEnsemble, ReproducibleAcrossRunsAndWorkerCounts) {
  const PopulationDistributions d;
  EnsembleConfig cfg;
  cfg.n_mod = 20;
  cfg.n_ex = 3;
  cfg.seed = 42;
  LightSignal sig{{{0, 300}}, 600};
  const auto a = run_ensemble(d, KineticConstants{}, Environment{}, sig, cfg);
  cfg.workers = 4;
  const auto b = run_ensemble(d, KineticConstants{}, Environment{}, sig, cfg);
  EXPECT_EQ(a.inter_mean_c_s_out, b.inter_mean_c_s_out);
  EXPECT_EQ(a.inter_var_c_s_out, b.inter_var_c_s_out);
  EXPECT_EQ(a.inter_mean_c_h_in, b.inter_mean_c_h_in);
  cfg.seed = 43;
  const auto c = run_ensemble(d, KineticConstants{}, Environment{}, sig, cfg);
  EXPECT_NE(a.inter_mean_c_s_out, c.inter_mean_c_s_out);
}

TEST(RunEnsemble, SharedPoolSolverRuns) {
  const PopulationDistributions d;
  EnsembleConfig cfg;
  cfg.n_mod = 10;
  cfg.n_ex = 2;
  cfg.solver = EnsembleSolver::fdm;
  LightSignal sig{{{0, 100}}, 200};
  const auto res = run_ensemble(d, KineticConstants{}, Environment{}, sig, cfg);
  EXPECT_EQ(res.solver, "fdm");
  EXPECT_EQ(res.t.size(), res.inter_mean_c_s_out.size());
  EXPECT_GT(res.inter_mean_c_s_out.back(), 0.0);
  cfg.dt_out = 0.015;
  EXPECT_THROW(cfg.validate(), ValidationError);
}

TEST(JensenGap, DeterministicValueGivesZeroGap) {
  Environment env;
  env.c_s_in0 = 0.05;
  LightSignal sig{{{0, 800}}, 2400};
  const std::vector<double> n{30};
  const auto g = jensen_gap_check(VesicleSpec{}, n, KineticConstants{}, env, sig, 700);
  ASSERT_TRUE(g.conclusive);
  EXPECT_EQ(g.gap, 0.0);
}

TEST(JensenGap, TwoPointExampleIsStrictlyPositive) {
  Environment env;
  env.c_s_in0 = 0.05;
  LightSignal sig{{{0, 800}}, 2400};
  const std::vector<double> n{20, 40};
  const auto g = jensen_gap_check(VesicleSpec{}, n, KineticConstants{}, env, sig, 700);
  ASSERT_TRUE(g.conclusive);
  EXPECT_GT(g.gap, 0.0);
  EXPECT_GT(g.ensemble_mean, g.mean_parameter);
  EXPECT_GT(g.min_second_derivative, 0.0);
}

TEST(JensenGap, InconclusiveOutsideSymport) {
  LightSignal sig{{{100, 800}}, 2400};
  const std::vector<double> n{20, 40};
  EXPECT_FALSE(jensen_gap_check(VesicleSpec{}, n, KineticConstants{}, Environment{}, sig, 50).conclusive);
}

TEST(JensenGap, SecondDerivativeMatchesClosedForm) {
  // d^2 C_S / d n^2 = tau^2 W / (K_M (1 + W)^3), tau = g_Sym dt / (N_A V_in).
  Environment env;
  env.c_s_in0 = 0.05;
  const KineticConstants k;
  VesicleSpec v;
  for (double dt : {50.0, 200.0, 600.0}) {
    for (double n0 : {10.0, 30.0, 60.0}) {
      auto c_s = [&](double n) {
        v.n_symporters = n;
        return exact_substrate(env.c_s_in0, derive_rates(v, k, env), dt);
      };
      const double h = 0.02;
      const double fd = (c_s(n0 + h) - 2 * c_s(n0) + c_s(n0 - h)) / (h * h);
      v.n_symporters = n0;
      const auto r = derive_rates(v, k, env);
      const double w = c_s(n0) / k.michaelis_constant;
      const double tau = k.symport_rate * dt / (k.avogadro * r.v_in);
      const double exact = tau * tau * w / (k.michaelis_constant * std::pow(1 + w, 3));
      EXPECT_GT(fd, 0.0);
      EXPECT_NEAR(fd / exact, 1.0, 1e-3) << "dt=" << dt << " n=" << n0;
    }
  }
}
