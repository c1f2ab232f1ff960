#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "vtx/analytic.hpp"
#include "vtx/cycle_schedule.hpp"
#include "vtx/fdm.hpp"
#include "vtx/model.hpp"
#include "vtx/trajectory.hpp"

namespace vtx {

/// Random vesicle population. Diameters are l_ves + LogNormal(mu_ves,
/// sigma_ves) in metres; protein slots follow from the outer surface and the
/// areal density; log10 of the permeability (m/s) is a normal truncated to
/// (lower_l, upper_l).
struct PopulationDistributions {
  double l_ves = 39.74e-9;      // m
  double mu_ves = 4.16 - 20.72326583694641;  // ln(m), 4.16 ln(nm)
  double sigma_ves = 0.62;
  double d_mem = 14e-9;         // m
  double protein_density = 1.685e15;  // slots per m^2 of outer surface
  double p_pump = 4.0 / 7.0;
  double mu_l = -5.52;          // log10(m/s)
  double sigma_l = 0.25;
  double lower_l = -5.77;
  double upper_l = -5.27;

  void validate() const;

  double mean_diameter() const;
  /// E{g_L} over the truncated distribution, m/s.
  double mean_permeability() const;
  /// Moments of log10(g_L) under the truncation.
  double mean_log10_permeability() const;
  double variance_log10_permeability() const;
};

/// floor(pi (d_in + 2 d_mem)^2 rho)
int protein_slots(double d_in, double d_mem, double density);

/// Inverse-CDF draw from N(mu, sigma) restricted to (lower, upper).
double sample_truncated_normal(double mu, double sigma, double lower, double upper, std::mt19937_64& rng);

VesicleSpec sample_vesicle(const PopulationDistributions& dist, std::mt19937_64& rng);

/// Generator for vesicle `index` of experiment `experiment`, independent of
/// how work is split across threads.
std::mt19937_64 vesicle_rng(std::uint64_t seed, std::uint64_t experiment, std::uint64_t index);

/// Vesicle built from the distribution means; protein counts are the
/// expected (fractional) values at the mean diameter.
VesicleSpec mean_parameter_vesicle(const PopulationDistributions& dist);

enum class EnsembleSolver { closed, exact, fdm };

struct EnsembleConfig {
  double n_ves = 1e11;   // nominal vesicles in the experiment
  int n_mod = 100;       // vesicles simulated per experiment
  int n_ex = 10;         // experiments
  std::uint64_t seed = 1;
  double v_out_tot = 1e-6;  // m^3
  EnsembleSolver solver = EnsembleSolver::closed;
  double dt_out = 1.0;   // s, grid of the statistics series
  int workers = 1;
  FdmConfig fdm;         // used by the fdm solver (shared pool)

  void validate() const;
  /// V_out_tot / n_ves.
  double per_vesicle_volume() const;
};

/// Uniform average of C_S_out over trajectories on a common grid.
std::vector<double> aggregate_substrate(std::span<const Trajectory> trajectories);

/// Pointwise unbiased variance across experiments (n - 1 divisor).
std::vector<double> inter_experiment_variance(std::span<const std::vector<double>> series);

struct ExperimentStats {
  std::vector<double> mean_c_h_in;
  std::vector<double> std_c_h_in;
  std::vector<double> mean_c_s_out;  // pooled C_S_out
  std::vector<double> std_c_s_out;
  // Medians of the first-cycle t2 and t4 over vesicles whose first cycle
  // has symport; t4 is +inf for vesicles still releasing at the horizon.
  double median_symport_start = 0;
  double median_symport_end = 0;
  int vesicles_with_symport = 0;
};

struct EnsembleResult {
  std::vector<double> t;
  std::vector<ExperimentStats> experiments;
  std::vector<double> inter_mean_c_s_out;
  std::vector<double> inter_var_c_s_out;
  std::vector<double> inter_mean_c_h_in;
  std::vector<double> inter_var_c_h_in;
  Trajectory reference;  // mean-parameter SVS on the same grid
  std::string solver;
};

EnsembleResult run_ensemble(const PopulationDistributions& dist, const KineticConstants& k,
                            const Environment& env, const LightSignal& signal, const EnsembleConfig& cfg);

struct JensenGap {
  bool conclusive = false;       // symport active at t_probe for the mean vesicle
  double ensemble_mean = 0;      // E{C_S_in(n_Sym)}
  double mean_parameter = 0;     // C_S_in(E{n_Sym})
  double gap = 0;                // ensemble_mean - mean_parameter
  double min_second_derivative = 0;  // d^2 C_S_in / d n_Sym^2 over the probe grid
};

/// Evaluates the exact substrate law at t_probe for each n_Sym value (others
/// from `base`), using the symport interval of the mean-n_Sym vesicle that
/// contains t_probe. Also scans the central-difference second derivative in
/// n_Sym (treated as real) over elapsed symport times up to that interval.
JensenGap jensen_gap_check(const VesicleSpec& base, std::span<const double> n_sym_values,
                           const KineticConstants& k, const Environment& env, const LightSignal& signal,
                           double t_probe);

}  // namespace vtx
