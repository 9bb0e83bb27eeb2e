#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "coulomb/equilibrium.hpp"
#include "coulomb/kernel.hpp"
#include "coulomb/potential.hpp"

namespace coulomb {

inline constexpr double kUnbounded = std::numeric_limits<double>::infinity();

struct GasConfig {
  int N = 1;
  Dimension d{2};
  double beta = 1.0;
  double R = kUnbounded;  // hard wall radius
  RadialPotential pot = quadratic_potential();
  std::uint64_t seed = 0;
  int n_sweeps = 1000;
  int burn_in = 100;
  int thinning = 1;

  int n_bins = 50;
  double hist_max = 0.0;     // 0: R if finite, else 3 R*
  double wall_delta = -1.0;  // < 0: 0.02 R
  double initial_step = 0.0; // 0: 0.1 min(R, R*)
  double target_acceptance = 0.3;

  /// Throws std::invalid_argument on N < 1, beta <= 0, burn_in >= n_sweeps, ...
  void validate() const;
  double histogram_max() const;
  double wall_shell() const;
};

struct ChainState {
  std::vector<double> positions;  // N points in R^d, row-major
  double energy = 0.0;
  double step_size = 0.0;
};

struct SweepCounters {
  std::uint64_t proposed = 0;
  std::uint64_t accepted = 0;
};

struct SampleStats {
  int N = 0;
  std::vector<double> bin_edges;
  std::vector<std::uint64_t> counts;
  double wall_delta = 0.0;
  std::uint64_t wall_count = 0;
  std::uint64_t n_samples = 0;   // recorded configurations
  std::uint64_t proposed = 0;    // sampling phase only
  std::uint64_t accepted = 0;
  double max_energy_drift = 0.0; // relative cache error seen at re-syncs
  bool wall_violation = false;

  std::uint64_t observations() const { return n_samples * static_cast<std::uint64_t>(N); }
  double wall_fraction() const;
  double acceptance_rate() const;
  /// Adds another chain's statistics; requires identical binning.
  void merge(const SampleStats& other);
};

/// E_d = 1/2 sum_{i != j} phi_d(|x_i - x_j|) + N sum_k v(|x_k|).
/// Coincident points throw DomainError for d >= 2 (phi_1 is finite).
double total_energy(std::span<const double> positions, int N, const RadialPotential& pot,
                    Dimension d);

/// Per-chain seed: SplitMix64 finalizer applied to (seed, chain index).
std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t chain);

using ChainRng = std::mt19937_64;

/// Fresh chain: positions uniform in a ball inside min(R, R*), cached energy,
/// initial step size.
ChainState initial_state(const GasConfig& cfg, ChainRng& rng);

/// N single-particle Metropolis updates with isotropic Gaussian proposals.
/// Proposals outside the wall (or onto another particle, d >= 2) are rejected.
/// beta is taken as given, so beta = 0 samples the uniform law in the ball.
void metropolis_sweep(ChainState& state, const GasConfig& cfg, ChainRng& rng,
                      SweepCounters& counters);

/// Runs n_chains independent chains in parallel (COULOMB_LAB_THREADS caps the
/// worker count) and merges their statistics in chain order. Step sizes adapt
/// toward the target acceptance during burn-in only.
SampleStats run(const GasConfig& cfg, int n_chains);

struct DensityReport {
  bool mean_field_applicable = true;
  std::string note;
  double bulk_l1 = 0.0;   // histogram vs analytic bulk, wall shell excluded
  double wall_fraction = 0.0;
  double surface_weight = 0.0;
  double wall_gap = 0.0;
  int bulk_bins = 0;
};

/// Compares the radial histogram with the analytic constrained measure.
/// Bins ending inside the wall shell [R - delta, R] are excluded from bulk_l1.
DensityReport compare_density(const SampleStats& stats, const ConstrainedMeasure& measure,
                              double delta);

/// Kolmogorov-Smirnov distance between the radial histogram and a CDF,
/// evaluated at the bin edges.
double ks_distance(const SampleStats& stats, const std::function<double(double)>& cdf);

/// Radial CDF of a single particle, density ~ r^{d-1} exp(-beta v(r)) on
/// [0, R]. When unbounded the table extends until the weight has fallen by
/// about e^{-60}.
std::function<double(double)> one_particle_cdf(const RadialPotential& pot, Dimension d,
                                               double beta, double R);

/// Worker cap from COULOMB_LAB_THREADS, else hardware concurrency.
unsigned worker_threads();

}  // namespace coulomb
