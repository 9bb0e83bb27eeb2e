#include "coulomb/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <thread>

#include <boost/math/quadrature/gauss.hpp>

#include "coulomb/errors.hpp"

namespace coulomb {

namespace {

constexpr int kResyncInterval = 100;

double norm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

double distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double t = a[k] - b[k];
    s += t * t;
  }
  return std::sqrt(s);
}

// phi_1(0) = 0 is finite; higher dimensions treat r = 0 as singular.
double pair_phi(const CoulombKernel& kernel, double r) {
  if (r == 0.0) {
    if (kernel.dimension().value() == 1) return 0.0;
    throw DomainError("coincident particles: singular configuration");
  }
  return kernel.phi(r);
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

void GasConfig::validate() const {
  if (N < 1) throw std::invalid_argument("N must be >= 1");
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be > 0");
  if (!(R > 0.0)) throw std::invalid_argument("wall radius must be > 0");
  if (n_sweeps < 1 || burn_in < 0 || burn_in >= n_sweeps) {
    throw std::invalid_argument("need 0 <= burn_in < n_sweeps");
  }
  if (thinning < 1) throw std::invalid_argument("thinning must be >= 1");
  if (n_bins < 1) throw std::invalid_argument("n_bins must be >= 1");
  if (!(target_acceptance > 0.0 && target_acceptance < 1.0)) {
    throw std::invalid_argument("target acceptance must lie in (0, 1)");
  }
}

double GasConfig::histogram_max() const {
  if (hist_max > 0.0) return hist_max;
  if (std::isfinite(R)) return R;
  return 3.0 * critical_radius(pot, d);
}

double GasConfig::wall_shell() const {
  if (wall_delta >= 0.0) return wall_delta;
  return std::isfinite(R) ? 0.02 * R : 0.0;
}

double SampleStats::wall_fraction() const {
  const auto obs = observations();
  return obs == 0 ? 0.0 : static_cast<double>(wall_count) / static_cast<double>(obs);
}

double SampleStats::acceptance_rate() const {
  return proposed == 0 ? 0.0 : static_cast<double>(accepted) / static_cast<double>(proposed);
}

void SampleStats::merge(const SampleStats& other) {
  if (bin_edges != other.bin_edges || N != other.N) {
    throw std::invalid_argument("cannot merge statistics with different binning");
  }
  for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += other.counts[i];
  wall_count += other.wall_count;
  n_samples += other.n_samples;
  proposed += other.proposed;
  accepted += other.accepted;
  max_energy_drift = std::max(max_energy_drift, other.max_energy_drift);
  wall_violation = wall_violation || other.wall_violation;
}

double total_energy(std::span<const double> positions, int N, const RadialPotential& pot,
                    Dimension d) {
  const std::size_t dim = d.value();
  if (positions.size() != dim * N) throw std::invalid_argument("positions size != N * d");
  const CoulombKernel kernel(d);
  double pair = 0.0;
  double confinement = 0.0;
  for (int i = 0; i < N; ++i) {
    const auto xi = positions.subspan(i * dim, dim);
    confinement += pot.v(norm(xi));
    for (int j = i + 1; j < N; ++j) {
      pair += pair_phi(kernel, distance(xi, positions.subspan(j * dim, dim)));
    }
  }
  return pair + N * confinement;
}

std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t chain) {
  return splitmix64(splitmix64(seed) ^ splitmix64(chain + 0x632be59bd9b4e019ULL));
}

ChainState initial_state(const GasConfig& cfg, ChainRng& rng) {
  const int dim = cfg.d.value();
  const double r_star = critical_radius(cfg.pot, cfg.d);
  const double scale = std::min(cfg.R, r_star);
  const double radius = 0.9 * scale;

  ChainState s;
  s.positions.resize(static_cast<std::size_t>(cfg.N) * dim);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unif;
  for (int i = 0; i < cfg.N; ++i) {
    std::span<double> x(s.positions.data() + i * dim, dim);
    double len = 0.0;
    while (len == 0.0) {
      for (double& c : x) c = gauss(rng);
      len = norm(x);
    }
    const double r = radius * std::pow(unif(rng), 1.0 / dim);
    for (double& c : x) c *= r / len;
  }
  s.energy = total_energy(s.positions, cfg.N, cfg.pot, cfg.d);
  s.step_size = cfg.initial_step > 0.0 ? cfg.initial_step : 0.1 * scale;
  return s;
}

void metropolis_sweep(ChainState& state, const GasConfig& cfg, ChainRng& rng,
                      SweepCounters& counters) {
  const int dim = cfg.d.value();
  const int N = cfg.N;
  const CoulombKernel kernel(cfg.d);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unif;
  std::vector<double> proposal(dim);

  for (int i = 0; i < N; ++i) {
    ++counters.proposed;
    std::span<double> x(state.positions.data() + i * dim, dim);
    for (int k = 0; k < dim; ++k) proposal[k] = x[k] + state.step_size * gauss(rng);
    const double r_new = norm(proposal);
    if (r_new > cfg.R) continue;

    double delta = N * (cfg.pot.v(r_new) - cfg.pot.v(norm(x)));
    bool singular = false;
    for (int j = 0; j < N && !singular; ++j) {
      if (j == i) continue;
      std::span<const double> xj(state.positions.data() + j * dim, dim);
      const double r_to = distance(proposal, xj);
      if (r_to == 0.0 && dim >= 2) {
        singular = true;
        break;
      }
      delta += pair_phi(kernel, r_to) - pair_phi(kernel, distance(x, xj));
    }
    if (singular) continue;

    const double log_accept = -cfg.beta * delta;
    if (log_accept >= 0.0 || unif(rng) < std::exp(log_accept)) {
      std::copy(proposal.begin(), proposal.end(), x.begin());
      state.energy += delta;
      ++counters.accepted;
    }
  }
}

namespace {

SampleStats empty_stats(const GasConfig& cfg) {
  SampleStats st;
  st.N = cfg.N;
  st.wall_delta = cfg.wall_shell();
  const double top = cfg.histogram_max();
  st.bin_edges.resize(cfg.n_bins + 1);
  for (int b = 0; b <= cfg.n_bins; ++b) st.bin_edges[b] = top * b / cfg.n_bins;
  st.counts.assign(cfg.n_bins, 0);
  return st;
}

SampleStats run_chain(const GasConfig& cfg, std::uint64_t chain) {
  ChainRng rng(derive_stream_seed(cfg.seed, chain));
  ChainState state = initial_state(cfg, rng);
  SampleStats st = empty_stats(cfg);

  const int dim = cfg.d.value();
  const double top = st.bin_edges.back();
  const double wall_start = std::isfinite(cfg.R) ? cfg.R - st.wall_delta : kUnbounded;
  const double max_step = 10.0 * std::min(cfg.R, critical_radius(cfg.pot, cfg.d)) + 1.0;

  for (int sweep = 0; sweep < cfg.n_sweeps; ++sweep) {
    SweepCounters counters;
    metropolis_sweep(state, cfg, rng, counters);

    if (sweep < cfg.burn_in) {
      const double rate = static_cast<double>(counters.accepted) / counters.proposed;
      state.step_size *= std::exp(0.1 * (rate - cfg.target_acceptance));
      state.step_size = std::clamp(state.step_size, 1e-12, max_step);
    } else {
      st.proposed += counters.proposed;
      st.accepted += counters.accepted;
    }

    if ((sweep + 1) % kResyncInterval == 0) {
      const double exact = total_energy(state.positions, cfg.N, cfg.pot, cfg.d);
      const double drift = std::abs(state.energy - exact) / std::max(1.0, std::abs(exact));
      st.max_energy_drift = std::max(st.max_energy_drift, drift);
      state.energy = exact;
    }

    if (sweep >= cfg.burn_in && (sweep - cfg.burn_in) % cfg.thinning == 0) {
      ++st.n_samples;
      for (int i = 0; i < cfg.N; ++i) {
        const double r = norm(std::span<const double>(state.positions.data() + i * dim, dim));
        if (r > cfg.R) st.wall_violation = true;
        if (r > wall_start) ++st.wall_count;
        auto bin = static_cast<std::size_t>(r / top * cfg.n_bins);
        st.counts[std::min(bin, st.counts.size() - 1)] += 1;
      }
    }
  }
  return st;
}

}  // namespace

unsigned worker_threads() {
  if (const char* env = std::getenv("COULOMB_LAB_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return static_cast<unsigned>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

SampleStats run(const GasConfig& cfg, int n_chains) {
  cfg.validate();
  if (n_chains < 1) throw std::invalid_argument("n_chains must be >= 1");

  std::vector<SampleStats> per_chain(n_chains);
  std::vector<std::exception_ptr> errors(n_chains);
  const unsigned workers = std::min<unsigned>(worker_threads(), n_chains);
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < workers; ++t) {
      pool.emplace_back([&, t] {
        for (int c = static_cast<int>(t); c < n_chains; c += static_cast<int>(workers)) {
          try {
            per_chain[c] = run_chain(cfg, static_cast<std::uint64_t>(c));
          } catch (...) {
            errors[c] = std::current_exception();
          }
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  SampleStats merged = per_chain.front();
  for (int c = 1; c < n_chains; ++c) merged.merge(per_chain[c]);
  return merged;
}

DensityReport compare_density(const SampleStats& stats, const ConstrainedMeasure& measure,
                              double delta) {
  DensityReport rep;
  rep.surface_weight = measure.surface_weight;
  rep.wall_fraction = stats.wall_fraction();
  rep.wall_gap = std::abs(rep.wall_fraction - rep.surface_weight);
  if (stats.N < 2) {
    rep.mean_field_applicable = false;
    rep.note = "N too small for mean-field comparison";
  }

  const double total = static_cast<double>(stats.observations());
  if (total == 0.0) {
    rep.note = rep.note.empty() ? "no observations" : rep.note;
    return rep;
  }
  const double cutoff = measure.R - delta;
  auto bulk_cdf = [&](double r) {
    return r >= measure.edge() ? measure.bulk_mass() : radial_cdf(measure, r);
  };
  for (std::size_t b = 0; b < stats.counts.size(); ++b) {
    const double lo = stats.bin_edges[b];
    const double hi = stats.bin_edges[b + 1];
    if (hi > cutoff * (1.0 + 1e-12)) break;
    const double empirical = static_cast<double>(stats.counts[b]) / total;
    rep.bulk_l1 += std::abs(empirical - (bulk_cdf(hi) - bulk_cdf(lo)));
    ++rep.bulk_bins;
  }
  return rep;
}

double ks_distance(const SampleStats& stats, const std::function<double(double)>& cdf) {
  const double total = static_cast<double>(stats.observations());
  if (total == 0.0) return 0.0;
  double cumulative = 0.0;
  double worst = std::abs(cdf(stats.bin_edges.front()));
  for (std::size_t b = 0; b < stats.counts.size(); ++b) {
    cumulative += static_cast<double>(stats.counts[b]);
    // The last bin also holds any overflow, so its right edge is "everything".
    const double r = b + 1 == stats.counts.size() ? kUnbounded : stats.bin_edges[b + 1];
    const double reference = std::isfinite(r) ? cdf(r) : 1.0;
    worst = std::max(worst, std::abs(cumulative / total - reference));
  }
  return worst;
}

std::function<double(double)> one_particle_cdf(const RadialPotential& pot, Dimension d,
                                               double beta, double R) {
  const int dim = d.value();
  double top = R;
  if (!std::isfinite(top)) {
    top = critical_radius(pot, d);
    // Extend until the Boltzmann factor is negligible relative to its peak scale.
    while (beta * pot.v(top) - (dim - 1) * std::log(top) < 60.0 + beta * pot.v(0.0)) top *= 1.5;
  }
  auto density = [pot, beta, dim](double r) {
    return ipow(r, dim - 1) * std::exp(-beta * (pot.v(r) - pot.v(0.0)));
  };
  using Panel = boost::math::quadrature::gauss<double, 20>;
  constexpr int kPanels = 4000;
  std::vector<double> nodes(kPanels + 1);
  std::vector<double> mass(kPanels + 1, 0.0);
  for (int k = 0; k <= kPanels; ++k) nodes[k] = top * k / kPanels;
  for (int k = 1; k <= kPanels; ++k) {
    mass[k] = mass[k - 1] + Panel::integrate(density, nodes[k - 1], nodes[k]);
  }
  // Tabulated panel sums plus the partial panel, integrated on demand.
  return [nodes = std::move(nodes), mass = std::move(mass), density, top](double r) {
    if (r <= 0.0) return 0.0;
    if (r >= top) return 1.0;
    const auto k = std::min(static_cast<std::size_t>(r / top * (nodes.size() - 1)), nodes.size() - 2);
    return (mass[k] + Panel::integrate(density, nodes[k], r)) / mass.back();
  };
}

}  // namespace coulomb
