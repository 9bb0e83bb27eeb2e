#include "coulomb/cli.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "coulomb/equilibrium.hpp"
#include "coulomb/errors.hpp"
#include "coulomb/io.hpp"
#include "coulomb/oracle.hpp"
#include "coulomb/potential.hpp"
#include "coulomb/rate.hpp"
#include "coulomb/sampler.hpp"

namespace coulomb::cli {

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

double to_double(std::string_view s) {
  const std::string str(s);
  if (str == "inf" || str == "+inf") return kUnbounded;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(str, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != str.size()) throw UsageError("not a number: '" + str + "'");
  return v;
}

int to_int(std::string_view s) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw UsageError("not an integer: '" + std::string(s) + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(s.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

}  // namespace

std::vector<double> GridSpec::values() const {
  std::vector<double> out(count);
  for (int i = 0; i < count; ++i) {
    out[i] = i + 1 == count ? stop : start + (stop - start) * i / (count - 1);
  }
  return out;
}

GridSpec parse_grid(std::string_view text) {
  const auto parts = split(text, ':');
  if (parts.size() != 3) throw UsageError("grid must be start:stop:count");
  GridSpec g{to_double(parts[0]), to_double(parts[1]), to_int(parts[2])};
  if (g.count < 2 || !(g.start < g.stop)) {
    throw UsageError("grid needs count >= 2 and start < stop");
  }
  return g;
}

std::vector<int> parse_int_list(std::string_view text) {
  std::vector<int> out;
  for (auto p : split(text, ',')) out.push_back(to_int(p));
  return out;
}

std::vector<double> parse_double_list(std::string_view text) {
  std::vector<double> out;
  for (auto p : split(text, ',')) out.push_back(to_double(p));
  return out;
}

double parse_radius(std::string_view text) {
  const double r = to_double(text);
  if (!(r > 0.0)) throw UsageError("radius must be positive");
  return r;
}

namespace {

struct Context {
  const RunConfig& cfg;
  std::ostream& out;
  std::ostream& err;

  // One writer per file; without --out everything goes to stdout in order.
  void emit(const std::string& filename, const std::string& content) const {
    if (cfg.out_dir.empty()) {
      out << content;
      if (!content.empty() && content.back() != '\n') out << '\n';
      return;
    }
    std::filesystem::create_directories(cfg.out_dir);
    const auto path = std::filesystem::path(cfg.out_dir) / filename;
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << content;
  }

  bool json() const { return cfg.format == "json"; }
};

std::string suffix(const std::string& cmd, int d, const char* ext) {
  return cmd + "_d" + std::to_string(d) + ext;
}

// Potentials must satisfy the standing assumptions before any computation.
RadialPotential checked_potential(const RunConfig& cfg, int d) {
  if (d < 1) throw UsageError("dimension must be >= 1");
  RadialPotential pot;
  try {
    pot = potential_from_id(cfg.potential);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const auto rep = validate_assumptions(pot, Dimension(d), cfg.r_max, cfg.n_probe);
  if (!rep.passed()) {
    std::string msg = "potential '" + cfg.potential + "' violates assumptions in d=" + std::to_string(d) + ":";
    for (const auto* c : rep.checks()) {
      if (!c->passed) msg += " [" + c->name + ": " + c->detail + "]";
    }
    throw UsageError(msg);
  }
  return pot;
}

int cmd_rate(const Context& ctx) {
  if (!ctx.cfg.grid) throw UsageError("rate needs --grid start:stop:count");
  const auto grid = ctx.cfg.grid->values();
  for (int d : ctx.cfg.dims) {
    const auto pot = checked_potential(ctx.cfg, d);
    const auto report = rate_report(pot, Dimension(d), grid);
    if (ctx.json()) {
      ctx.emit(suffix("rate", d, ".json"), io::rate_report_json(report).dump(2));
      continue;
    }
    std::ostringstream csv;
    if (ctx.cfg.out_dir.empty()) csv << "# " << io::rate_summary_json(report).dump() << '\n';
    io::write_rate_csv(csv, report);
    ctx.emit(suffix("rate", d, ".csv"), csv.str());
    if (!ctx.cfg.out_dir.empty()) {
      ctx.emit(suffix("rate", d, ".json"), io::rate_summary_json(report).dump(2));
    }
  }
  return kSuccess;
}

int cmd_density(const Context& ctx) {
  for (int d : ctx.cfg.dims) {
    const auto pot = checked_potential(ctx.cfg, d);
    const auto measure = constrained_measure(pot, Dimension(d), ctx.cfg.R);
    if (ctx.json()) {
      nlohmann::json j{{"d", d},
                       {"R", io::number_or_null(measure.R)},
                       {"r_star", measure.r_star},
                       {"surface_weight", measure.surface_weight}};
      std::vector<double> r, m, c;
      for (int k = 1; k <= ctx.cfg.points; ++k) {
        r.push_back(measure.edge() * k / ctx.cfg.points);
        m.push_back(measure.bulk_density(r.back()));
        c.push_back(radial_cdf(measure, r.back()));
      }
      j["r"] = r;
      j["bulk_density"] = m;
      j["cdf"] = c;
      ctx.emit(suffix("density", d, ".json"), j.dump(2));
    } else {
      std::ostringstream csv;
      io::write_measure_csv(csv, measure, ctx.cfg.points);
      ctx.emit(suffix("density", d, ".csv"), csv.str());
    }
  }
  return kSuccess;
}

int cmd_critical(const Context& ctx) {
  nlohmann::json rows = nlohmann::json::array();
  std::ostringstream csv;
  csv << "d,r_star\n";
  for (int d : ctx.cfg.dims) {
    const auto pot = checked_potential(ctx.cfg, d);
    const double r_star = critical_radius(pot, Dimension(d));
    rows.push_back({{"d", d}, {"r_star", r_star}});
    csv << d << ',' << io::format_number(r_star) << '\n';
  }
  if (ctx.json()) {
    ctx.emit("critical.json", rows.dump(2));
  } else {
    ctx.emit("critical.csv", csv.str());
  }
  return kSuccess;
}

int cmd_oracle(const Context& ctx) {
  for (int d : ctx.cfg.dims) {
    const auto pot = checked_potential(ctx.cfg, d);
    const Dimension dim(d);
    const double r_star = critical_radius(pot, dim);
    const auto result = minimize(pot, dim, ctx.cfg.R, ctx.cfg.cells, ctx.cfg.max_iter, ctx.cfg.kkt_tol);
    const auto cmp = compare_to_analytic(result, pot, dim, ctx.cfg.R);
    nlohmann::json record = io::oracle_convergence_json(result);
    record["comparison"] = {{"analytic_energy", cmp.analytic_energy},
                            {"energy_gap", cmp.energy_gap},
                            {"bulk_l1", cmp.bulk_l1},
                            {"analytic_surface", cmp.analytic_surface},
                            {"surface_gap", cmp.surface_gap}};
    if (ctx.json()) {
      record["w"] = result.measure.w;
      ctx.emit(suffix("oracle", d, ".json"), record.dump(2));
      continue;
    }
    std::ostringstream csv;
    io::write_oracle_csv(csv, result, dim, r_star);
    ctx.emit(suffix("oracle", d, ".csv"), csv.str());
    if (ctx.cfg.out_dir.empty()) {
      ctx.out << "# " << record.dump() << '\n';
    } else {
      ctx.emit(suffix("oracle", d, ".json"), record.dump(2));
    }
  }
  return kSuccess;
}

int cmd_sample(const Context& ctx) {
  for (int d : ctx.cfg.dims) {
    const auto pot = checked_potential(ctx.cfg, d);
    GasConfig gas;
    gas.N = ctx.cfg.N;
    gas.d = Dimension(d);
    gas.beta = ctx.cfg.beta;
    gas.R = ctx.cfg.R;
    gas.pot = pot;
    gas.seed = ctx.cfg.seed;
    gas.n_sweeps = ctx.cfg.sweeps;
    gas.burn_in = ctx.cfg.burn_in >= 0 ? ctx.cfg.burn_in : ctx.cfg.sweeps / 5;
    gas.thinning = ctx.cfg.thinning;
    gas.n_bins = ctx.cfg.bins;
    gas.hist_max = ctx.cfg.hist_max;
    gas.wall_delta = ctx.cfg.delta;
    try {
      gas.validate();
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }

    const auto stats = run(gas, ctx.cfg.chains);
    const auto measure = constrained_measure(pot, gas.d, gas.R);
    const auto density = compare_density(stats, measure, gas.wall_shell());

    nlohmann::json report = io::sample_header_json(stats, gas, ctx.cfg.chains);
    report["density"] = io::density_report_json(density);
    report["max_energy_drift"] = stats.max_energy_drift;
    report["observations"] = stats.observations();
    if (gas.N == 1) {
      const double ks = ks_distance(stats, one_particle_cdf(pot, gas.d, gas.beta, gas.R));
      report["ks_one_particle"] = ks;
      report["ks_pass"] = ks < 0.02;
    }

    if (ctx.json()) {
      report["bin_edges"] = stats.bin_edges;
      report["counts"] = stats.counts;
      ctx.emit(suffix("sample", d, ".json"), report.dump(2));
      continue;
    }
    std::ostringstream csv;
    io::write_sample_csv(csv, stats, gas, ctx.cfg.chains);
    ctx.emit(suffix("sample", d, ".csv"), csv.str());
    if (ctx.cfg.out_dir.empty()) {
      ctx.out << "# " << report.dump() << '\n';
    } else {
      ctx.emit(suffix("sample", d, ".json"), report.dump(2));
    }
  }
  return kSuccess;
}

std::string fmt(double x) {
  std::ostringstream s;
  s << std::setprecision(10) << x;
  return s.str();
}

}  // namespace

std::vector<CheckResult> verify_checks(const RunConfig& cfg, int d) {
  std::vector<CheckResult> checks;
  RadialPotential pot;
  try {
    pot = potential_from_id(cfg.potential);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (d < 1) throw UsageError("dimension must be >= 1");
  const Dimension dim(d);

  auto attempt = [&](const std::string& name, const std::function<CheckResult()>& body) {
    CheckResult r;
    try {
      r = body();
    } catch (const std::exception& e) {
      r.passed = false;
      r.detail = e.what();
    }
    r.name = name;
    checks.push_back(r);
    return r.passed;
  };

  const bool assumptions = attempt("assumptions", [&] {
    const auto rep = validate_assumptions(pot, dim, cfg.r_max, cfg.n_probe);
    CheckResult r{"", rep.passed(), ""};
    for (const auto* c : rep.checks()) {
      if (c->passed) continue;
      r.detail += c->name + " fails at r=" + fmt(*c->first_violation) + " (" + c->detail + "); ";
    }
    if (r.passed) r.detail = "all " + std::to_string(rep.checks().size()) + " probes pass";
    return r;
  });
  if (!assumptions) return checks;

  double r_star = 0.0;
  if (!attempt("critical radius", [&] {
        r_star = critical_radius(pot, dim);
        return CheckResult{"", true, "R* = " + fmt(r_star)};
      })) {
    return checks;
  }

  attempt("C2 matching at R*", [&] {
    const auto der = free_energy_derivatives(pot, dim, r_star, r_star);
    const bool ok = std::abs(der.first) <= 1e-10 && std::abs(der.second) <= 1e-10;
    return CheckResult{"", ok, "F'(R*-) = " + fmt(der.first) + ", F''(R*-) = " + fmt(der.second)};
  });

  const double left = third_derivative_left_limit(pot, dim);
  attempt("third-derivative jump", [&] {
    return CheckResult{"", left < 0.0,
                       "third_left_limit = " + fmt(left) + ", third_jump = " + fmt(-left)};
  });

  attempt("transition scan", [&] {
    const auto scan = transition_scan(pot, dim, cfg.h_values);
    bool ok = true;
    std::string why;
    const ScanRow* finest = &scan.scan.front();
    for (const auto& row : scan.scan) {
      if (row.h < finest->h) finest = &row;
      if (row.right_d1 != 0.0 || row.right_d2 != 0.0 || row.right_d3 != 0.0) {
        ok = false;
        why += "nonzero right difference at h=" + fmt(row.h) + "; ";
      }
      const double bound = 2.0 * std::abs(left) * row.h;
      if (std::abs(row.left_d1) > bound || std::abs(row.left_d2) > bound) {
        ok = false;
        why += "left first/second difference not O(h) at h=" + fmt(row.h) + "; ";
      }
    }
    const double cubic_target = std::abs(left) / 6.0;
    if (std::abs(finest->cubic_ratio - cubic_target) > 0.01 * cubic_target) {
      ok = false;
      why += "F(R*-h)/h^3 off target; ";
    }
    if (scan.extrapolated_left_third &&
        std::abs(*scan.extrapolated_left_third - left) > 0.02 * std::abs(left)) {
      ok = false;
      why += "extrapolated third difference off; ";
    }
    std::string detail = "F(R*-h)/h^3 = " + fmt(finest->cubic_ratio) + " at h=" + fmt(finest->h) +
                         " (target " + fmt(cubic_target) + ")";
    if (scan.extrapolated_left_third) {
      detail += ", extrapolated F'''(R*-) = " + fmt(*scan.extrapolated_left_third);
    }
    return CheckResult{"", ok, why.empty() ? detail : why + detail};
  });

  for (double fraction : {0.3, 0.6, 1.0}) {
    const double R = fraction == 1.0 ? r_star : fraction * r_star;
    attempt("equilibrium certificate R=" + fmt(R), [&] {
      const auto cert = certify_equilibrium(pot, dim, R, cfg.probes, cfg.cert_tol);
      std::string detail = "C_R = " + fmt(cert.level) + ", max_dev_inside = " + fmt(cert.max_dev_inside);
      if (cert.exterior_probe_count > 0) detail += ", min_margin_outside = " + fmt(cert.min_margin_outside);
      return CheckResult{"", cert.passed(), detail};
    });
  }

  attempt("free energy via minimum energies", [&] {
    const double R = 0.5 * r_star;
    const double via_energy = mean_field_energy(pot, dim, R) - mean_field_energy(pot, dim, r_star);
    const double direct = excess_free_energy(pot, dim, R, r_star);
    const double gap = std::abs(via_energy - direct);
    return CheckResult{"", gap <= 1e-9 * std::max(1.0, std::abs(direct)),
                       "|E(R)-E(R*)-F(R)| = " + fmt(gap) + " at R = R*/2"};
  });

  if (pot.label == "quadratic") {
    attempt("closed form", [&] {
      double worst = 0.0;
      for (double R : GridSpec{0.05, 1.5, 200}.values()) {
        const double f = excess_free_energy(pot, dim, R, r_star);
        worst = std::max(worst, std::abs(f - quadratic_closed_form(dim, R)) / std::max(1.0, std::abs(f)));
      }
      return CheckResult{"", worst <= 1e-9, "max scaled gap " + fmt(worst) + " on 200 points"};
    });
  }

  attempt("right tail monotone", [&] {
    double prev = -1.0;
    bool ok = true;
    for (int i = 0; i < 100; ++i) {
      const double h = right_tail(pot, dim, r_star * (1.0 + 2.0 * i / 99.0));
      ok = ok && h >= prev;
      prev = h;
    }
    return CheckResult{"", ok, "H_d(3R*) = " + fmt(prev)};
  });
  return checks;
}

namespace {

int cmd_verify(const Context& ctx) {
  bool all = true;
  nlohmann::json failures = nlohmann::json::array();
  nlohmann::json per_d = nlohmann::json::array();
  std::ostringstream table;
  for (int d : ctx.cfg.dims) {
    const auto checks = verify_checks(ctx.cfg, d);
    nlohmann::json list = nlohmann::json::array();
    table << "d=" << d << " potential=" << ctx.cfg.potential << '\n';
    for (const auto& c : checks) {
      table << (c.passed ? "  PASS  " : "  FAIL  ") << std::left << std::setw(34) << c.name << c.detail
            << '\n';
      list.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
      if (!c.passed) {
        all = false;
        failures.push_back({{"d", d}, {"check", c.name}, {"detail", c.detail}});
      }
    }
    per_d.push_back({{"d", d}, {"checks", list}});
  }
  nlohmann::json summary{{"potential", ctx.cfg.potential}, {"passed", all}, {"results", per_d},
                         {"failures", failures}};
  if (ctx.json()) {
    ctx.emit("verify.json", summary.dump(2));
  } else {
    ctx.out << table.str();
    if (!all) ctx.out << nlohmann::json{{"failures", failures}}.dump() << '\n';
    if (!ctx.cfg.out_dir.empty()) ctx.emit("verify.json", summary.dump(2));
  }
  return all ? kSuccess : kVerificationFailed;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Constrained Coulomb gases: equilibrium measures, rate functions, oracles"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string dims = "2";
  std::string grid;
  std::string radius = "1";
  std::string steps = "1e-2,1e-3,1e-4";

  auto common = [&](CLI::App* sub) {
    sub->add_option("--potential", cfg.potential, "quadratic | quartic | linear-a[:a]");
    sub->add_option("--d", dims, "comma-separated dimensions");
    sub->add_option("--out", cfg.out_dir, "output directory (default: stdout)");
    sub->add_option("--format", cfg.format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--r-max", cfg.r_max, "assumption probe radius");
    sub->add_option("--n-probe", cfg.n_probe, "assumption probe count");
  };

  auto* rate = app.add_subcommand("rate", "tabulate F_d and its derivatives on an R grid");
  common(rate);
  rate->add_option("--grid", grid, "start:stop:count")->required();

  auto* density = app.add_subcommand("density", "constrained equilibrium measure");
  common(density);
  density->add_option("--R", radius, "wall radius");
  density->add_option("--points", cfg.points, "output rows");

  auto* critical = app.add_subcommand("critical", "critical radius R*");
  common(critical);

  auto* verify = app.add_subcommand("verify", "check the third-order transition and equilibrium");
  common(verify);
  verify->add_option("--probes", cfg.probes, "equilibrium probes");
  verify->add_option("--cert-tol", cfg.cert_tol, "equilibrium certificate tolerance");
  verify->add_option("--steps", steps, "finite-difference steps");

  auto* oracle = app.add_subcommand("oracle", "direct minimization of the discretized energy");
  common(oracle);
  oracle->add_option("--R", radius, "wall radius");
  oracle->add_option("--n", cfg.cells, "radial cells");
  oracle->add_option("--max-iter", cfg.max_iter, "iteration cap");
  oracle->add_option("--tol", cfg.kkt_tol, "KKT residual tolerance");

  auto* sample = app.add_subcommand("sample", "Metropolis sampling of the finite-N gas");
  common(sample);
  sample->add_option("--N", cfg.N, "particles");
  sample->add_option("--beta", cfg.beta, "inverse temperature");
  sample->add_option("--R", radius, "wall radius or inf");
  sample->add_option("--sweeps", cfg.sweeps, "sweeps per chain");
  sample->add_option("--burn-in", cfg.burn_in, "burn-in sweeps (default sweeps/5)");
  sample->add_option("--thinning", cfg.thinning, "record every k-th sweep");
  sample->add_option("--chains", cfg.chains, "independent chains");
  sample->add_option("--seed", cfg.seed, "base seed");
  sample->add_option("--bins", cfg.bins, "histogram bins");
  sample->add_option("--delta", cfg.delta, "wall shell width (default 0.02 R)");
  sample->add_option("--hist-max", cfg.hist_max, "histogram range when unbounded");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsageError;
  }

  try {
    cfg.dims = parse_int_list(dims);
    if (!grid.empty()) cfg.grid = parse_grid(grid);
    cfg.R = parse_radius(radius);
    cfg.h_values = parse_double_list(steps);
    for (int d : cfg.dims) {
      if (d < 1) throw UsageError("dimension must be >= 1");
    }

    const Context ctx{cfg, out, err};
    if (*rate) return cmd_rate(ctx);
    if (*density) return cmd_density(ctx);
    if (*critical) return cmd_critical(ctx);
    if (*verify) return cmd_verify(ctx);
    if (*oracle) return cmd_oracle(ctx);
    if (*sample) return cmd_sample(ctx);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  }
  return kUsageError;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace coulomb::cli
