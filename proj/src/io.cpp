#include "coulomb/io.hpp"

#include <charconv>
#include <cmath>

namespace coulomb::io {

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, end);
}

nlohmann::json number_or_null(double x) {
  return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr);
}

namespace {

void write_header(std::ostream& os, const nlohmann::json& header) {
  os << "# " << header.dump() << '\n';
}

}  // namespace

void write_measure_csv(std::ostream& os, const ConstrainedMeasure& measure, int n_points) {
  write_header(os, {{"d", measure.d.value()},
                    {"R", number_or_null(measure.R)},
                    {"r_star", measure.r_star},
                    {"surface_weight", measure.surface_weight}});
  os << "r,bulk_density,cdf\n";
  const double edge = measure.edge();
  for (int k = 1; k <= n_points; ++k) {
    const double r = edge * k / n_points;
    os << format_number(r) << ',' << format_number(measure.bulk_density(r)) << ','
       << format_number(radial_cdf(measure, r)) << '\n';
  }
}

void write_oracle_csv(std::ostream& os, const OracleResult& result, Dimension d, double r_star) {
  const auto& grid = result.measure.grid;
  const auto& w = result.measure.w;
  write_header(os, {{"d", d.value()},
                    {"R", grid.R},
                    {"r_star", r_star},
                    {"surface_weight", w.empty() ? 0.0 : w.back()}});
  os << "r,bulk_density,cdf\n";
  double cdf = 0.0;
  for (int i = 0; i < grid.n; ++i) {
    cdf += w[i];
    os << format_number(grid.nodes[i]) << ',' << format_number(w[i] / grid.cell_width()) << ','
       << format_number(cdf) << '\n';
  }
}

nlohmann::json oracle_convergence_json(const OracleResult& result) {
  return {{"iterations", result.iterations},
          {"kkt_residual", result.kkt_residual},
          {"energy", result.energy},
          {"converged", result.converged}};
}

void write_rate_csv(std::ostream& os, const RateFunctionReport& report) {
  os << "R,F,dF,d2F,d3F\n";
  for (std::size_t i = 0; i < report.grid.size(); ++i) {
    os << format_number(report.grid[i]) << ',' << format_number(report.F[i]) << ','
       << format_number(report.dF[i]) << ',' << format_number(report.d2F[i]) << ','
       << format_number(report.d3F[i]) << '\n';
  }
}

nlohmann::json rate_summary_json(const RateFunctionReport& report) {
  return {{"d", report.d},
          {"r_star", report.r_star},
          {"third_left_limit", report.third_left_limit},
          {"third_jump", report.third_jump}};
}

nlohmann::json rate_report_json(const RateFunctionReport& report) {
  auto j = rate_summary_json(report);
  j["R"] = report.grid;
  j["F"] = report.F;
  j["dF"] = report.dF;
  j["d2F"] = report.d2F;
  j["d3F"] = report.d3F;
  if (!report.scan.empty()) {
    auto rows = nlohmann::json::array();
    for (const auto& s : report.scan) {
      rows.push_back({{"h", s.h},
                      {"cubic_ratio", s.cubic_ratio},
                      {"left_d1", s.left_d1},
                      {"left_d2", s.left_d2},
                      {"left_d3", s.left_d3},
                      {"right_d1", s.right_d1},
                      {"right_d2", s.right_d2},
                      {"right_d3", s.right_d3}});
    }
    j["scan"] = rows;
  }
  if (report.extrapolated_left_third) j["extrapolated_left_third"] = *report.extrapolated_left_third;
  return j;
}

nlohmann::json sample_header_json(const SampleStats& stats, const GasConfig& cfg, int n_chains) {
  return {{"N", cfg.N},
          {"d", cfg.d.value()},
          {"beta", cfg.beta},
          {"R", number_or_null(cfg.R)},
          {"seed", cfg.seed},
          {"n_chains", n_chains},
          {"acceptance_rate", stats.acceptance_rate()},
          {"wall_fraction", stats.wall_fraction()}};
}

void write_sample_csv(std::ostream& os, const SampleStats& stats, const GasConfig& cfg,
                      int n_chains) {
  write_header(os, sample_header_json(stats, cfg, n_chains));
  os << "bin_left,bin_right,count\n";
  for (std::size_t b = 0; b < stats.counts.size(); ++b) {
    os << format_number(stats.bin_edges[b]) << ',' << format_number(stats.bin_edges[b + 1]) << ','
       << stats.counts[b] << '\n';
  }
}

nlohmann::json density_report_json(const DensityReport& report) {
  return {{"mean_field_applicable", report.mean_field_applicable},
          {"note", report.note},
          {"bulk_l1", report.bulk_l1},
          {"bulk_bins", report.bulk_bins},
          {"wall_fraction", report.wall_fraction},
          {"surface_weight", report.surface_weight},
          {"wall_gap", report.wall_gap}};
}

}  // namespace coulomb::io
