#pragma once

#include <ostream>
#include <string>

#include <json.hpp>

#include "coulomb/equilibrium.hpp"
#include "coulomb/oracle.hpp"
#include "coulomb/rate.hpp"
#include "coulomb/sampler.hpp"

namespace coulomb::io {

/// Shortest round-trip decimal form; "inf"/"nan" for non-finite values.
std::string format_number(double x);

/// Finite doubles as numbers, non-finite as null.
nlohmann::json number_or_null(double x);

// CSV files are LF-terminated with a header row. Measure and sample files
// carry a first line "# {json}" describing the run.

/// Columns r, bulk_density, cdf at r_k = edge k / n_points, k = 1..n_points.
void write_measure_csv(std::ostream& os, const ConstrainedMeasure& measure, int n_points);

/// Oracle measure in the measure schema: bulk_density is w_i / cell width.
void write_oracle_csv(std::ostream& os, const OracleResult& result, Dimension d, double r_star);
nlohmann::json oracle_convergence_json(const OracleResult& result);

/// Columns R, F, dF, d2F, d3F.
void write_rate_csv(std::ostream& os, const RateFunctionReport& report);
nlohmann::json rate_summary_json(const RateFunctionReport& report);
nlohmann::json rate_report_json(const RateFunctionReport& report);

/// Columns bin_left, bin_right, count.
void write_sample_csv(std::ostream& os, const SampleStats& stats, const GasConfig& cfg,
                      int n_chains);
nlohmann::json sample_header_json(const SampleStats& stats, const GasConfig& cfg, int n_chains);
nlohmann::json density_report_json(const DensityReport& report);

}  // namespace coulomb::io
