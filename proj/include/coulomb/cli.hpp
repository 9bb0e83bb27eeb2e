#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace coulomb::cli {

enum ExitCode : int { kSuccess = 0, kVerificationFailed = 1, kUsageError = 2 };

/// Inclusive linear grid "start:stop:count" with count >= 2 and start < stop.
struct GridSpec {
  double start = 0.0;
  double stop = 0.0;
  int count = 0;

  std::vector<double> values() const;
};

GridSpec parse_grid(std::string_view text);
std::vector<int> parse_int_list(std::string_view text);
std::vector<double> parse_double_list(std::string_view text);
/// Accepts "inf" for an unbounded wall.
double parse_radius(std::string_view text);

struct RunConfig {
  std::string command;
  std::string potential = "quadratic";
  std::vector<int> dims{2};
  std::optional<GridSpec> grid;
  double R = 1.0;
  std::string out_dir;  // empty: write to stdout
  std::string format = "csv";
  std::uint64_t seed = 0;

  // validation
  double r_max = 100.0;
  int n_probe = 64;
  // equilibrium / verify
  int points = 200;
  int probes = 32;
  double cert_tol = 1e-7;
  std::vector<double> h_values{1e-2, 1e-3, 1e-4};
  // oracle
  int cells = 2000;
  int max_iter = 200000;
  double kkt_tol = 1e-8;
  // sampler
  int N = 100;
  double beta = 2.0;
  int sweeps = 10000;
  int burn_in = -1;  // < 0: sweeps / 5
  int thinning = 1;
  int chains = 4;
  int bins = 25;
  double delta = -1.0;  // < 0: 0.02 R
  double hist_max = 0.0;
};

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// The checks behind `verify` for one dimension.
std::vector<CheckResult> verify_checks(const RunConfig& cfg, int d);

/// Entry point; argv[0] is the program name.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace coulomb::cli
