#pragma once

#include "gbhe/analysis.hpp"
#include "gbhe/config.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace gbhe {

/// Environment variable holding the worker thread count.
inline constexpr const char* kThreadsEnv = "GBHE_THREADS";

/// Thread count from GBHE_THREADS, or `fallback` when unset. Throws on a
/// value that is not a positive integer.
int threads_from_env(int fallback = 1);

/// "smooth-exp" or "smooth-exp-2d" with dim 3 gives "smooth-exp-3d".
std::string case_with_dim(const std::string& name, int dim);

/// Final-row rates accepted by `converge`.
inline constexpr double kRateLow = 0.85;
inline constexpr double kRateHigh = 1.15;

/// Runs the convergence study of `config` and writes study.csv, study.txt,
/// timing.csv and manifest into config.out_dir. Exit code 0 when every row
/// solved and all final-row rates lie in [kRateLow, kRateHigh]; 1 on a rate
/// violation; 2 on invalid configuration (nothing written); 3 on solver failure.
int cli_converge(const RunConfig& config, std::ostream& log);

struct FhnRunSummary {
  double eta = 0.0;
  int steps = 0;
  double max_abs_u = 0.0;  // over all nodes and time levels
  double max_abs_v = 0.0;
  int max_newton_iterations = 0;
  std::vector<std::string> snapshots;  // VTK paths in write order
};

/// One coupled run with memory coefficient `eta`, snapshots into `dir`
/// every config.snapshot_stride steps plus the initial and final states.
FhnRunSummary run_fhn_case(const RunConfig& config, double eta, const std::string& dir);

/// One run per eta in config.etas, each in out_dir/eta_<value>, plus
/// fhn_summary.csv and manifest.
int cli_fhn(const RunConfig& config, std::ostream& log);

/// Writes weights.csv (k, j, omega) for 1 <= j <= k <= N and manifest.
int cli_weights(const RunConfig& config, std::ostream& log);

int run_command(const RunConfig& config, std::ostream& log);

/// Writes `manifest`: the serialized config, its git blob hash, and the blob
/// hash of every listed output file.
void write_manifest(const RunConfig& config, const std::string& dir, const std::vector<std::string>& outputs);

}  // namespace gbhe
