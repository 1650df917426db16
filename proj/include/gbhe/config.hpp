#pragma once

#include "gbhe/assembly.hpp"
#include "gbhe/kernel.hpp"
#include "gbhe/linalg.hpp"
#include "gbhe/stepper.hpp"

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace gbhe {

enum class Command { Converge, Fhn, Weights };
enum class DtRule { Fixed, ProportionalToH };

std::string to_string(Command c);
Command parse_command(std::string_view s);

/// Everything needed to reproduce one run. Serialized as sectioned
/// `key = value` text that is valid TOML.
struct RunConfig {
  Command command = Command::Converge;

  // [problem]
  std::string case_name = "smooth-exp-2d";
  double t_final = 1.0;
  std::string kernel;  // empty: the case's own kernel

  // [coefficients]
  ProblemCoefficients coeffs;
  std::vector<double> etas{0.0, 1.0};

  // [discretization]
  std::vector<int> meshes{4, 8, 16, 32};
  DtRule dt_rule = DtRule::ProportionalToH;
  double dt_over_h = 1.0;
  double dt = 0.2;

  // [solver]
  NewtonConfig newton;
  LinearSolverConfig linear;

  // [fhn]
  FhnCoefficients fhn;
  double fhn_side = 2.5;
  int fhn_cells = 64;

  // [output]
  std::string out_dir = "out";
  int snapshot_stride = 250;
  int threads = 1;

  bool operator==(const RunConfig& other) const;

  /// Checks every field against the preconditions of the modules it feeds.
  void validate() const;

  /// Defaults for a subcommand (fhn: T = 200, dt = 0.2, 1/sqrt(t) kernel).
  static RunConfig defaults(Command command);
};

std::string serialize(const RunConfig& config);
/// Parses text produced by serialize or written by hand; keys absent from
/// the text keep the values of `base`.
RunConfig parse_config(std::string_view text, const RunConfig& base = {});
RunConfig load_config(const std::string& path, const RunConfig& base = {});

/// Git blob hash ("blob <len>\0" + content, SHA-1) as lowercase hex.
std::string git_blob_hash(std::string_view content);

}  // namespace gbhe
