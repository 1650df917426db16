#include "gbhe/app.hpp"

#include "gbhe/kernel.hpp"
#include "gbhe/mms.hpp"
#include "gbhe/stepper.hpp"
#include "gbhe/vtk.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace gbhe {

namespace fs = std::filesystem;

int threads_from_env(int fallback) {
  const char* raw = std::getenv(kThreadsEnv);
  if (raw == nullptr || *raw == '\0') return fallback;
  const std::string_view s(raw);
  int n = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), n);
  if (ec != std::errc() || ptr != s.data() + s.size() || n < 1)
    throw std::invalid_argument(std::string(kThreadsEnv) + " must be a positive integer, got '" + raw + "'");
  return n;
}

std::string case_with_dim(const std::string& name, int dim) {
  if (dim != 2 && dim != 3) throw std::invalid_argument("dim must be 2 or 3");
  std::string base = name;
  if (base.size() > 3 && (base.ends_with("-2d") || base.ends_with("-3d"))) base.resize(base.size() - 3);
  return base + "-" + std::to_string(dim) + "d";
}

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  return out;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create directory '" + dir.string() + "': " + ec.message());
}

std::string label(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

/// Time grid for commands that use a fixed step.
TimeGrid fixed_grid(const RunConfig& c) {
  TimeGrid g{c.t_final, std::max(1, static_cast<int>(std::lround(c.t_final / c.dt)))};
  g.validate();
  return g;
}

}  // namespace

void write_manifest(const RunConfig& config, const std::string& dir, const std::vector<std::string>& outputs) {
  const std::string text = serialize(config);
  auto out = open_out(fs::path(dir) / "manifest");
  out << "# gbhe run manifest\n";
  out << "config_hash = \"" << git_blob_hash(text) << "\"\n";
  for (const auto& name : outputs)
    out << "output." << name << " = \"" << git_blob_hash(read_file((fs::path(dir) / name).string())) << "\"\n";
  out << "\n# config\n" << text;
}

int cli_converge(const RunConfig& config, std::ostream& log) {
  ManufacturedCase mcase = make_case("smooth-exp-2d");
  try {
    config.validate();
    if (config.dt_rule != DtRule::ProportionalToH) throw std::invalid_argument("converge: dt_rule must be proportional");
    mcase = make_case(config.case_name, config.coeffs);
    if (!config.kernel.empty())
      mcase = ManufacturedCase(mcase.name(), mcase.dim(), mcase.frequency(), mcase.temporal(),
                               KernelSpec::parse(config.kernel), config.coeffs);
  } catch (const std::exception& e) {
    log << "error: invalid configuration: " << e.what() << "\n";
    return 2;
  }

  StudyOptions opt;
  opt.t_final = config.t_final;
  opt.dt_over_h = config.dt_over_h;
  opt.newton = config.newton;
  opt.linear = config.linear;
  opt.threads = config.threads;

  StudyResult result;
  try {
    result = run_study(mcase, config.meshes, config.etas, opt);
  } catch (const std::exception& e) {
    log << "error: solve failed: " << e.what() << "\n";
    return 3;
  }

  const fs::path dir(config.out_dir);
  try {
    ensure_dir(dir);
    {
      auto csv = open_out(dir / "study.csv");
      write_study_csv(result, csv);
      auto txt = open_out(dir / "study.txt");
      write_study_table(result, txt);
      auto timing = open_out(dir / "timing.csv");
      write_study_timing(result, timing);
    }
    write_manifest(config, config.out_dir, {"study.csv", "study.txt"});
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return 3;
  }
  write_study_table(result, log);

  int code = 0;
  const auto& last = result.rows.back();
  for (std::size_t e = 0; e < last.columns.size(); ++e) {
    const auto& rate = last.columns[e].rate;
    if (rate && !(*rate >= kRateLow && *rate <= kRateHigh)) {
      log << "error: final rate " << *rate << " for eta = " << result.etas[e] << " outside [" << kRateLow << ", "
          << kRateHigh << "]\n";
      code = 1;
    }
  }
  return code;
}

FhnRunSummary run_fhn_case(const RunConfig& config, double eta, const std::string& dir) {
  ensure_dir(dir);
  const Box box = Box::square(config.fhn_side);
  auto mesh = std::make_shared<const Mesh>(Mesh::structured(2, config.fhn_cells, box));
  auto space = FunctionSpace::create(mesh, BoundaryKind::Neumann);

  Problem p;
  p.space = space;
  p.coeffs = config.coeffs;
  p.coeffs.eta = eta;
  p.kernel = KernelSpec::parse(config.kernel.empty() ? "power:0.5" : config.kernel);
  p.grid = fixed_grid(config);
  const double half = 0.5 * config.fhn_side;
  p.initial = [half](const Vec3& x, double) { return x[0] < half ? 1.0 : 0.0; };
  p.newton = config.newton;
  p.linear = config.linear;
  const SpaceTimeFunction v0 = [half](const Vec3& x, double) { return x[1] < half ? 0.1 : 0.0; };

  FhnRunSummary summary;
  summary.eta = eta;
  const int n_steps = p.grid.n_steps;
  const int stride = config.snapshot_stride;
  Stepper stepper(std::move(p));
  stepper.run_fhn(config.fhn, v0, [&](int k, double, std::span<const double> u, std::span<const double> v) {
    for (double x : u) summary.max_abs_u = std::max(summary.max_abs_u, std::abs(x));
    for (double x : v) summary.max_abs_v = std::max(summary.max_abs_v, std::abs(x));
    if (k % stride == 0 || k == n_steps) {
      char name[32];
      std::snprintf(name, sizeof name, "fhn_%06d.vtk", k);
      const std::string path = (fs::path(dir) / name).string();
      const VtkField fields[] = {{"u", u}, {"v", v}};
      write_vtk(*mesh, fields, path);
      summary.snapshots.push_back(path);
    }
  });
  summary.steps = n_steps;
  summary.max_newton_iterations = stepper.statistics().max_newton_iterations;
  return summary;
}

int cli_fhn(const RunConfig& config, std::ostream& log) {
  try {
    config.validate();
    if (config.dt_rule != DtRule::Fixed) throw std::invalid_argument("fhn: dt_rule must be fixed");
    (void)fixed_grid(config);
  } catch (const std::exception& e) {
    log << "error: invalid configuration: " << e.what() << "\n";
    return 2;
  }
  std::vector<FhnRunSummary> runs;
  try {
    ensure_dir(config.out_dir);
    for (double eta : config.etas) {
      const std::string sub = (fs::path(config.out_dir) / ("eta_" + label(eta))).string();
      runs.push_back(run_fhn_case(config, eta, sub));
      const auto& r = runs.back();
      log << "fhn eta=" << eta << ": " << r.steps << " steps, max|u| = " << r.max_abs_u << ", max|v| = " << r.max_abs_v
          << ", " << r.snapshots.size() << " snapshots in " << sub << "\n";
    }
    {
      auto csv = open_out(fs::path(config.out_dir) / "fhn_summary.csv");
      char buf[128];
      csv << "eta,steps,max_abs_u,max_abs_v,newton_max_iters,snapshots\n";
      for (const auto& r : runs) {
        std::snprintf(buf, sizeof buf, "%.17g,%d,%.17g,%.17g", r.eta, r.steps, r.max_abs_u, r.max_abs_v);
        csv << buf << ',' << r.max_newton_iterations << ',' << r.snapshots.size() << '\n';
      }
    }
    write_manifest(config, config.out_dir, {"fhn_summary.csv"});
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}

int cli_weights(const RunConfig& config, std::ostream& log) {
  KernelSpec kernel = KernelSpec::none();
  TimeGrid grid;
  try {
    config.validate();
    kernel = KernelSpec::parse(config.kernel);
    grid = fixed_grid(config);
  } catch (const std::exception& e) {
    log << "error: invalid configuration: " << e.what() << "\n";
    return 2;
  }
  try {
    const WeightTable w = build_weights(kernel, grid.dt(), grid.n_steps);
    ensure_dir(config.out_dir);
    {
      auto csv = open_out(fs::path(config.out_dir) / "weights.csv");
      csv << "k,j,omega\n";
      char buf[64];
      for (int k = 1; k <= grid.n_steps; ++k)
        for (int j = 1; j <= k; ++j) {
          std::snprintf(buf, sizeof buf, "%d,%d,%.17g\n", k, j, w(k, j));
          csv << buf;
        }
    }
    write_manifest(config, config.out_dir, {"weights.csv"});
    log << "wrote " << grid.n_steps * (grid.n_steps + 1) / 2 << " weights for " << kernel.to_string() << ", dt = "
        << grid.dt() << "\n";
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}

int run_command(const RunConfig& config, std::ostream& log) {
  switch (config.command) {
    case Command::Converge: return cli_converge(config, log);
    case Command::Fhn: return cli_fhn(config, log);
    case Command::Weights: return cli_weights(config, log);
  }
  return 2;
}

}  // namespace gbhe
