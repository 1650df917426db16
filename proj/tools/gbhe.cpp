#include "gbhe/app.hpp"
#include "gbhe/config.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

struct Overrides {
  std::string config_file;
  std::optional<std::string> case_name, kernel, out, dt_rule;
  std::optional<std::vector<int>> meshes;
  std::optional<std::vector<double>> etas;
  std::optional<int> dim, delta, stride, cells, threads;
  std::optional<double> t_final, dt_over_h, dt, alpha, beta, gamma, nu, epsilon, rho, side;
};

void add_common(CLI::App* sub, Overrides& o) {
  sub->add_option("--config", o.config_file, "TOML-style config file; flags override it")->check(CLI::ExistingFile);
  sub->add_option("--eta", o.etas, "Memory coefficients, comma separated")->delimiter(',');
  sub->add_option("--T", o.t_final, "Final time");
  sub->add_option("--kernel", o.kernel, "none | exp:<rate> | power:<a> | power-normalized:<a>");
  sub->add_option("--out", o.out, "Output directory");
  sub->add_option("--alpha", o.alpha, "Advection coefficient");
  sub->add_option("--beta", o.beta, "Reaction coefficient");
  sub->add_option("--gamma", o.gamma, "Reaction threshold");
  sub->add_option("--delta", o.delta, "Nonlinearity exponent");
  sub->add_option("--nu", o.nu, "Diffusion coefficient");
  sub->add_option("--threads", o.threads, "Worker threads (GBHE_THREADS takes precedence when set)");
}

gbhe::RunConfig build(gbhe::Command cmd, const Overrides& o) {
  gbhe::RunConfig c = gbhe::RunConfig::defaults(cmd);
  if (!o.config_file.empty()) c = gbhe::load_config(o.config_file, c);
  c.command = cmd;
  if (o.case_name) c.case_name = *o.case_name;
  if (o.dim) c.case_name = gbhe::case_with_dim(c.case_name, *o.dim);
  if (o.kernel) c.kernel = *o.kernel;
  if (o.out) c.out_dir = *o.out;
  if (o.meshes) c.meshes = *o.meshes;
  if (o.etas) c.etas = *o.etas;
  if (o.t_final) c.t_final = *o.t_final;
  if (o.dt_over_h) {
    c.dt_over_h = *o.dt_over_h;
    c.dt_rule = gbhe::DtRule::ProportionalToH;
  }
  if (o.dt) {
    c.dt = *o.dt;
    c.dt_rule = gbhe::DtRule::Fixed;
  }
  if (o.alpha) c.coeffs.alpha = *o.alpha;
  if (o.beta) c.coeffs.beta = *o.beta;
  if (o.gamma) c.coeffs.gamma = *o.gamma;
  if (o.delta) c.coeffs.delta = *o.delta;
  if (o.nu) c.coeffs.nu = *o.nu;
  if (o.epsilon) c.fhn.epsilon = *o.epsilon;
  if (o.rho) c.fhn.rho = *o.rho;
  if (o.side) c.fhn_side = *o.side;
  if (o.cells) c.fhn_cells = *o.cells;
  if (o.stride) c.snapshot_stride = *o.stride;
  if (o.threads) c.threads = *o.threads;
  c.threads = gbhe::threads_from_env(c.threads);
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite element solver for the delayed generalized Burgers-Huxley equation"};
  app.require_subcommand(1);
  Overrides conv, fhn, wts;

  auto* c = app.add_subcommand("converge", "Manufactured-solution convergence study");
  add_common(c, conv);
  c->add_option("--case", conv.case_name, "Manufactured case, e.g. smooth-exp-2d");
  c->add_option("--dim", conv.dim, "Spatial dimension (rewrites the case suffix)")->check(CLI::IsMember({2, 3}));
  c->add_option("--meshes", conv.meshes, "Cells per side, comma separated")->delimiter(',');
  c->add_option("--dt-over-h", conv.dt_over_h, "Time step as a multiple of h");

  auto* f = app.add_subcommand("fhn", "Coupled recovery-variable demo with VTK snapshots");
  add_common(f, fhn);
  f->add_option("--dt", fhn.dt, "Time step");
  f->add_option("--epsilon", fhn.epsilon, "Recovery rate");
  f->add_option("--rho", fhn.rho, "Recovery decay");
  f->add_option("--side", fhn.side, "Square side length");
  f->add_option("--cells", fhn.cells, "Cells per side");
  f->add_option("--stride", fhn.stride, "Snapshot every this many steps");

  auto* w = app.add_subcommand("weights", "Dump the memory quadrature weights as CSV");
  add_common(w, wts);
  w->add_option("--dt", wts.dt, "Time step");

  CLI11_PARSE(app, argc, argv);

  try {
    gbhe::RunConfig config;
    if (c->parsed()) config = build(gbhe::Command::Converge, conv);
    if (f->parsed()) config = build(gbhe::Command::Fhn, fhn);
    if (w->parsed()) config = build(gbhe::Command::Weights, wts);
    return gbhe::run_command(config, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
