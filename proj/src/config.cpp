#include "gbhe/config.hpp"

#include "gbhe/mms.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace gbhe {

std::string to_string(Command c) {
  switch (c) {
    case Command::Converge: return "converge";
    case Command::Fhn: return "fhn";
    case Command::Weights: return "weights";
  }
  return "converge";
}

Command parse_command(std::string_view s) {
  if (s == "converge") return Command::Converge;
  if (s == "fhn") return Command::Fhn;
  if (s == "weights") return Command::Weights;
  throw std::invalid_argument("config: unknown command '" + std::string(s) + "'");
}

namespace {

std::string to_string(DtRule r) { return r == DtRule::Fixed ? "fixed" : "proportional"; }
DtRule parse_dt_rule(std::string_view s) {
  if (s == "fixed") return DtRule::Fixed;
  if (s == "proportional") return DtRule::ProportionalToH;
  throw std::invalid_argument("config: dt_rule must be 'fixed' or 'proportional'");
}

std::string to_string(SolverMethod m) {
  switch (m) {
    case SolverMethod::Auto: return "auto";
    case SolverMethod::DirectLU: return "direct";
    case SolverMethod::BiCGStab: return "bicgstab";
  }
  return "auto";
}
SolverMethod parse_method(std::string_view s) {
  if (s == "auto") return SolverMethod::Auto;
  if (s == "direct") return SolverMethod::DirectLU;
  if (s == "bicgstab") return SolverMethod::BiCGStab;
  throw std::invalid_argument("config: linear_method must be auto, direct or bicgstab");
}

std::string to_string(Preconditioner p) { return p == Preconditioner::Jacobi ? "jacobi" : "none"; }
Preconditioner parse_preconditioner(std::string_view s) {
  if (s == "jacobi") return Preconditioner::Jacobi;
  if (s == "none") return Preconditioner::None;
  throw std::invalid_argument("config: preconditioner must be none or jacobi");
}

std::string to_string(NewtonDamping d) { return d == NewtonDamping::LineHalving ? "line-halving" : "none"; }
NewtonDamping parse_damping(std::string_view s) {
  if (s == "none") return NewtonDamping::None;
  if (s == "line-halving") return NewtonDamping::LineHalving;
  throw std::invalid_argument("config: newton_damping must be none or line-halving");
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s(buf);
  // Keep floats recognisable as floats in TOML.
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

/// Strips a trailing comment that is not inside a string.
std::string_view strip_comment(std::string_view line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '\\' && in_string) {
      ++i;
      continue;
    }
    if (line[i] == '"') in_string = !in_string;
    if (line[i] == '#' && !in_string) return line.substr(0, i);
  }
  return line;
}

std::string unquote(std::string_view v, const std::string& key) {
  if (v.size() < 2 || v.front() != '"' || v.back() != '"')
    throw std::invalid_argument("config: " + key + " must be a quoted string");
  std::string out;
  for (std::size_t i = 1; i + 1 < v.size(); ++i) {
    if (v[i] == '\\' && i + 2 < v.size()) ++i;
    out += v[i];
  }
  return out;
}

double to_double(std::string_view v, const std::string& key) {
  double d = 0.0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), d);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw std::invalid_argument("config: " + key + " expects a number, got '" + std::string(v) + "'");
  return d;
}

int to_int(std::string_view v, const std::string& key) {
  int i = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), i);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw std::invalid_argument("config: " + key + " expects an integer, got '" + std::string(v) + "'");
  return i;
}

std::vector<std::string_view> array_items(std::string_view v, const std::string& key) {
  if (v.size() < 2 || v.front() != '[' || v.back() != ']')
    throw std::invalid_argument("config: " + key + " must be an array [..]");
  std::vector<std::string_view> items;
  std::string_view body = trim(v.substr(1, v.size() - 2));
  while (!body.empty()) {
    const auto comma = body.find(',');
    items.push_back(trim(body.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    body = trim(body.substr(comma + 1));
  }
  return items;
}

}  // namespace

bool RunConfig::operator==(const RunConfig& o) const {
  return command == o.command && case_name == o.case_name && t_final == o.t_final && kernel == o.kernel &&
         coeffs == o.coeffs && etas == o.etas && meshes == o.meshes && dt_rule == o.dt_rule &&
         dt_over_h == o.dt_over_h && dt == o.dt && newton == o.newton && linear == o.linear && fhn == o.fhn &&
         fhn_side == o.fhn_side && fhn_cells == o.fhn_cells && out_dir == o.out_dir &&
         snapshot_stride == o.snapshot_stride && threads == o.threads;
}

RunConfig RunConfig::defaults(Command command) {
  RunConfig c;
  c.command = command;
  if (command == Command::Fhn) {
    c.t_final = 200.0;
    c.dt_rule = DtRule::Fixed;
    c.dt = 0.2;
    c.kernel = "power:0.5";
    c.coeffs.alpha = 0.0;
    c.etas = {0.0001, 0.01, 1.0};
  } else if (command == Command::Weights) {
    c.kernel = "power:0.5";
    c.dt_rule = DtRule::Fixed;
    c.dt = 0.1;
  }
  return c;
}

void RunConfig::validate() const {
  coeffs.validate();
  newton.validate();
  linear.validate();
  if (!(t_final > 0.0) || !std::isfinite(t_final)) throw std::invalid_argument("config: T must be positive");
  if (!kernel.empty()) (void)KernelSpec::parse(kernel);
  if (dt_rule == DtRule::Fixed && !(dt > 0.0)) throw std::invalid_argument("config: dt must be positive");
  if (dt_rule == DtRule::ProportionalToH && !(dt_over_h > 0.0))
    throw std::invalid_argument("config: dt_over_h must be positive");
  if (threads < 1) throw std::invalid_argument("config: threads must be >= 1");
  for (double e : etas)
    if (!(e >= 0.0)) throw std::invalid_argument("config: eta values must be >= 0");
  switch (command) {
    case Command::Converge: {
      (void)make_case(case_name, coeffs);
      if (meshes.empty()) throw std::invalid_argument("config: need at least one mesh size");
      for (std::size_t i = 0; i < meshes.size(); ++i) {
        if (meshes[i] < 1) throw std::invalid_argument("config: mesh sizes must be >= 1");
        if (i > 0 && meshes[i] <= meshes[i - 1])
          throw std::invalid_argument("config: mesh sizes must be strictly increasing");
      }
      if (etas.empty()) throw std::invalid_argument("config: need at least one eta value");
      break;
    }
    case Command::Fhn:
      fhn.validate();
      if (!(fhn_side > 0.0)) throw std::invalid_argument("config: fhn side must be positive");
      if (fhn_cells < 1) throw std::invalid_argument("config: fhn cells must be >= 1");
      if (snapshot_stride < 1) throw std::invalid_argument("config: snapshot stride must be >= 1");
      if (etas.empty()) throw std::invalid_argument("config: need at least one eta value");
      break;
    case Command::Weights:
      if (kernel.empty()) throw std::invalid_argument("config: weights needs a kernel");
      if (dt_rule != DtRule::Fixed) throw std::invalid_argument("config: weights needs a fixed dt");
      break;
  }
}

std::string serialize(const RunConfig& c) {
  std::ostringstream out;
  out << "command = " << quote(to_string(c.command)) << "\n\n";
  out << "[problem]\n";
  out << "case = " << quote(c.case_name) << "\n";
  out << "T = " << num(c.t_final) << "\n";
  out << "kernel = " << quote(c.kernel) << "\n\n";
  out << "[coefficients]\n";
  out << "alpha = " << num(c.coeffs.alpha) << "\n";
  out << "beta = " << num(c.coeffs.beta) << "\n";
  out << "gamma = " << num(c.coeffs.gamma) << "\n";
  out << "delta = " << c.coeffs.delta << "\n";
  out << "nu = " << num(c.coeffs.nu) << "\n";
  out << "eta = [";
  for (std::size_t i = 0; i < c.etas.size(); ++i) out << (i ? ", " : "") << num(c.etas[i]);
  out << "]\n\n";
  out << "[discretization]\n";
  out << "meshes = [";
  for (std::size_t i = 0; i < c.meshes.size(); ++i) out << (i ? ", " : "") << c.meshes[i];
  out << "]\n";
  out << "dt_rule = " << quote(to_string(c.dt_rule)) << "\n";
  out << "dt_over_h = " << num(c.dt_over_h) << "\n";
  out << "dt = " << num(c.dt) << "\n\n";
  out << "[solver]\n";
  out << "newton_abs_tol = " << num(c.newton.abs_tol) << "\n";
  out << "newton_max_iter = " << c.newton.max_iter << "\n";
  out << "newton_damping = " << quote(to_string(c.newton.damping)) << "\n";
  out << "linear_method = " << quote(to_string(c.linear.method)) << "\n";
  out << "linear_rel_tol = " << num(c.linear.rel_tol) << "\n";
  out << "linear_max_iter = " << c.linear.max_iter << "\n";
  out << "preconditioner = " << quote(to_string(c.linear.preconditioner)) << "\n";
  out << "direct_limit = " << c.linear.direct_limit << "\n\n";
  out << "[fhn]\n";
  out << "epsilon = " << num(c.fhn.epsilon) << "\n";
  out << "rho = " << num(c.fhn.rho) << "\n";
  out << "side = " << num(c.fhn_side) << "\n";
  out << "cells = " << c.fhn_cells << "\n\n";
  out << "[output]\n";
  out << "dir = " << quote(c.out_dir) << "\n";
  out << "snapshot_stride = " << c.snapshot_stride << "\n";
  out << "threads = " << c.threads << "\n";
  return out.str();
}

RunConfig parse_config(std::string_view text, const RunConfig& base) {
  std::map<std::string, std::string> kv;
  std::string section;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw std::invalid_argument("config line " + std::to_string(line_no) + ": bad section");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = (section.empty() ? "" : section + ".") + std::string(trim(line.substr(0, eq)));
    kv[key] = std::string(trim(line.substr(eq + 1)));
  }

  RunConfig c = base;
  auto take = [&](const std::string& key, auto&& apply) {
    const auto it = kv.find(key);
    if (it == kv.end()) return;
    apply(std::string_view(it->second), key);
    kv.erase(it);
  };
  take("command", [&](auto v, auto& k) { c.command = parse_command(unquote(v, k)); });
  take("problem.case", [&](auto v, auto& k) { c.case_name = unquote(v, k); });
  take("problem.T", [&](auto v, auto& k) { c.t_final = to_double(v, k); });
  take("problem.kernel", [&](auto v, auto& k) { c.kernel = unquote(v, k); });
  take("coefficients.alpha", [&](auto v, auto& k) { c.coeffs.alpha = to_double(v, k); });
  take("coefficients.beta", [&](auto v, auto& k) { c.coeffs.beta = to_double(v, k); });
  take("coefficients.gamma", [&](auto v, auto& k) { c.coeffs.gamma = to_double(v, k); });
  take("coefficients.delta", [&](auto v, auto& k) { c.coeffs.delta = to_int(v, k); });
  take("coefficients.nu", [&](auto v, auto& k) { c.coeffs.nu = to_double(v, k); });
  take("coefficients.eta", [&](auto v, auto& k) {
    c.etas.clear();
    if (!v.empty() && v.front() != '[') {
      c.etas.push_back(to_double(v, k));
      return;
    }
    for (auto item : array_items(v, k)) c.etas.push_back(to_double(item, k));
  });
  take("discretization.meshes", [&](auto v, auto& k) {
    c.meshes.clear();
    for (auto item : array_items(v, k)) c.meshes.push_back(to_int(item, k));
  });
  take("discretization.dt_rule", [&](auto v, auto& k) { c.dt_rule = parse_dt_rule(unquote(v, k)); });
  take("discretization.dt_over_h", [&](auto v, auto& k) { c.dt_over_h = to_double(v, k); });
  take("discretization.dt", [&](auto v, auto& k) { c.dt = to_double(v, k); });
  take("solver.newton_abs_tol", [&](auto v, auto& k) { c.newton.abs_tol = to_double(v, k); });
  take("solver.newton_max_iter", [&](auto v, auto& k) { c.newton.max_iter = to_int(v, k); });
  take("solver.newton_damping", [&](auto v, auto& k) { c.newton.damping = parse_damping(unquote(v, k)); });
  take("solver.linear_method", [&](auto v, auto& k) { c.linear.method = parse_method(unquote(v, k)); });
  take("solver.linear_rel_tol", [&](auto v, auto& k) { c.linear.rel_tol = to_double(v, k); });
  take("solver.linear_max_iter", [&](auto v, auto& k) { c.linear.max_iter = to_int(v, k); });
  take("solver.preconditioner", [&](auto v, auto& k) { c.linear.preconditioner = parse_preconditioner(unquote(v, k)); });
  take("solver.direct_limit", [&](auto v, auto& k) {
    const int n = to_int(v, k);
    if (n < 0) throw std::invalid_argument("config: direct_limit must be >= 0");
    c.linear.direct_limit = static_cast<std::size_t>(n);
  });
  take("fhn.epsilon", [&](auto v, auto& k) { c.fhn.epsilon = to_double(v, k); });
  take("fhn.rho", [&](auto v, auto& k) { c.fhn.rho = to_double(v, k); });
  take("fhn.side", [&](auto v, auto& k) { c.fhn_side = to_double(v, k); });
  take("fhn.cells", [&](auto v, auto& k) { c.fhn_cells = to_int(v, k); });
  take("output.dir", [&](auto v, auto& k) { c.out_dir = unquote(v, k); });
  take("output.snapshot_stride", [&](auto v, auto& k) { c.snapshot_stride = to_int(v, k); });
  take("output.threads", [&](auto v, auto& k) { c.threads = to_int(v, k); });
  if (!kv.empty()) throw std::invalid_argument("config: unknown key '" + kv.begin()->first + "'");
  return c;
}

RunConfig load_config(const std::string& path, const RunConfig& base) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), base);
}

std::string git_blob_hash(std::string_view content) {
  std::string blob = "blob " + std::to_string(content.size());
  blob.push_back('\0');
  blob.append(content);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(blob.data(), blob.size(), digest, &len, EVP_sha1(), nullptr) != 1)
    throw std::runtime_error("git_blob_hash: SHA-1 failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xF];
  }
  return out;
}

}  // namespace gbhe
