#ifndef KGDS_TOOLS_CLI_HPP
#define KGDS_TOOLS_CLI_HPP

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "kgds/asymptotics.hpp"
#include "kgds/desitter.hpp"
#include "kgds/fdref.hpp"
#include "kgds/huygens.hpp"
#include "kgds/kernels.hpp"

// Experiment driver shared by the kgds executable and its tests. Every
// setting lives in RunConfig, which round-trips through a key=value file.

namespace kgds::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string subcommand = "solve";
  int n = 3;
  std::optional<double> mass;
  std::vector<double> masses;  // huygens sweep; empty means the default list
  std::string profile = "bump";  // bump | gaussian_trunc | zero
  double radius = 0.5;
  int power = 8;
  double alpha = 4.0;
  double tmax = 2.0;
  int tsteps = 20;
  double rmax = 1.0;
  int rsteps = 11;
  Point x{0.6, 0.0, 0.0};
  double dr = 2e-3;
  std::string out = "-";
  std::string format = "csv";  // csv | json
  bool first_datum_only = false;
  double margin = 0.1;
  int order = 3;

  bool operator==(const RunConfig&) const = default;
};

namespace detail {

inline std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

inline double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("config: '" + key + "' expects a number, got '" + v + "'");
  }
}

inline int to_int(const std::string& key, const std::string& v) {
  const double d = to_double(key, v);
  if (d != std::floor(d) || std::abs(d) > 1e9) throw ConfigError("config: '" + key + "' expects an integer");
  return int(d);
}

inline std::vector<double> to_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(to_double(key, item));
  return out;
}

inline bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("config: '" + key + "' expects true or false");
}

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  return s.substr(a, s.find_last_not_of(" \t\r") - a + 1);
}

}  // namespace detail

/// Applies one key=value setting (used for both config files and flags).
inline void set_key(RunConfig& c, const std::string& key, const std::string& value) {
  using namespace detail;
  if (key == "subcommand") c.subcommand = value;
  else if (key == "n") c.n = to_int(key, value);
  else if (key == "mass") c.mass = value.empty() ? std::nullopt : std::optional<double>(to_double(key, value));
  else if (key == "masses") c.masses = to_list(key, value);
  else if (key == "profile") c.profile = value;
  else if (key == "radius") c.radius = to_double(key, value);
  else if (key == "power") c.power = to_int(key, value);
  else if (key == "alpha") c.alpha = to_double(key, value);
  else if (key == "tmax") c.tmax = to_double(key, value);
  else if (key == "tsteps") c.tsteps = to_int(key, value);
  else if (key == "rmax") c.rmax = to_double(key, value);
  else if (key == "rsteps") c.rsteps = to_int(key, value);
  else if (key == "x") {
    const auto v = to_list(key, value);
    if (v.empty() || v.size() > 3) throw ConfigError("config: 'x' expects one to three comma-separated numbers");
    c.x = {0.0, 0.0, 0.0};
    std::copy(v.begin(), v.end(), c.x.begin());
  } else if (key == "dr") c.dr = to_double(key, value);
  else if (key == "out") c.out = value;
  else if (key == "format") c.format = value;
  else if (key == "first_datum_only") c.first_datum_only = to_bool(key, value);
  else if (key == "margin") c.margin = to_double(key, value);
  else if (key == "order") c.order = to_int(key, value);
  else throw ConfigError("config: unknown key '" + key + "'");
}

inline RunConfig parse_config(std::istream& is, RunConfig base = {}) {
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(lineno) + ": expected key=value");
    set_key(base, detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
  }
  return base;
}

inline std::string to_config(const RunConfig& c) {
  using detail::fmt;
  std::ostringstream os;
  os << "subcommand=" << c.subcommand << '\n' << "n=" << c.n << '\n';
  os << "mass=" << (c.mass ? fmt(*c.mass) : "") << '\n';
  os << "masses=";
  for (std::size_t i = 0; i < c.masses.size(); ++i) os << (i ? "," : "") << fmt(c.masses[i]);
  os << '\n';
  os << "profile=" << c.profile << '\n'
     << "radius=" << fmt(c.radius) << '\n'
     << "power=" << c.power << '\n'
     << "alpha=" << fmt(c.alpha) << '\n'
     << "tmax=" << fmt(c.tmax) << '\n'
     << "tsteps=" << c.tsteps << '\n'
     << "rmax=" << fmt(c.rmax) << '\n'
     << "rsteps=" << c.rsteps << '\n'
     << "x=" << fmt(c.x[0]) << ',' << fmt(c.x[1]) << ',' << fmt(c.x[2]) << '\n'
     << "dr=" << fmt(c.dr) << '\n'
     << "out=" << c.out << '\n'
     << "format=" << c.format << '\n'
     << "first_datum_only=" << (c.first_datum_only ? "true" : "false") << '\n'
     << "margin=" << fmt(c.margin) << '\n'
     << "order=" << c.order << '\n';
  return os.str();
}

/// Structural checks that do not need any numerics.
inline void validate(const RunConfig& c) {
  static const std::vector<std::string> commands{"solve", "kernel", "huygens", "asympt", "compare"};
  if (std::find(commands.begin(), commands.end(), c.subcommand) == commands.end())
    throw ConfigError("config: unknown subcommand '" + c.subcommand + "'");
  if (c.n < 1) throw ConfigError("config: n must be positive");
  if (c.mass && !(*c.mass >= 0.0)) throw ConfigError("config: mass must be non-negative");
  if (c.profile != "bump" && c.profile != "gaussian_trunc" && c.profile != "zero")
    throw ConfigError("config: profile must be bump, gaussian_trunc or zero");
  if (c.profile != "zero" && !(c.radius > 0.0 && c.radius < 1.0))
    throw ConfigError("config: support radius must lie in (0, 1), got " + detail::fmt(c.radius));
  if (c.power < 1) throw ConfigError("config: power must be at least 1");
  if (!(c.tmax > 0.0) || c.tsteps < 1) throw ConfigError("config: need tmax > 0 and tsteps >= 1");
  if (!(c.rmax >= 0.0) || c.rsteps < 1) throw ConfigError("config: need rmax >= 0 and rsteps >= 1");
  if (!(c.dr > 0.0)) throw ConfigError("config: dr must be positive");
  if (c.format != "csv" && c.format != "json") throw ConfigError("config: format must be csv or json");
  if (!(c.margin >= 0.0)) throw ConfigError("config: margin must be non-negative");
  if (c.order < 1) throw ConfigError("config: order must be at least 1");
}

inline RadialProfile make_profile(const RunConfig& c) {
  if (c.profile == "zero") return RadialProfile::zero();
  if (c.profile == "gaussian_trunc") return RadialProfile::gaussian_trunc(c.radius, c.power, c.alpha);
  return RadialProfile::bump(c.radius, c.power);
}

inline double default_mass(int n) { return std::sqrt(n * n - 1.0) / 2.0; }

inline CauchyProblem make_problem(const RunConfig& c) {
  const auto p = make_profile(c);
  CauchyProblem pb{MassParams::from_mass(c.n, c.mass.value_or(default_mass(c.n))), p,
                   c.first_datum_only ? RadialProfile::zero() : p, {}};
  pb.validate();
  return pb;
}

inline std::vector<double> default_masses(int n) {
  std::vector<double> m{0.0, 1.0, default_mass(n), 0.5 * n + 0.5, double(n)};
  std::sort(m.begin(), m.end());
  m.erase(std::unique(m.begin(), m.end()), m.end());
  return m;
}

inline std::vector<double> radii(const RunConfig& c) {
  if (c.n >= 4 || c.rsteps == 1) return {0.0};
  std::vector<double> r;
  for (int i = 0; i < c.rsteps; ++i) r.push_back(c.rmax * i / (c.rsteps - 1));
  return r;
}

inline std::vector<double> time_grid(const RunConfig& c, double t0 = 0.0) {
  std::vector<double> t;
  for (int j = 0; j <= c.tsteps; ++j) t.push_back(t0 + (c.tmax - t0) * j / c.tsteps);
  return t;
}

// Writes to c.out ("-" is stdout).
template <class Writer>
void emit(const RunConfig& c, Writer&& w) {
  if (c.out == "-") {
    w(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream os(c.out, std::ios::binary);
  if (!os) throw ConfigError("cannot open output file '" + c.out + "'");
  w(os);
  if (!os) throw ConfigError("failed writing '" + c.out + "'");
}

inline std::string num(double v) { return detail::fmt(v); }

inline nlohmann::json to_json(const huygens::HuygensReport& r) {
  nlohmann::json samples = nlohmann::json::array();
  for (const auto& s : r.tail_samples) samples.push_back({{"t", s.t}, {"tail_abs", s.abs}, {"tail_rel", s.rel}});
  return {{"n", r.mp.n},
          {"mass", r.mp.m},
          {"regime", to_string(r.mp.regime)},
          {"mu", r.mp.mu},
          {"datum_mode", huygens::to_string(r.datum_mode)},
          {"margin", r.margin},
          {"exit_time", r.exit_time},
          {"method", to_string(r.method)},
          {"tail_sup", r.tail_sup},
          {"verdict", huygens::to_string(r.verdict)},
          {"tail_samples", samples}};
}

inline int cmd_solve(const RunConfig& c) {
  const auto pb = make_problem(c);
  struct Row {
    double r, t, phi;
    std::string method;
  };
  std::vector<Row> rows;
  for (double t : time_grid(c))
    for (double r : radii(c)) {
      const auto s = solve_detailed(pb, {r, 0.0, 0.0}, t);
      if (!std::isfinite(s.value)) throw NumericalError("solve: non-finite value");
      rows.push_back({r, t, s.value, to_string(s.method)});
    }
  emit(c, [&](std::ostream& os) {
    if (c.format == "json") {
      nlohmann::json a = nlohmann::json::array();
      for (const auto& w : rows) a.push_back({{"x_or_r", w.r}, {"t", w.t}, {"phi", w.phi}, {"method", w.method}});
      os << a.dump(2) << '\n';
      return;
    }
    os << "x_or_r,t,phi,method\n";
    for (const auto& w : rows) os << num(w.r) << ',' << num(w.t) << ',' << num(w.phi) << ',' << w.method << '\n';
  });
  return kExitOk;
}

inline int cmd_kernel(const RunConfig& c) {
  const auto mp = MassParams::from_mass(c.n, c.mass.value_or(default_mass(c.n)));
  struct Row {
    double t, z;
    KernelPair k;
  };
  std::vector<Row> rows;
  for (double t : time_grid(c)) {
    if (t == 0.0) continue;
    const int steps = std::max(c.rsteps, 2);
    for (int i = 0; i < steps; ++i) {
      const double z = compact_time(t) * i / (steps - 1);
      rows.push_back({t, z, eval_K01(mp, z, t)});
    }
  }
  emit(c, [&](std::ostream& os) {
    if (c.format == "json") {
      nlohmann::json a = nlohmann::json::array();
      for (const auto& w : rows)
        a.push_back({{"t", w.t},
                     {"z", w.z},
                     {"K0", {w.k.K0.real(), w.k.K0.imag()}},
                     {"K1", {w.k.K1.real(), w.k.K1.imag()}}});
      os << a.dump(2) << '\n';
      return;
    }
    os << "t,z,K0_re,K0_im,K1_re,K1_im\n";
    for (const auto& w : rows)
      os << num(w.t) << ',' << num(w.z) << ',' << num(w.k.K0.real()) << ',' << num(w.k.K0.imag()) << ','
         << num(w.k.K1.real()) << ',' << num(w.k.K1.imag()) << '\n';
  });
  return kExitOk;
}

inline int cmd_huygens(const RunConfig& c) {
  const auto p = make_profile(c);
  if (p.is_zero()) throw ConfigError("huygens: data must not vanish");
  CauchyProblem tmpl{MassParams::from_mass(c.n, 0.0), p, c.first_datum_only ? RadialProfile::zero() : p, {}};
  tmpl.validate();
  std::vector<double> masses = c.masses;
  if (masses.empty()) masses = c.mass ? std::vector<double>{*c.mass} : default_masses(c.n);
  const auto reps = huygens::mass_sweep(c.n, masses, tmpl, c.tmax, c.tsteps + 1, c.margin);
  emit(c, [&](std::ostream& os) {
    if (c.format == "json") {
      nlohmann::json a = nlohmann::json::array();
      for (const auto& r : reps) a.push_back(to_json(r));
      os << a.dump(2) << '\n';
      return;
    }
    os << "mass,t,tail_abs,tail_rel,verdict\n";
    for (const auto& r : reps)
      for (const auto& s : r.tail_samples)
        os << num(r.mp.m) << ',' << num(s.t) << ',' << num(s.abs) << ',' << num(s.rel) << ','
           << huygens::to_string(r.verdict) << '\n';
  });
  return kExitOk;
}

inline int cmd_asympt(const RunConfig& c) {
  const auto pb = make_problem(c);
  if (!(pb.mp.is_knot() && pb.mp.mu == 0.5))
    throw ConfigError("asympt: the expansion needs the knot mass sqrt(n^2 - 1)/2");
  if (!(c.tmax > 4.0)) throw ConfigError("asympt: tmax must exceed 4");
  const auto fit = asymptotics::decay_fit(pb, c.x, c.order, time_grid(c, 4.0));
  emit(c, [&](std::ostream& os) {
    if (c.format == "json") {
      nlohmann::json s = nlohmann::json::array();
      for (const auto& v : fit.samples)
        s.push_back({{"t", v.t}, {"phi", v.phi}, {"phi_asympt", v.asympt}, {"residual", v.residual}, {"used", v.used}});
      const nlohmann::json j{{"order", c.order},
                             {"rate", fit.rate},
                             {"expected_rate", -(c.order + 0.5 * (c.n - 1))},
                             {"c", fit.c},
                             {"samples", s}};
      os << j.dump(2) << '\n';
      return;
    }
    asymptotics::write_csv(fit, os);
  });
  std::cerr << "fitted rate " << num(fit.rate) << " (expected " << num(-(c.order + 0.5 * (c.n - 1))) << ")\n";
  return kExitOk;
}

struct CompareReport {
  double linf_abs = 0.0;
  double linf_rel = 0.0;
  double ref_max = 0.0;
  std::size_t points = 0;
};

inline CompareReport compare(const RunConfig& c, std::vector<std::array<double, 4>>* rows = nullptr) {
  const auto pb = make_problem(c);
  if (pb.mp.n >= 4) throw ConfigError("compare: n must be at most 3");
  fd::FDConfig fc;
  fc.n = c.n;
  fc.m = pb.mp.m;
  fc.dr = c.dr;
  fc.dt = 0.5 * c.dr;
  fc.r_max = std::max(2.0, c.rmax + 1.0);
  fc.t_max = c.tmax;
  const auto f = fd::fd_solve(fc, pb.phi0, pb.phi1);
  CompareReport rep;
  for (double t : time_grid(c)) {
    if (t == 0.0) continue;
    for (double r : radii(c)) {
      const double a = solve(pb, {r, 0.0, 0.0}, t);
      const double b = fd::fd_probe(f, r, t);
      rep.linf_abs = std::max(rep.linf_abs, std::abs(a - b));
      rep.ref_max = std::max(rep.ref_max, std::abs(b));
      ++rep.points;
      if (rows) rows->push_back({r, t, a, b});
    }
  }
  rep.linf_rel = rep.ref_max > 0.0 ? rep.linf_abs / rep.ref_max : rep.linf_abs;
  return rep;
}

inline int cmd_compare(const RunConfig& c) {
  std::vector<std::array<double, 4>> rows;
  const auto rep = compare(c, &rows);
  emit(c, [&](std::ostream& os) {
    if (c.format == "json") {
      const nlohmann::json j{{"n", c.n},
                             {"dr", c.dr},
                             {"points", rep.points},
                             {"linf_abs", rep.linf_abs},
                             {"linf_rel", rep.linf_rel},
                             {"ref_max", rep.ref_max}};
      os << j.dump(2) << '\n';
      return;
    }
    os << "r,t,phi_representation,phi_fd,abs_err\n";
    for (const auto& w : rows)
      os << num(w[0]) << ',' << num(w[1]) << ',' << num(w[2]) << ',' << num(w[3]) << ',' << num(std::abs(w[2] - w[3]))
         << '\n';
  });
  std::cerr << "linf_abs " << num(rep.linf_abs) << " linf_rel " << num(rep.linf_rel) << '\n';
  return kExitOk;
}

/// Runs the configured subcommand and maps failures onto exit codes.
inline int run(const RunConfig& c, std::ostream& err = std::cerr) {
  try {
    validate(c);
    if (c.subcommand == "solve") return cmd_solve(c);
    if (c.subcommand == "kernel") return cmd_kernel(c);
    if (c.subcommand == "huygens") return cmd_huygens(c);
    if (c.subcommand == "asympt") return cmd_asympt(c);
    return cmd_compare(c);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
}

}  // namespace kgds::cli

#endif  // KGDS_TOOLS_CLI_HPP
