#include "railbeam/runner.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "railbeam/errors.hpp"

namespace railbeam {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void expect_object(const json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
}

void expect_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  expect_object(j, where);
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : j.items())
    if (!ok.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
}

double number(const json& j, const char* key, double fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number()) throw ConfigError(where + "." + key + " must be a number");
  return v.get<double>();
}

double required_number(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError("missing " + where + "." + key);
  return number(j, key, 0.0, where);
}

long integer(const json& j, const char* key, long fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number_integer()) throw ConfigError(where + "." + key + " must be an integer");
  return v.get<long>();
}

std::vector<double> numbers(const json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) throw ConfigError(where + " must be an array of numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

std::string type_of(const json& j, const std::string& where) {
  expect_object(j, where);
  if (!j.contains("type") || !j.at("type").is_string()) throw ConfigError(where + ".type must be a string");
  return j.at("type").get<std::string>();
}

// Nodal data file: one "value,slope" pair per line, '#' starts a comment.
std::pair<std::vector<double>, std::vector<double>> read_nodal_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open nodal data file " + path.string());
  std::vector<double> values, slopes;
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    double a = 0.0, b = 0.0;
    if (std::sscanf(line.c_str(), "%lf , %lf", &a, &b) != 2)
      throw ConfigError("malformed line in " + path.string() + ": " + line);
    values.push_back(a);
    slopes.push_back(b);
  }
  return {values, slopes};
}

Profile parse_profile(const json& j, double ell, const std::string& base_dir, const std::string& where) {
  const std::string type = type_of(j, where);
  if (type == "zero") {
    expect_keys(j, {"type"}, where);
    return Profile();
  }
  if (type == "mode") {
    expect_keys(j, {"type", "n", "amp"}, where);
    const long n = integer(j, "n", 1, where);
    if (n < 1) throw ConfigError(where + ".n must be >= 1");
    return Profile::mode(static_cast<int>(n), number(j, "amp", 1.0, where), ell);
  }
  if (type == "gaussian") {
    expect_keys(j, {"type", "center", "width", "amp"}, where);
    const double width = required_number(j, "width", where);
    if (!(width > 0.0)) throw ConfigError(where + ".width must be > 0");
    return Profile::gaussian(required_number(j, "center", where), width, number(j, "amp", 1.0, where));
  }
  if (type == "polynomial") {
    expect_keys(j, {"type", "coeffs"}, where);
    if (!j.contains("coeffs")) throw ConfigError("missing " + where + ".coeffs");
    return Profile::polynomial(numbers(j.at("coeffs"), where + ".coeffs"));
  }
  if (type == "nodal") {
    expect_keys(j, {"type", "file", "values", "slopes"}, where);
    if (j.contains("file")) {
      if (!j.at("file").is_string()) throw ConfigError(where + ".file must be a string");
      fs::path path = j.at("file").get<std::string>();
      if (path.is_relative()) path = fs::path(base_dir) / path;
      auto [values, slopes] = read_nodal_file(path);
      return Profile::nodal(ell, std::move(values), std::move(slopes));
    }
    if (!j.contains("values") || !j.contains("slopes"))
      throw ConfigError(where + " needs either file or values + slopes");
    return Profile::nodal(ell, numbers(j.at("values"), where + ".values"), numbers(j.at("slopes"), where + ".slopes"));
  }
  if (type == "sum") {
    expect_keys(j, {"type", "terms"}, where);
    if (!j.contains("terms") || !j.at("terms").is_array()) throw ConfigError(where + ".terms must be an array");
    Profile out;
    for (std::size_t i = 0; i < j.at("terms").size(); ++i)
      out = out + parse_profile(j.at("terms")[i], ell, base_dir, where + ".terms[" + std::to_string(i) + "]");
    return out;
  }
  throw ConfigError("unknown profile type '" + type + "' in " + where);
}

Envelope parse_envelope(const json& j, const std::string& where) {
  const std::string type = type_of(j, where);
  if (type == "constant") {
    expect_keys(j, {"type", "level"}, where);
    return Envelope{Envelope::Constant{number(j, "level", 1.0, where)}};
  }
  if (type == "sine") {
    expect_keys(j, {"type", "amp", "freq", "phase", "offset"}, where);
    return Envelope{Envelope::Sine{number(j, "amp", 1.0, where), number(j, "freq", 1.0, where),
                                   number(j, "phase", 0.0, where), number(j, "offset", 0.0, where)}};
  }
  if (type == "ramp") {
    expect_keys(j, {"type", "level", "t_rise"}, where);
    const double rise = number(j, "t_rise", 1.0, where);
    if (!(rise > 0.0)) throw ConfigError(where + ".t_rise must be > 0");
    return Envelope{Envelope::SmoothRamp{number(j, "level", 1.0, where), rise}};
  }
  throw ConfigError("unknown envelope type '" + type + "' in " + where);
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir + ": " + ec.message());
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  out << text;
}

std::string to_string(Convention c) { return c == Convention::Published ? "published" : "corrected"; }

json entry_json(const BoundEntry& e) {
  json comps = json::array();
  for (const auto& [name, m] : e.components) comps.push_back({{"name", name}, {"worst_margin", m}});
  json j = {{"check", e.check},
            {"pass", e.pass},
            {"worst_margin", e.worst_margin},
            {"tolerance", e.tolerance},
            {"samples", e.samples},
            {"components", comps}};
  j["first_violation_time"] = e.first_violation_time ? json(*e.first_violation_time) : json(nullptr);
  return j;
}

BeamParams resolved_params(const RunConfig& cfg) { return validate_params(cfg.params); }

}  // namespace

RunConfig parse_config(const json& doc, const std::string& base_dir) {
  expect_keys(doc, {"params", "mesh", "time", "solver", "initial", "input", "certificate", "outputs", "debug", "sweep"},
              "config");
  RunConfig cfg;
  cfg.base_dir = base_dir;

  if (doc.contains("params")) {
    const json& p = doc.at("params");
    expect_keys(p, {"EI", "rho_a", "ell", "k", "alpha", "mu", "Cd"}, "params");
    RawParams& r = cfg.params;
    r.EI = number(p, "EI", r.EI, "params");
    r.rho_a = number(p, "rho_a", r.rho_a, "params");
    r.ell = number(p, "ell", r.ell, "params");
    r.k = number(p, "k", r.k, "params");
    r.alpha = number(p, "alpha", r.alpha, "params");
    r.mu = number(p, "mu", r.mu, "params");
    r.Cd = number(p, "Cd", r.Cd, "params");
  }
  if (doc.contains("mesh")) {
    expect_keys(doc.at("mesh"), {"n_el"}, "mesh");
    cfg.n_el = static_cast<int>(integer(doc.at("mesh"), "n_el", cfg.n_el, "mesh"));
  }
  if (doc.contains("time")) {
    expect_keys(doc.at("time"), {"dt", "t_final"}, "time");
    cfg.dt = number(doc.at("time"), "dt", cfg.dt, "time");
    cfg.t_final = number(doc.at("time"), "t_final", cfg.t_final, "time");
  }
  if (doc.contains("solver")) {
    expect_keys(doc.at("solver"), {"newton_tol", "newton_max_iter"}, "solver");
    cfg.newton_tol = number(doc.at("solver"), "newton_tol", cfg.newton_tol, "solver");
    cfg.newton_max_iter = static_cast<int>(integer(doc.at("solver"), "newton_max_iter", cfg.newton_max_iter, "solver"));
  }
  cfg.initial = doc.value("initial", json{{"w0", {{"type", "mode"}, {"n", 1}}}, {"v0", {{"type", "zero"}}}});
  expect_keys(cfg.initial, {"w0", "v0"}, "initial");
  cfg.input = doc.value("input", json{{"type", "zero"}});
  type_of(cfg.input, "input");
  if (doc.contains("certificate")) {
    const json& c = doc.at("certificate");
    expect_keys(c, {"c_fraction", "convention"}, "certificate");
    cfg.c_fraction = number(c, "c_fraction", cfg.c_fraction, "certificate");
    if (c.contains("convention")) {
      const json& v = c.at("convention");
      if (v == "corrected") cfg.convention = Convention::Corrected;
      else if (v == "published") cfg.convention = Convention::Published;
      else throw ConfigError("certificate.convention must be \"corrected\" or \"published\"");
    }
  }
  if (doc.contains("outputs")) {
    const json& o = doc.at("outputs");
    expect_keys(o, {"directory", "state_snapshot_stride"}, "outputs");
    if (o.contains("directory")) {
      if (!o.at("directory").is_string()) throw ConfigError("outputs.directory must be a string");
      cfg.out_dir = o.at("directory").get<std::string>();
    }
    const long stride = integer(o, "state_snapshot_stride", 0, "outputs");
    if (stride < 0) throw ConfigError("outputs.state_snapshot_stride must be >= 0");
    cfg.snapshot_stride = static_cast<std::size_t>(stride);
  }
  if (doc.contains("debug")) {
    expect_keys(doc.at("debug"), {"omega_scale", "c_l_scale"}, "debug");
    cfg.omega_scale = number(doc.at("debug"), "omega_scale", 1.0, "debug");
    cfg.c_l_scale = number(doc.at("debug"), "c_l_scale", 1.0, "debug");
  }
  if (doc.contains("sweep")) {
    expect_keys(doc.at("sweep"), {"grid"}, "sweep");
    cfg.sweep_grid = doc.at("sweep").value("grid", json());
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("malformed JSON in " + path + ": " + e.what());
  }
  const fs::path parent = fs::path(path).parent_path();
  return parse_config(doc, parent.empty() ? "." : parent.string());
}

void apply_overrides(RunConfig& cfg, const CliOverrides& o) {
  if (o.out_dir) cfg.out_dir = *o.out_dir;
  if (o.seed) cfg.seed = *o.seed;
  if (o.dt) cfg.dt = *o.dt;
}

StepControl step_control(const RunConfig& cfg) {
  StepControl ctrl{cfg.dt, cfg.newton_tol, cfg.newton_max_iter};
  ctrl.validate();
  step_count(cfg.t_final, cfg.dt);
  return ctrl;
}

StateVec build_initial(const RunConfig& cfg, const FemOperators& ops) {
  const double ell = cfg.params.ell;
  const auto part = [&](const char* key) {
    return cfg.initial.contains(key) ? parse_profile(cfg.initial.at(key), ell, cfg.base_dir, std::string("initial.") + key)
                                     : Profile();
  };
  const Profile w0 = part("w0");
  const Profile v0 = part("v0");
  return project_initial([&](double x) { return w0.value(x); }, [&](double x) { return w0.slope(x); },
                         [&](double x) { return v0.value(x); }, [&](double x) { return v0.slope(x); }, ops);
}

InputSignal build_input(const RunConfig& cfg) {
  const json& j = cfg.input;
  const double ell = cfg.params.ell;
  const std::string type = type_of(j, "input");
  if (type == "zero") {
    expect_keys(j, {"type"}, "input");
    return InputSignal::zero(ell);
  }
  if (type == "separable") {
    expect_keys(j, {"type", "profile", "envelope"}, "input");
    if (!j.contains("profile")) throw ConfigError("missing input.profile");
    const Envelope env = j.contains("envelope") ? parse_envelope(j.at("envelope"), "input.envelope") : Envelope{};
    return InputSignal::separable(parse_profile(j.at("profile"), ell, cfg.base_dir, "input.profile"), env, ell);
  }
  if (type == "exp_decay") {
    expect_keys(j, {"type", "profile", "u0", "delta"}, "input");
    if (!j.contains("profile")) throw ConfigError("missing input.profile");
    return InputSignal::exp_decay(parse_profile(j.at("profile"), ell, cfg.base_dir, "input.profile"),
                                  number(j, "u0", 1.0, "input"), required_number(j, "delta", "input"), ell);
  }
  if (type == "moving_gaussian") {
    expect_keys(j, {"type", "F", "speed", "width", "t_enter"}, "input");
    const double F = number(j, "F", 1.0, "input");
    const double speed = required_number(j, "speed", "input");
    const double width = required_number(j, "width", "input");
    if (!j.contains("t_enter")) return InputSignal::entering_load(F, speed, width, ell);
    return InputSignal::moving_gaussian(F, speed, width, number(j, "t_enter", 0.0, "input"), ell);
  }
  const auto snap = [&](double t) { return std::round(t / cfg.dt) * cfg.dt; };
  if (type == "piecewise") {
    expect_keys(j, {"type", "segments"}, "input");
    if (!j.contains("segments") || !j.at("segments").is_array() || j.at("segments").empty())
      throw ConfigError("input.segments must be a non-empty array");
    std::vector<double> starts;
    std::vector<Profile> profiles;
    for (std::size_t i = 0; i < j.at("segments").size(); ++i) {
      const std::string where = "input.segments[" + std::to_string(i) + "]";
      const json& s = j.at("segments")[i];
      expect_keys(s, {"t_start", "profile"}, where);
      if (!s.contains("profile")) throw ConfigError("missing " + where + ".profile");
      starts.push_back(snap(required_number(s, "t_start", where)));
      profiles.push_back(parse_profile(s.at("profile"), ell, cfg.base_dir, where + ".profile"));
    }
    return InputSignal::piecewise(std::move(starts), std::move(profiles), ell);
  }
  if (type == "random_pc") {
    expect_keys(j, {"type", "switches", "max_norm", "grid", "seed"}, "input");
    const long switches = integer(j, "switches", 10, "input");
    const double grid = snap(number(j, "grid", cfg.dt, "input"));
    if (!(grid > 0.0)) throw ConfigError("input.grid must be at least dt");
    const long seed = integer(j, "seed", 0, "input");
    if (seed < 0) throw ConfigError("input.seed must be >= 0");
    const std::uint64_t s = cfg.seed ? *cfg.seed : static_cast<std::uint64_t>(seed);
    return random_piecewise(s, static_cast<int>(switches), cfg.t_final, grid, number(j, "max_norm", 1.0, "input"), ell);
  }
  throw ConfigError("unknown input type '" + type + "'");
}

VerifyResult run_verify(const RunConfig& cfg) {
  const BeamParams p = resolved_params(cfg);
  const StepControl ctrl = step_control(cfg);
  const FemOperators ops = assemble_operators(build_mesh(p.ell(), cfg.n_el));
  const StateVec x0 = build_initial(cfg, ops);
  const InputSignal u = build_input(cfg);

  VerifyResult out;
  out.cert = select_constants(p, cfg.c_fraction, ops, cfg.convention);
  if (cfg.c_l_scale != 1.0 || cfg.omega_scale != 1.0) out.cert = sabotage(out.cert, cfg.c_l_scale, cfg.omega_scale);

  SimulateOptions opts;
  opts.state_stride = cfg.snapshot_stride;
  opts.multiplier = out.cert.c;
  out.traj = simulate(x0, u, cfg.t_final, ctrl, p, ops, opts);

  const bool smooth = out.traj.input_class == InputClass::C1;
  if (smooth) {
    StepControl fine = ctrl;
    fine.dt = 0.5 * ctrl.dt;
    SimulateOptions fine_opts;
    fine_opts.state_stride = 0;
    fine_opts.multiplier = out.cert.c;
    out.fd = calibrate_fd(out.traj, simulate(x0, u, cfg.t_final, fine, p, ops, fine_opts));
  }

  out.report.push_back(check_sandwich(out.traj, out.cert));
  const std::string why = "requires a C1 input; got " + to_string(out.traj.input_class);
  if (smooth) {
    out.report.push_back(check_dissipation(out.traj, out.cert, *out.fd));
    out.report.push_back(check_classical_decay(out.traj, out.cert));
  } else {
    out.skipped.push_back({"dissipation", why});
    out.skipped.push_back({"classical_decay", why});
  }
  out.report.push_back(check_mild_integral(out.traj, out.cert));
  if (out.traj.input_class != InputClass::L2loc)
    out.report.push_back(check_iss(out.traj, out.cert, iss_gains(out.cert), out.fd));
  else
    out.skipped.push_back({"iss", "requires a bounded piecewise-continuous input"});
  if (!smooth && out.traj.input_class != InputClass::L2loc)
    out.skipped.push_back({"iss-lyapunov", why});

  for (const auto& e : out.report) out.pass = out.pass && e.pass;
  return out;
}

json certificate_json(const LyapunovCertificate& cert, const BeamParams& p) {
  const double ra = p.rho_a();
  const double k = p.k();
  const double mu = p.mu();
  const double c = cert.c;
  const auto item = [](double value, const char* constraint, json lo, json hi) {
    return json{{"value", value}, {"constraint", constraint}, {"lower", lo}, {"upper", hi}};
  };
  const json inf = nullptr;  // unbounded
  json constants = json::object();
  constants["c"] = item(c, "0 < c < admissible_c_max", 0.0, cert.c_max);
  constants["eps_b"] = item(cert.eps_b, "c/rho_a < eps_b < k/c", c / ra, k / c);
  constants["eps1"] = item(cert.eps1, "0 < eps1 < 2k/mu - c/(rho_a eps3 mu)", 0.0,
                           2.0 * k / mu - c / (ra * cert.eps3 * mu));
  constants["eps2"] = item(cert.eps2, "c/(2 rho_a) < eps2 < 2EI/Cd", c / (2.0 * ra),
                           p.Cd() > 0.0 ? json(2.0 * p.EI() / p.Cd()) : inf);
  constants["eps3"] = item(cert.eps3, "0 < eps3 < 2mu - 2c - mu c/(eps1 rho_a)", 0.0,
                           2.0 * mu - 2.0 * c - mu * c / (cert.eps1 * ra));
  constants["omega0"] = item(cert.omega0, "omega0 > 0", 0.0, inf);
  constants["eps_r"] = item(cert.eps_r, "eps_r > 0", 0.0, inf);
  constants["r"] = item(cert.r, "r > 1", 1.0, inf);
  constants["omega"] = item(cert.omega, "omega = omega0 / r > 0", 0.0, inf);
  constants["c_l"] = item(cert.c_l, "0 < c_l <= 1", 0.0, 1.0);
  constants["c_u"] = item(cert.c_u, "c_u >= 1", 1.0, inf);
  constants["c_h"] = item(cert.c_h, "c_h >= 0", 0.0, inf);
  constants["c_e"] = item(cert.c_e, "c_e > 0", 0.0, inf);
  constants["input_gain"] = item(cert.input_gain, "input_gain > 0", 0.0, inf);
  constants["decay_gain"] = item(cert.decay_gain, "decay_gain > 0", 0.0, inf);
  constants["mild_gain"] = item(cert.mild_gain, "mild_gain > 0", 0.0, inf);

  const auto& raw = p.raw();
  json doc;
  doc["convention"] = to_string(cert.convention);
  doc["params"] = {{"EI", raw.EI}, {"rho_a", raw.rho_a}, {"ell", raw.ell}, {"k", raw.k},
                   {"alpha", raw.alpha}, {"mu", raw.mu}, {"Cd", raw.Cd}};
  doc["admissible_c_max"] = cert.c_max;
  doc["constants"] = constants;
  doc["omega0_terms"] = cert.omega0_terms;
  doc["violations"] = certificate_violations(cert, p);
  doc["iss_gains"] = {{"beta", "exp(-omega t) ((c_u/c_l) s^2 + (c_h/c_l) s^4)"},
                      {"gamma_sq", "decay_gain s^2"},
                      {"psi1", "c_l s^2"},
                      {"psi2", "c_u s^2 + c_h s^4"},
                      {"alpha_damp", "omega c_l s^2"},
                      {"sigma", "input_gain s^2"}};
  return doc;
}

json report_json(const VerifyResult& r) {
  json checks = json::array();
  for (const auto& e : r.report) checks.push_back(entry_json(e));
  json skipped = json::array();
  for (const auto& s : r.skipped) skipped.push_back({{"check", s.check}, {"reason", s.reason}});
  json doc;
  doc["pass"] = r.pass;
  doc["convention"] = to_string(r.cert.convention);
  doc["input_class"] = to_string(r.traj.input_class);
  doc["samples"] = r.traj.size();
  doc["dt"] = r.traj.dt;
  doc["c"] = r.cert.c;
  doc["omega"] = r.cert.omega;
  doc["fd_constant"] = r.fd ? json(r.fd->c_fd) : json(nullptr);
  doc["checks"] = checks;
  doc["skipped"] = skipped;
  return doc;
}

void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  out << "t,norm_sq,V,input_norm_sq\n";
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double v = traj.lyapunov_value.size() == traj.size() ? traj.lyapunov_value[i] : std::nan("");
    out << fmt(traj.times[i]) << ',' << fmt(traj.energy_norm_sq[i]) << ',' << fmt(v) << ','
        << fmt(traj.input_norm_sq[i]) << '\n';
  }
}

namespace {

void write_snapshots(const Trajectory& traj, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  for (std::size_t s = 0; s < traj.states.size(); ++s) {
    const StateVec& x = traj.states[s];
    out << fmt(traj.times[traj.state_index[s]]);
    for (Eigen::Index i = 0; i < x.w.size(); ++i) out << ',' << fmt(x.w[i]);
    for (Eigen::Index i = 0; i < x.v.size(); ++i) out << ',' << fmt(x.v[i]);
    out << '\n';
  }
}

std::string path_in(const RunConfig& cfg, const char* name) { return (fs::path(cfg.out_dir) / name).string(); }

void print_summary(const VerifyResult& r) {
  for (const auto& e : r.report)
    std::printf("%-16s %s  worst margin %.3e (tol %.0e)\n", e.check.c_str(), e.pass ? "pass" : "FAIL", e.worst_margin,
                e.tolerance);
  for (const auto& s : r.skipped) std::printf("%-16s skipped: %s\n", s.check.c_str(), s.reason.c_str());
}

}  // namespace

int cmd_simulate(const RunConfig& cfg, bool quiet) {
  const BeamParams p = resolved_params(cfg);
  const StepControl ctrl = step_control(cfg);
  const FemOperators ops = assemble_operators(build_mesh(p.ell(), cfg.n_el));
  const StateVec x0 = build_initial(cfg, ops);
  const InputSignal u = build_input(cfg);
  if (!(cfg.c_fraction > 0.0 && cfg.c_fraction < 1.0)) throw ConfigError("c_fraction must lie in (0, 1)");
  SimulateOptions opts;
  opts.state_stride = cfg.snapshot_stride;
  opts.multiplier = cfg.c_fraction * admissible_c_max(p, cfg.convention);
  const Trajectory traj = simulate(x0, u, cfg.t_final, ctrl, p, ops, opts);
  ensure_dir(cfg.out_dir);
  write_trajectory_csv(traj, path_in(cfg, "trajectory.csv"));
  if (cfg.snapshot_stride > 0) write_snapshots(traj, path_in(cfg, "states.csv"));
  if (!quiet)
    std::printf("simulated %zu samples to t=%g; final norm_sq %.6e\n", traj.size(), traj.times.back(),
                traj.energy_norm_sq.back());
  return kOk;
}

int cmd_certify(const RunConfig& cfg, bool quiet) {
  const BeamParams p = resolved_params(cfg);
  const FemOperators ops = assemble_operators(build_mesh(p.ell(), cfg.n_el));
  LyapunovCertificate cert = select_constants(p, cfg.c_fraction, ops, cfg.convention);
  if (cfg.c_l_scale != 1.0 || cfg.omega_scale != 1.0) cert = sabotage(cert, cfg.c_l_scale, cfg.omega_scale);
  ensure_dir(cfg.out_dir);
  write_text(path_in(cfg, "certificate.json"), certificate_json(cert, p).dump(2) + "\n");
  if (!quiet)
    std::printf("c=%.6g c_l=%.6g c_u=%.6g omega=%.6g input_gain=%.6g\n", cert.c, cert.c_l, cert.c_u, cert.omega,
                cert.input_gain);
  return kOk;
}

int cmd_verify(const RunConfig& cfg, bool quiet) {
  const VerifyResult r = run_verify(cfg);
  ensure_dir(cfg.out_dir);
  write_trajectory_csv(r.traj, path_in(cfg, "trajectory.csv"));
  write_text(path_in(cfg, "certificate.json"), certificate_json(r.cert, resolved_params(cfg)).dump(2) + "\n");
  write_text(path_in(cfg, "report.json"), report_json(r).dump(2) + "\n");
  if (!quiet) print_summary(r);
  return r.pass ? kOk : kCheckFailure;
}

int cmd_sweep(const RunConfig& cfg, bool quiet) {
  const json& grid = cfg.sweep_grid;
  if (!grid.is_object() || grid.empty()) throw ConfigError("sweep.grid must be a non-empty object");
  static const std::set<std::string> allowed{"EI", "rho_a", "ell", "k", "alpha", "mu", "Cd", "c_fraction"};
  std::vector<std::string> names;
  std::vector<std::vector<double>> values;
  for (const auto& [name, list] : grid.items()) {  // keys iterate in sorted order
    if (!allowed.count(name)) throw ConfigError("sweep.grid: unknown parameter '" + name + "'");
    values.push_back(numbers(list, "sweep.grid." + name));
    if (values.back().empty()) throw ConfigError("sweep.grid." + name + " is empty");
    names.push_back(name);
  }

  std::ostringstream csv;
  csv << "index";
  for (const auto& n : names) csv << ',' << n;
  csv << ",admissible_c_max,c,eps1,eps2,eps3,omega0,omega,c_l,c_u,c_h,input_gain,status,failed_checks\n";

  std::vector<std::size_t> idx(names.size(), 0);
  bool all_pass = true;
  for (std::size_t row = 0;; ++row) {
    RunConfig point = cfg;
    for (std::size_t i = 0; i < names.size(); ++i) {
      const double v = values[i][idx[i]];
      RawParams& r = point.params;
      const std::string& n = names[i];
      if (n == "EI") r.EI = v;
      else if (n == "rho_a") r.rho_a = v;
      else if (n == "ell") r.ell = v;
      else if (n == "k") r.k = v;
      else if (n == "alpha") r.alpha = v;
      else if (n == "mu") r.mu = v;
      else if (n == "Cd") r.Cd = v;
      else point.c_fraction = v;
    }
    csv << row;
    for (std::size_t i = 0; i < names.size(); ++i) csv << ',' << fmt(values[i][idx[i]]);
    std::string status;
    std::string failed;
    try {
      const VerifyResult r = run_verify(point);
      const auto& c = r.cert;
      for (double x : {c.c_max, c.c, c.eps1, c.eps2, c.eps3, c.omega0, c.omega, c.c_l, c.c_u, c.c_h, c.input_gain})
        csv << ',' << fmt(x);
      for (const auto& e : r.report)
        if (!e.pass) failed += (failed.empty() ? "" : ";") + e.check;
      status = r.pass ? "pass" : "fail";
    } catch (const ConfigError& e) {
      csv << std::string(11, ',');
      status = "config_error";
      failed = e.what();
    } catch (const SolverError& e) {
      csv << std::string(11, ',');
      status = "solver_error";
      failed = e.what();
    }
    for (char& ch : failed)
      if (ch == ',' || ch == '\n' || ch == '"') ch = ' ';
    csv << ',' << status << ',' << failed << '\n';
    all_pass = all_pass && status == "pass";
    if (!quiet) std::printf("point %zu: %s\n", row, status.c_str());

    // Odometer over the grid, last axis fastest.
    bool wrapped = true;
    for (std::size_t d = names.size(); d-- > 0;) {
      if (++idx[d] < values[d].size()) {
        wrapped = false;
        break;
      }
      idx[d] = 0;
    }
    if (wrapped) break;
  }
  ensure_dir(cfg.out_dir);
  write_text(path_in(cfg, "sweep.csv"), csv.str());
  return all_pass ? kOk : kCheckFailure;
}

int run_command(const std::string& command, const std::string& config_path, const CliOverrides& overrides,
                bool quiet) {
  try {
    RunConfig cfg = load_config(config_path);
    apply_overrides(cfg, overrides);
    if (command == "simulate") return cmd_simulate(cfg, quiet);
    if (command == "certify") return cmd_certify(cfg, quiet);
    if (command == "verify") return cmd_verify(cfg, quiet);
    if (command == "sweep") return cmd_sweep(cfg, quiet);
    throw ConfigError("unknown command '" + command + "'");
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const SolverError& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kSolverFailure;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  }
}

}  // namespace railbeam
