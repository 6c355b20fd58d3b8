#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "railbeam/beam_model.hpp"
#include "railbeam/fem.hpp"
#include "railbeam/inputs.hpp"
#include "railbeam/integrator.hpp"
#include "railbeam/lyapunov.hpp"

namespace railbeam {

/// Parsed run configuration. Profiles, initial data and inputs stay as JSON
/// descriptors until a mesh exists; see README for the schema.
struct RunConfig {
  RawParams params;
  int n_el = 32;
  double dt = 1e-2;
  double t_final = 10.0;
  double newton_tol = 1e-10;
  int newton_max_iter = 25;
  nlohmann::json initial;
  nlohmann::json input;
  double c_fraction = 0.5;
  Convention convention = Convention::Corrected;
  std::string out_dir = "out";
  std::size_t snapshot_stride = 0;
  double omega_scale = 1.0;
  double c_l_scale = 1.0;
  nlohmann::json sweep_grid;  // object: name -> array of values
  std::optional<std::uint64_t> seed;
  std::string base_dir = ".";  // resolves relative nodal-data paths
};

/// Throws ConfigError on unknown keys, wrong types or invalid values.
RunConfig parse_config(const nlohmann::json& doc, const std::string& base_dir = ".");
RunConfig load_config(const std::string& path);

struct CliOverrides {
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<double> dt;
};

void apply_overrides(RunConfig& cfg, const CliOverrides& o);

StepControl step_control(const RunConfig& cfg);
StateVec build_initial(const RunConfig& cfg, const FemOperators& ops);
/// Piecewise start times are snapped to the nearest multiple of dt.
InputSignal build_input(const RunConfig& cfg);

struct SkippedCheck {
  std::string check;
  std::string reason;
};

struct VerifyResult {
  LyapunovCertificate cert;
  Trajectory traj;
  std::optional<FdCalibration> fd;
  BoundReport report;
  std::vector<SkippedCheck> skipped;
  bool pass = true;
};

/// simulate + certify + every check the input class admits.
VerifyResult run_verify(const RunConfig& cfg);

nlohmann::json certificate_json(const LyapunovCertificate& cert, const BeamParams& p);
nlohmann::json report_json(const VerifyResult& result);

/// Writes t, norm_sq, V, input_norm_sq with 17 significant digits.
void write_trajectory_csv(const Trajectory& traj, const std::string& path);

enum ExitCode : int { kOk = 0, kConfigError = 2, kSolverFailure = 3, kCheckFailure = 4 };

/// Subcommand drivers; exceptions escape, run_command maps them to exit codes.
int cmd_simulate(const RunConfig& cfg, bool quiet);
int cmd_certify(const RunConfig& cfg, bool quiet);
int cmd_verify(const RunConfig& cfg, bool quiet);
int cmd_sweep(const RunConfig& cfg, bool quiet);

/// Loads the config, applies overrides and runs `command`, translating
/// ConfigError to 2 and SolverError to 3. Messages go to stderr.
int run_command(const std::string& command, const std::string& config_path, const CliOverrides& overrides,
                bool quiet);

}  // namespace railbeam
