#pragma once

// Config-driven scenario runner behind the command-line tool.
//
// Config and report schemas are versioned JSON documents. Complex numbers are
// [re, im] pairs; phi is given as its row-major upper triangle.

#include "matsusy/invariance.hpp"
#include "matsusy/spectral.hpp"
#include "matsusy/superpotential.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace matsusy {

inline constexpr std::string_view kScenarioSchema = "matsusy.scenario/1";
inline constexpr std::string_view kReportSchema = "matsusy.report/1";

enum class Task { Verify, Spectrum, GroundState, Ladder };

std::string_view task_name(Task t);
Task task_from_name(std::string_view name);  // throws ConfigError

struct Tolerances {
    double identity = 1e-9;            ///< analytic shape-invariance and C_k agreement
    double partner = 1e-10;            ///< partner_identity
    double fd_order_low = 3.2;         ///< accepted error ratio under step halving
    double fd_order_high = 4.8;
    double zero_mode_residual = 1e-6;  ///< ||a psi|| / ||psi||
    double rayleigh = 1e-3;            ///< zero-mode Rayleigh quotient vs lowest eigenvalue
    double ladder = 2e-2;              ///< relative gap to the predicted ladder energy
    double orthogonality = 1e-4;       ///< overlap of excited states with the zero modes
};

struct ScenarioConfig {
    std::string name;
    Model model;
    double k;
    double shift;
    GridDomain domain;
    std::vector<Task> tasks;
    int levels = 4;
    Tolerances tol;
    std::vector<std::string> notes;  ///< convention notes copied into the report
};

ScenarioConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ScenarioConfig& config);
ScenarioConfig load_config(const std::filesystem::path& path);

/// The two-channel nu = 0 example with Q = diag(-1/x, 0) and
/// P = [[mu x/2 - 1/(2x), -phi/sqrt(x)], [-phi/sqrt(x), mu x]], realised as
/// the canonical family with mu_model = -mu_ex, phi_11 = -1/2, phi_12 = -phi_ex.
ScenarioConfig builtin_example(double mu_ex, double phi_ex, double k);

enum class TaskStatus { Pass, Fail, Error };

struct SpectrumRow {
    int n;
    double eigenvalue;
    double ladder_prediction;
    double abs_gap;
};

struct TaskResult {
    Task task;
    TaskStatus status = TaskStatus::Pass;
    std::string error;
    nlohmann::json details = nlohmann::json::object();
};

struct RunReport {
    std::string scenario;
    std::vector<TaskResult> tasks;
    std::vector<std::string> notes;
    SpectralReport spectral;
    std::vector<SpectrumRow> spectrum_rows;
    std::vector<GridSpinor> ground_states;

    /// 0 all tasks met tolerance, 1 some task missed it, 3 some task hit a numerical error.
    int exit_code() const;
    const TaskResult* find(Task t) const;
    nlohmann::json summary() const;
};

RunReport run(const ScenarioConfig& config);

enum class EmitFormat { Csv, Json };

/// Writes summary.json and, for Csv, spectrum.csv and groundstate_<j>.csv into `dir`.
void emit(const RunReport& report, EmitFormat format, const std::filesystem::path& dir);

}  // namespace matsusy
