#include "matsusy/errors.hpp"
#include "matsusy/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace matsusy {

using nlohmann::json;

namespace {

constexpr int kMaxSamples = 200;

// Domain nodes far enough from the window edges for a central stencil of
// width `step` to stay well inside, thinned to at most kMaxSamples.
SampleGrid interior_samples(const ScenarioConfig& c, double step) {
    const Interval w = validity_window(c.model, 0.5 * (c.domain.a() + c.domain.b()));
    const double margin = 20.0 * step;
    std::vector<double> eligible;
    for (int i = 0; i < c.domain.npoints(); ++i) {
        const double x = c.domain.x(i);
        if (x - w.lo > margin && w.hi - x > margin) eligible.push_back(x);
    }
    SampleGrid g;
    g.step = step;
    const std::size_t stride = std::max<std::size_t>(1, (eligible.size() + kMaxSamples - 1) / kMaxSamples);
    for (std::size_t i = 0; i < eligible.size(); i += stride) g.points.push_back(eligible[i]);
    if (g.points.empty()) throw DomainError("domain has no nodes far enough from the window edges");
    return g;
}

double ratio(double coarse, double fine) {
    return fine > 0.0 ? coarse / fine : std::numeric_limits<double>::infinity();
}

// Central differences are accurate to O(h^2): the error ratio under halving
// should sit near 4 unless both errors are already at rounding level.
bool second_order(double coarse, double fine, const Tolerances& tol) {
    constexpr double kRoundoffFloor = 1e-8;
    if (coarse < kRoundoffFloor && fine < kRoundoffFloor) return true;
    const double r = ratio(coarse, fine);
    return r >= tol.fd_order_low && r <= tol.fd_order_high;
}

json residual_json(const ResidualReport& r) {
    return {{"max_abs", r.max_abs}, {"argmax_x", r.argmax_x}, {"grid_spacing", r.grid_spacing}};
}

void run_verify(const ScenarioConfig& c, TaskResult& out) {
    const double step = std::min(1e-2, (c.domain.b() - c.domain.a()) / 200.0);
    const SampleGrid coarse = interior_samples(c, step);
    SampleGrid fine = coarse;
    fine.step = 0.5 * step;

    const auto r1 = residual_determining(c.model, coarse);
    const auto r2 = residual_determining(c.model, fine);
    const bool q_ok = second_order(r1.q.max_abs, r2.q.max_abs, c.tol);
    const bool p_ok = second_order(r1.p.max_abs, r2.p.max_abs, c.tol);

    // Identity checks are absolute on O(1) potentials and relative where V is large.
    const int n = c.model.dimension();
    double vscale = 1.0;
    for (double x : coarse.points) vscale = std::max(vscale, max_abs(eval_V(c.model, c.k, x, Partner::Plus)));

    const CkMeasurement m = measure_Ck(c.model, c.k, coarse);
    const double predicted = predicted_Ck(c.model, c.k);
    const double identity_tol = c.tol.identity * vscale;
    const bool ck_ok = m.non_identity <= identity_tol && m.variation <= identity_tol &&
                       std::abs(m.value - predicted) <= identity_tol;

    double partner = 0.0;
    for (double x : coarse.points) {
        const CMatrix d = eval_V(c.model, c.k, x, Partner::Plus) -
                          (eval_V(c.model, c.k + 1.0, x, Partner::Minus) + m.value * CMatrix::Identity(n, n));
        partner = std::max(partner, max_abs(d));
    }
    const bool partner_ok = partner <= c.tol.partner * vscale;

    out.details = {
        {"samples", coarse.points.size()},
        {"q_residual", {residual_json(r1.q), residual_json(r2.q)}},
        {"p_residual", {residual_json(r1.p), residual_json(r2.p)}},
        {"q_ratio", ratio(r1.q.max_abs, r2.q.max_abs)},
        {"p_ratio", ratio(r1.p.max_abs, r2.p.max_abs)},
        {"ck_measured", m.value},
        {"ck_predicted", predicted},
        {"ck_non_identity", m.non_identity},
        {"ck_variation", m.variation},
        {"partner_identity", partner},
        {"potential_scale", vscale},
        {"checks", {{"q_order", q_ok}, {"p_order", p_ok}, {"ck", ck_ok}, {"partner", partner_ok}}},
    };
    out.status = q_ok && p_ok && ck_ok && partner_ok ? TaskStatus::Pass : TaskStatus::Fail;
}

void run_spectrum(const ScenarioConfig& c, RunReport& report, TaskResult& out) {
    const HamiltonianMatrix h = discretize(c.model, c.k, c.shift, c.domain);
    const int count = std::min(h.size(), c.levels * c.model.dimension());
    const auto eigenvalues = low_spectrum(h, count);

    std::vector<double> predictions;
    for (int m = 0; m < c.levels; ++m) predictions.push_back(energy_ladder(c.model, c.k, c.shift, m));

    report.spectrum_rows.clear();
    bool ok = true;
    for (int i = 0; i < count; ++i) {
        const double e = eigenvalues[static_cast<std::size_t>(i)];
        const auto nearest = std::min_element(predictions.begin(), predictions.end(), [&](double a, double b) {
            return std::abs(a - e) < std::abs(b - e);
        });
        const double gap = std::abs(*nearest - e);
        ok = ok && gap <= c.tol.ladder * std::max(1.0, std::abs(*nearest));
        report.spectrum_rows.push_back({static_cast<int>(nearest - predictions.begin()), e, *nearest, gap});
    }

    double conv = std::numeric_limits<double>::quiet_NaN();
    try {
        conv = grid_convergence_ratio(c.model, c.k, c.shift, c.domain);
    } catch (const Error&) {
        // diagnostic only
    }

    report.spectral.eigenvalues = eigenvalues;
    report.spectral.ladder_predictions = predictions;
    report.spectral.convergence_ratio = conv;

    json rows = json::array();
    for (const auto& r : report.spectrum_rows) {
        rows.push_back({{"n", r.n}, {"eigenvalue", r.eigenvalue}, {"ladder_prediction", r.ladder_prediction},
                        {"abs_gap", r.abs_gap}});
    }
    out.details = {{"rows", rows}, {"convergence_ratio", conv}, {"tolerance", c.tol.ladder}};
    out.status = ok ? TaskStatus::Pass : TaskStatus::Fail;
}

double lowest_eigenvalue(const ScenarioConfig& c, const RunReport& report) {
    if (!report.spectral.eigenvalues.empty()) return report.spectral.eigenvalues.front();
    return low_spectrum(discretize(c.model, c.k, c.shift, c.domain), 1).front();
}

void run_groundstate(const ScenarioConfig& c, RunReport& report, TaskResult& out) {
    const SuperpotentialField field = superpotential_field(c.model, c.k, c.domain);
    const auto modes = zero_mode_basis(field, c.domain);
    report.ground_states = modes;

    const HamiltonianMatrix h = discretize(c.model, c.k, c.shift, c.domain);
    const double e_low = lowest_eigenvalue(c, report);

    json per_mode = json::array();
    double worst = 0.0;
    bool ok = true;
    for (const auto& psi : modes) {
        const double res = zero_mode_residual(field, psi);
        const double rq = rayleigh_quotient(h, psi);
        worst = std::max(worst, res);
        const bool mode_ok = res < c.tol.zero_mode_residual && std::abs(rq - e_low) <= c.tol.rayleigh;
        ok = ok && mode_ok;
        per_mode.push_back({{"residual", res}, {"rayleigh_quotient", rq}, {"pass", mode_ok}});
    }
    if (!modes.empty()) report.spectral.residual_zero_mode = worst;

    out.details = {{"dimension", modes.size()}, {"lowest_eigenvalue", e_low}, {"modes", per_mode}};
    out.status = ok ? TaskStatus::Pass : TaskStatus::Fail;
}

void run_ladder(const ScenarioConfig& c, const RunReport& report, TaskResult& out) {
    const HamiltonianMatrix h = discretize(c.model, c.k, c.shift, c.domain);
    const auto ground = report.ground_states.empty() ? zero_mode_basis(c.model, c.k, c.domain) : report.ground_states;

    json levels = json::array();
    bool ok = true;
    for (int level = 1; level < c.levels; ++level) {
        const double target = energy_ladder(c.model, c.k, c.shift, level);
        json states = json::array();
        for (const auto& psi : excited_state(c.model, c.k, level, c.domain)) {
            const double rq = rayleigh_quotient(h, psi);
            double overlap = 0.0;
            for (const auto& g : ground) overlap = std::max(overlap, std::abs(inner_product(g, psi)));
            const bool state_ok = std::abs(rq - target) <= c.tol.ladder * std::max(1.0, std::abs(target)) &&
                                  overlap <= c.tol.orthogonality;
            ok = ok && state_ok;
            states.push_back({{"rayleigh_quotient", rq}, {"zero_mode_overlap", overlap}, {"pass", state_ok}});
        }
        levels.push_back({{"level", level}, {"prediction", target}, {"states", states}});
    }
    out.details = {{"levels", levels}};
    out.status = ok ? TaskStatus::Pass : TaskStatus::Fail;
}

std::string_view status_name(TaskStatus s) {
    switch (s) {
    case TaskStatus::Pass: return "pass";
    case TaskStatus::Fail: return "fail";
    case TaskStatus::Error: return "error";
    }
    return "?";
}

}  // namespace

int RunReport::exit_code() const {
    bool failed = false;
    for (const auto& t : tasks) {
        if (t.status == TaskStatus::Error) return 3;
        failed = failed || t.status == TaskStatus::Fail;
    }
    return failed ? 1 : 0;
}

const TaskResult* RunReport::find(Task t) const {
    for (const auto& r : tasks) {
        if (r.task == t) return &r;
    }
    return nullptr;
}

json RunReport::summary() const {
    json task_map = json::object();
    for (const auto& t : tasks) {
        json entry{{"status", std::string(status_name(t.status))}, {"details", t.details}};
        if (!t.error.empty()) entry["error"] = t.error;
        task_map[std::string(task_name(t.task))] = entry;
    }
    json j{{"schema", std::string(kReportSchema)},
           {"scenario", scenario},
           {"notes", notes},
           {"tasks", task_map},
           {"exit_code", exit_code()}};
    if (!spectral.eigenvalues.empty()) {
        j["spectral"] = {{"eigenvalues", spectral.eigenvalues},
                         {"ladder_predictions", spectral.ladder_predictions},
                         {"residual_zero_mode", spectral.residual_zero_mode},
                         {"convergence_ratio", spectral.convergence_ratio}};
    }
    return j;
}

RunReport run(const ScenarioConfig& config) {
    if (config.tasks.empty()) throw ConfigError("no tasks requested");

    RunReport report;
    report.scenario = config.name;
    report.notes = config.notes;
    report.notes.push_back("shape-invariance constant: C_k = (2k+1) nu - 2 mu");
    report.notes.push_back("ladder energies: E_n = shift + (2kn + n^2) nu - 2 n mu; with mu < 0 the levels rise, "
                           "so a published -(2n+1) mu for mu > 0 appears here as +(2n+1) |mu|");

    for (Task t : {Task::Verify, Task::Spectrum, Task::GroundState, Task::Ladder}) {
        if (std::find(config.tasks.begin(), config.tasks.end(), t) == config.tasks.end()) continue;
        TaskResult result;
        result.task = t;
        try {
            switch (t) {
            case Task::Verify: run_verify(config, result); break;
            case Task::Spectrum: run_spectrum(config, report, result); break;
            case Task::GroundState: run_groundstate(config, report, result); break;
            case Task::Ladder: run_ladder(config, report, result); break;
            }
        } catch (const std::exception& e) {
            result.status = TaskStatus::Error;
            result.error = e.what();
        }
        report.tasks.push_back(std::move(result));
    }
    return report;
}

}  // namespace matsusy
