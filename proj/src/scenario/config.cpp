#include "matsusy/errors.hpp"
#include "matsusy/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace matsusy {

using nlohmann::json;

namespace {

template <typename T>
T require(const json& j, const char* key) {
    if (!j.contains(key)) throw ConfigError(std::string("missing key '") + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
    }
}

template <typename T>
T optional(const json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
    }
}

Complex complex_from_json(const json& v) {
    if (v.is_number()) return {v.get<double>(), 0.0};
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
        return {v[0].get<double>(), v[1].get<double>()};
    }
    throw ConfigError("complex numbers must be [re, im] pairs");
}

NuClass nu_from_json(const json& m) {
    const auto branch = require<std::string>(m, "nu");
    try {
        if (branch == "positive") return NuClass::positive(require<double>(m, "lambda"));
        if (branch == "negative") return NuClass::negative(require<double>(m, "lambda"));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (branch == "zero") return NuClass::zero();
    throw ConfigError("nu must be one of positive, negative, zero");
}

Model model_from_json(const json& m) {
    if (!m.is_object()) throw ConfigError("model must be an object");
    const NuClass nu = nu_from_json(m);

    const json entries_json = require<json>(m, "entries");
    if (!entries_json.is_array()) throw ConfigError("entries must be an array");
    std::vector<QEntry> entries;
    for (const auto& e : entries_json) {
        QEntry q;
        q.variant = variant_from_name(require<std::string>(e, "variant"));
        q.gamma = optional<double>(e, "gamma", 0.0);
        entries.push_back(q);
    }
    const auto n = static_cast<Eigen::Index>(entries.size());

    const json phi_json = require<json>(m, "phi");
    const auto expected = static_cast<std::size_t>(n * (n + 1) / 2);
    if (!phi_json.is_array() || phi_json.size() != expected) {
        std::ostringstream os;
        os << "phi must list the " << expected << " upper-triangle entries row by row";
        throw ConfigError(os.str());
    }
    CMatrix phi(n, n);
    std::size_t idx = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i; j < n; ++j) {
            const Complex c = complex_from_json(phi_json[idx++]);
            if (i == j && c.imag() != 0.0) throw ConfigError("diagonal phi entries must be real (phi is hermitian)");
            phi(i, j) = c;
            phi(j, i) = std::conj(c);
        }
    }
    try {
        return Model(nu, std::move(entries), require<double>(m, "mu"), phi);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

json model_to_json(const Model& model) {
    json m;
    switch (model.nu_class().branch()) {
    case NuBranch::PositiveLambda:
        m["nu"] = "positive";
        m["lambda"] = model.lambda();
        break;
    case NuBranch::NegativeLambda:
        m["nu"] = "negative";
        m["lambda"] = model.lambda();
        break;
    case NuBranch::Zero:
        m["nu"] = "zero";
        break;
    }
    json entries = json::array();
    for (const auto& e : model.entries()) {
        json q{{"variant", std::string(variant_name(e.variant))}};
        if (variant_has_gamma(e.variant)) q["gamma"] = e.gamma;
        entries.push_back(q);
    }
    m["entries"] = entries;
    m["mu"] = model.mu();
    json phi = json::array();
    for (int i = 0; i < model.dimension(); ++i) {
        for (int j = i; j < model.dimension(); ++j) phi.push_back({model.phi()(i, j).real(), model.phi()(i, j).imag()});
    }
    m["phi"] = phi;
    return m;
}

Tolerances tolerances_from_json(const json& j) {
    Tolerances t;
    if (j.is_null()) return t;
    if (!j.is_object()) throw ConfigError("tolerances must be an object");
    t.identity = optional(j, "identity", t.identity);
    t.partner = optional(j, "partner", t.partner);
    t.fd_order_low = optional(j, "fd_order_low", t.fd_order_low);
    t.fd_order_high = optional(j, "fd_order_high", t.fd_order_high);
    t.zero_mode_residual = optional(j, "zero_mode_residual", t.zero_mode_residual);
    t.rayleigh = optional(j, "rayleigh", t.rayleigh);
    t.ladder = optional(j, "ladder", t.ladder);
    t.orthogonality = optional(j, "orthogonality", t.orthogonality);
    return t;
}

json tolerances_to_json(const Tolerances& t) {
    return {{"identity", t.identity},
            {"partner", t.partner},
            {"fd_order_low", t.fd_order_low},
            {"fd_order_high", t.fd_order_high},
            {"zero_mode_residual", t.zero_mode_residual},
            {"rayleigh", t.rayleigh},
            {"ladder", t.ladder},
            {"orthogonality", t.orthogonality}};
}

GridDomain domain_from_json(const json& d) {
    try {
        return {require<double>(d, "a"), require<double>(d, "b"), require<int>(d, "npoints")};
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
}

}  // namespace

std::string_view task_name(Task t) {
    switch (t) {
    case Task::Verify: return "verify";
    case Task::Spectrum: return "spectrum";
    case Task::GroundState: return "groundstate";
    case Task::Ladder: return "ladder";
    }
    return "?";
}

Task task_from_name(std::string_view name) {
    for (Task t : {Task::Verify, Task::Spectrum, Task::GroundState, Task::Ladder}) {
        if (task_name(t) == name) return t;
    }
    throw ConfigError("unknown task '" + std::string(name) + "'");
}

ScenarioConfig config_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("scenario must be a JSON object");
    const auto schema = require<std::string>(j, "schema");
    if (schema != kScenarioSchema) throw ConfigError("unsupported schema '" + schema + "'");

    std::vector<Task> tasks;
    const json tasks_json = require<json>(j, "tasks");
    if (!tasks_json.is_array() || tasks_json.empty()) throw ConfigError("tasks must be a non-empty array");
    for (const auto& t : tasks_json) {
        if (!t.is_string()) throw ConfigError("task names must be strings");
        const Task task = task_from_name(t.get<std::string>());
        if (std::find(tasks.begin(), tasks.end(), task) == tasks.end()) tasks.push_back(task);
    }

    const int levels = optional(j, "levels", 4);
    if (levels < 1) throw ConfigError("levels must be at least 1");
    const double k = require<double>(j, "k");
    const double shift = optional(j, "shift", 0.0);
    if (!std::isfinite(k) || !std::isfinite(shift)) throw ConfigError("k and shift must be finite");

    std::vector<std::string> notes;
    if (j.contains("notes")) notes = require<std::vector<std::string>>(j, "notes");

    return ScenarioConfig{
        .name = optional<std::string>(j, "name", "scenario"),
        .model = model_from_json(require<json>(j, "model")),
        .k = k,
        .shift = shift,
        .domain = domain_from_json(require<json>(j, "domain")),
        .tasks = std::move(tasks),
        .levels = levels,
        .tol = tolerances_from_json(j.contains("tolerances") ? j.at("tolerances") : json()),
        .notes = std::move(notes),
    };
}

json config_to_json(const ScenarioConfig& c) {
    json tasks = json::array();
    for (Task t : c.tasks) tasks.push_back(std::string(task_name(t)));
    json j{{"schema", std::string(kScenarioSchema)},
           {"name", c.name},
           {"model", model_to_json(c.model)},
           {"k", c.k},
           {"shift", c.shift},
           {"domain", {{"a", c.domain.a()}, {"b", c.domain.b()}, {"npoints", c.domain.npoints()}}},
           {"tasks", tasks},
           {"levels", c.levels},
           {"tolerances", tolerances_to_json(c.tol)}};
    if (!c.notes.empty()) j["notes"] = c.notes;
    return j;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config is not valid JSON: " + std::string(e.what()));
    }
    return config_from_json(j);
}

ScenarioConfig builtin_example(double mu_ex, double phi_ex, double k) {
    if (!(mu_ex > 0.0) || !std::isfinite(mu_ex)) throw ConfigError("example needs mu > 0");
    if (!std::isfinite(phi_ex) || !std::isfinite(k)) throw ConfigError("example parameters must be finite");

    CMatrix phi(2, 2);
    phi << -0.5, -phi_ex, -phi_ex, 0.0;
    Model model(NuClass::zero(), {{QVariant::InvPole, 0.0}, {QVariant::ZeroEntry, 0.0}}, -mu_ex, phi);

    return ScenarioConfig{
        .name = "example-ps",
        .model = std::move(model),
        .k = k,
        .shift = mu_ex,
        .domain = GridDomain(1e-3, 12.0 / std::sqrt(mu_ex), 1500),
        .tasks = {Task::Verify, Task::Spectrum, Task::GroundState, Task::Ladder},
        .levels = 4,
        .tol = {},
        .notes = {"builtin example: the nu = 0 family instantiated with mu_model = -mu_ex, so C_k = +2 mu_ex and "
                  "the constant shift c_k = mu_ex"},
    };
}

}  // namespace matsusy
