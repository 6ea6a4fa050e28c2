// matsusy: run verification and spectral scenarios for matrix superpotentials.

#include "matsusy/errors.hpp"
#include "matsusy/scenario.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <sstream>

namespace {

struct Overrides {
    std::string model_file;
    std::optional<double> k;
    std::vector<double> domain;
    std::optional<int> levels;
    std::optional<double> tol;
    std::string task_list;
    std::string output = "matsusy-out";
    std::string format = "csv";
};

void add_common(CLI::App* cmd, Overrides& o, bool needs_model) {
    if (needs_model)
        cmd->add_option("--model", o.model_file, "scenario JSON file")->required()->check(CLI::ExistingFile);
    cmd->add_option("--k", o.k, "override the parameter k");
    cmd->add_option("--domain", o.domain, "override the grid: A B N")->expected(3);
    cmd->add_option("--levels", o.levels, "number of ladder levels")->check(CLI::PositiveNumber);
    cmd->add_option("--tol", o.tol, "override the shape-invariance tolerance")->check(CLI::PositiveNumber);
    cmd->add_option("--output", o.output, "output directory");
    cmd->add_option("--format", o.format, "report format")->check(CLI::IsMember({"csv", "json"}));
}

std::vector<matsusy::Task> parse_tasks(const std::string& list) {
    std::vector<matsusy::Task> tasks;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) tasks.push_back(matsusy::task_from_name(item));
    }
    if (tasks.empty()) throw matsusy::ConfigError("--task needs at least one task name");
    return tasks;
}

void apply(const Overrides& o, matsusy::ScenarioConfig& c) {
    if (o.k) c.k = *o.k;
    if (o.domain.size() == 3) {
        const int n = static_cast<int>(o.domain[2]);
        if (n != o.domain[2]) throw matsusy::ConfigError("--domain N must be an integer");
        try {
            c.domain = matsusy::GridDomain(o.domain[0], o.domain[1], n);
        } catch (const matsusy::DomainError& e) {
            throw matsusy::ConfigError(e.what());
        }
    }
    if (o.levels) c.levels = *o.levels;
    if (o.tol) c.tol.identity = *o.tol;
    if (!o.task_list.empty()) c.tasks = parse_tasks(o.task_list);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Shape-invariant matrix superpotentials: residual checks, spectra, ground states"};
    app.require_subcommand(1);

    Overrides o;
    double mu_ex = 1.0;
    double phi_ex = 0.5;

    struct Sub {
        CLI::App* cmd;
        std::optional<matsusy::Task> task;
    };
    std::vector<Sub> subs = {
        {app.add_subcommand("verify", "residual and shape-invariance checks"), matsusy::Task::Verify},
        {app.add_subcommand("spectrum", "low eigenvalues against the energy ladder"), matsusy::Task::Spectrum},
        {app.add_subcommand("groundstate", "zero modes of the lowering operator"), matsusy::Task::GroundState},
        {app.add_subcommand("ladder", "excited states from raising operators"), matsusy::Task::Ladder},
        {app.add_subcommand("all", "every task listed in the config (or --task)"), std::nullopt},
    };
    for (auto& s : subs) add_common(s.cmd, o, true);
    subs[4].cmd->add_option("--task", o.task_list, "comma-separated subset of verify,spectrum,groundstate,ladder");

    auto* example = app.add_subcommand("example-ps", "built-in two-channel example");
    add_common(example, o, false);
    example->add_option("--mu", mu_ex, "mu > 0");
    example->add_option("--phi", phi_ex, "coupling phi");
    example->add_option("--task", o.task_list, "comma-separated subset of tasks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        matsusy::ScenarioConfig config = [&] {
            if (example->parsed()) return matsusy::builtin_example(mu_ex, phi_ex, o.k.value_or(0.3));
            return matsusy::load_config(o.model_file);
        }();
        apply(o, config);
        for (const auto& s : subs) {
            if (s.cmd->parsed() && s.task) config.tasks = {*s.task};
        }

        const matsusy::RunReport report = matsusy::run(config);
        matsusy::emit(report, o.format == "json" ? matsusy::EmitFormat::Json : matsusy::EmitFormat::Csv, o.output);

        for (const auto& t : report.tasks) {
            const char* status = t.status == matsusy::TaskStatus::Pass   ? "pass"
                                 : t.status == matsusy::TaskStatus::Fail ? "FAIL"
                                                                          : "ERROR";
            std::cout << matsusy::task_name(t.task) << ": " << status;
            if (!t.error.empty()) std::cout << " (" << t.error << ")";
            std::cout << '\n';
        }
        std::cout << "report written to " << o.output << '\n';
        return report.exit_code();
    } catch (const matsusy::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const matsusy::IoError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
