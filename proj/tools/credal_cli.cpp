#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "credal/fuzz.hpp"
#include "credal/scenario.hpp"

namespace {

constexpr int kPass = 0;
constexpr int kCheckFailed = 1;
constexpr int kInputError = 2;
constexpr int kResourceError = 3;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw credal::invalid_input("cannot open scenario file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void emit(const std::string& out_path, const std::string& content) {
    if (out_path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw credal::invalid_input("cannot open output file: " + out_path);
    out << content;
}

/// Applies repeatable `name=value` tolerance overrides.
void apply_tolerances(const std::vector<std::string>& overrides,
                      credal::check_tolerances& tol) {
    for (const std::string& item : overrides) {
        const auto eq = item.find('=');
        if (eq == std::string::npos)
            throw credal::invalid_input("--tol expects name=value, got: " + item);
        const std::string name = item.substr(0, eq);
        double value = 0.0;
        try {
            value = std::stod(item.substr(eq + 1));
        } catch (const std::exception&) {
            throw credal::invalid_input("--tol " + name + ": not a number");
        }
        if (!(value > 0.0))
            throw credal::invalid_input("--tol " + name + ": must be positive");
        if (name == "identity") tol.identity = value;
        else if (name == "membership") tol.membership = value;
        else if (name == "inequality_slack") tol.inequality_slack = value;
        else if (name == "minimax") tol.minimax = value;
        else if (name == "conditional") tol.conditional = value;
        else if (name == "classical") tol.classical = value;
        else if (name == "oracle_rel") tol.oracle_rel = value;
        else throw credal::invalid_input("--tol: unknown tolerance name: " + name);
    }
}

struct check_args {
    std::string scenario_path;
    std::string out;
    std::uint64_t seed = 0;
    bool seed_set = false;
    double budget = 0.0;
    std::vector<std::string> tol;
};

int do_check(const check_args& a) {
    credal::scenario_file file = credal::parse_scenario(read_file(a.scenario_path));
    if (a.seed_set) file.options.seed = a.seed;
    if (a.budget > 0.0) {
        file.options.eval.limits.paths = a.budget;
        file.options.eval.limits.selections = a.budget;
    }
    apply_tolerances(a.tol, file.options.tol);

    credal::check_report report = credal::certify(file.seq, file.options);
    if (report.scenario.empty())
        report.scenario = std::filesystem::path(a.scenario_path).filename().string();
    emit(a.out, credal::report_json(report));
    return report.all_ok() ? kPass : kCheckFailed;
}

struct fuzz_args {
    std::string out;
    std::uint64_t seed = 0;
    std::size_t trials = 200;
    std::size_t d_max = 2, n_max = 3, m_max = 3, k_max = 3;
    double budget = 0.0;
    std::vector<std::string> tol;
};

int do_fuzz(const fuzz_args& a) {
    credal::fuzz_config cfg;
    cfg.seed = a.seed;
    cfg.trials = a.trials;
    cfg.d_max = a.d_max;
    cfg.n_max = a.n_max;
    cfg.m_max = a.m_max;
    cfg.k_max = a.k_max;
    if (a.budget > 0.0) {
        cfg.eval.limits.paths = a.budget;
        cfg.eval.limits.selections = a.budget;
    }
    apply_tolerances(a.tol, cfg.tol);

    const credal::fuzz_outcome outcome = credal::fuzz(cfg);
    emit(a.out, outcome.summary_json);

    // counterexamples land next to the summary (or in the working directory)
    const std::filesystem::path dir =
        a.out.empty() ? std::filesystem::path(".")
                      : std::filesystem::path(a.out).parent_path();
    for (std::size_t i = 0; i < outcome.stats.failed_trials.size(); i++) {
        const std::string name =
            "counterexample-" + std::to_string(outcome.stats.failed_trials[i]) + ".json";
        std::ofstream dump(dir / name, std::ios::binary);
        dump << outcome.stats.counterexamples[i];
        std::cerr << "counterexample written: " << (dir / name).string() << "\n";
    }
    return outcome.stats.failures == 0 ? kPass : kCheckFailed;
}

struct sweep_args {
    std::string scenario_path;
    std::string out;
    std::size_t n_max = 1;
    double budget = 0.0;
};

int do_sweep(const sweep_args& a) {
    credal::scenario_file file = credal::parse_scenario(read_file(a.scenario_path));
    if (a.budget > 0.0) {
        file.options.eval.limits.paths = a.budget;
        file.options.eval.limits.selections = a.budget;
    }
    // the table is built from one marginal replicated; require that shape
    const credal::marginal& base = file.seq.at(0);
    for (std::size_t i = 1; i < file.seq.size(); i++) {
        const credal::marginal& other = file.seq.at(i);
        if (other.support() != base.support() || other.generators() != base.generators())
            throw credal::invalid_input(
                "sweep: scenario must be iid (all marginals identical); marginal " +
                std::to_string(i) + " differs");
    }

    const credal::sweep_result table =
        credal::sweep(base, a.n_max, file.options.eval);
    emit(a.out, table.csv);
    if (table.truncated) {
        std::cerr << "sweep truncated: " << table.note << "\n";
        return kResourceError;
    }
    return kPass;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"finite credal sequences: verify concentration bounds on scenarios"};
    app.require_subcommand(1);

    check_args ca;
    CLI::App* check = app.add_subcommand(
        "check", "run every certification check on a scenario file");
    check->add_option("scenario", ca.scenario_path, "scenario JSON file")->required();
    check->add_option("--out", ca.out, "write the report here instead of stdout");
    check->add_option("--seed", ca.seed, "seed for sampled directions")
        ->each([&ca](const std::string&) { ca.seed_set = true; });
    check->add_option("--budget", ca.budget, "path/selection enumeration budget");
    check->add_option("--tol", ca.tol, "tolerance override, name=value (repeatable)");

    fuzz_args fa;
    CLI::App* fz = app.add_subcommand(
        "fuzz", "random scenario campaign against brute-force oracles");
    fz->add_option("--seed", fa.seed, "campaign seed");
    fz->add_option("--trials", fa.trials, "number of scenarios");
    fz->add_option("--d-max", fa.d_max, "max dimension");
    fz->add_option("--n-max", fa.n_max, "max sequence length");
    fz->add_option("--m-max", fa.m_max, "max support size");
    fz->add_option("--k-max", fa.k_max, "max generator count");
    fz->add_option("--out", fa.out, "write the summary here instead of stdout");
    fz->add_option("--budget", fa.budget, "path/selection enumeration budget");
    fz->add_option("--tol", fa.tol, "tolerance override, name=value (repeatable)");

    sweep_args sa;
    CLI::App* sw = app.add_subcommand(
        "sweep", "bound-vs-value table for growing iid length");
    sw->add_option("scenario", sa.scenario_path, "iid scenario JSON file")->required();
    sw->add_option("--n-max", sa.n_max, "largest sequence length")->required();
    sw->add_option("--out", sa.out, "write the CSV here instead of stdout");
    sw->add_option("--budget", sa.budget, "path/selection enumeration budget");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        std::cout << credal::error_json("input", e.what());
        return kInputError;
    }

    try {
        if (check->parsed()) return do_check(ca);
        if (fz->parsed()) return do_fuzz(fa);
        return do_sweep(sa);
    } catch (const credal::budget_exceeded& e) {
        std::cout << credal::error_json("resource", e.what());
        return kResourceError;
    } catch (const credal::convergence_failure& e) {
        std::cout << credal::error_json("convergence", e.what());
        return kResourceError;
    } catch (const credal::invalid_input& e) {
        std::cout << credal::error_json("input", e.what());
        return kInputError;
    } catch (const credal::index_error& e) {
        std::cout << credal::error_json("input", e.what());
        return kInputError;
    } catch (const std::exception& e) {
        std::cout << credal::error_json("internal", e.what());
        return kResourceError;
    }
}
