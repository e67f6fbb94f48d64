// Command-line driver for the fermionic NLS ground-state lab.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "fnls/config.hpp"
#include "fnls/experiment.hpp"

namespace {

struct CommonFlags {
    std::string config_path;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    std::optional<int> dim;
    std::optional<double> p;
    std::optional<double> mass;
    std::optional<int> grid_n;
    std::optional<double> box_l;
    std::optional<int> restarts;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config_path, "solver config file (key = value format)");
    cmd->add_option("--out", f.out_dir, "output directory");
    cmd->add_option("--seed", f.seed, "RNG seed");
    cmd->add_option("--threads", f.threads, "worker pool size");
    cmd->add_option("--dim", f.dim, "dimension (1, 2 or 3)");
    cmd->add_option("--p", f.p, "nonlinearity exponent");
    cmd->add_option("--mass", f.mass, "total mass lambda");
    cmd->add_option("--grid-n", f.grid_n, "grid points per axis (0 = automatic)");
    cmd->add_option("--box-l", f.box_l, "box side length (0 = automatic)");
    cmd->add_option("--restarts", f.restarts, "independent solver restarts");
}

fnls::ExperimentSpec build_spec(fnls::ExperimentKind kind, const CommonFlags& f) {
    fnls::ExperimentSpec spec = fnls::spec_with_figure_defaults(kind);
    if (!f.config_path.empty()) {
        const auto cfg = fnls::load_config_file(f.config_path);
        spec.params = cfg.params;
        spec.solver = cfg.solver;
        spec.dump_orbitals = cfg.dump_orbitals;
    }
    if (f.dim) spec.params.d = *f.dim;
    if (f.p) spec.params.p = *f.p;
    if (f.mass) spec.params.lambda = *f.mass;
    if (f.seed) spec.solver.seed = *f.seed;
    if (f.threads) spec.solver.threads = *f.threads;
    if (f.grid_n) {
        if (*f.grid_n == 0) {
            spec.solver.grid_n.reset();
        } else {
            spec.solver.grid_n = *f.grid_n;
        }
    }
    if (f.box_l) {
        if (*f.box_l == 0.0) {
            spec.solver.box.reset();
        } else {
            spec.solver.box = *f.box_l;
        }
    }
    if (f.restarts) spec.solver.n_restarts = *f.restarts;
    spec.out_dir = f.out_dir;
    spec.params.validate();
    return spec;
}

int execute(const fnls::ExperimentSpec& spec) {
    const auto rec = fnls::run_experiment(spec);
    std::cout << rec.summary;
    std::cout << "wrote " << rec.out_dir << "/record.json ("
              << (rec.success ? (rec.all_converged ? "ok" : "ok, with non-converged points")
                              : "FAILED")
              << ", " << rec.wall_seconds << " s)\n";
    if (!rec.success) return 2;
    return rec.all_converged ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fermionic NLS ground states: solver, bounds and experiments"};
    app.require_subcommand(1);

    struct Verb {
        const char* name;
        const char* help;
        fnls::ExperimentKind kind;
    };
    const Verb verbs[] = {
        {"solve", "one ground-state solve", fnls::ExperimentKind::solve},
        {"sweep-lambda", "J(lambda) over a mass grid", fnls::ExperimentKind::sweep_lambda},
        {"binding-table", "J(N) table with binding verdicts", fnls::ExperimentKind::binding_table},
        {"bounds-report", "closed-form bounds, p_critical, plane-wave bound",
         fnls::ExperimentKind::bounds_report},
        {"dimer-curve", "two-cluster interaction vs separation", fnls::ExperimentKind::dimer_curve},
        {"figure1", "1d crystallization density (d=1, p=1.3, lambda=15)",
         fnls::ExperimentKind::figure1},
        {"figure2", "2d cluster densities N=1..n", fnls::ExperimentKind::figure2},
        {"figure3", "J(N)/N in d=2", fnls::ExperimentKind::figure3},
        {"figure4", "J(lambda) kinks (d=1, p=1.3)", fnls::ExperimentKind::figure4},
        {"gap-vs-p", "J(2)-2J(1) trend toward p=2", fnls::ExperimentKind::gap_vs_p},
    };

    std::vector<std::pair<fnls::ExperimentKind, CommonFlags>> runs;
    runs.reserve(std::size(verbs));
    std::vector<CLI::App*> cmds;
    // per-verb extra knobs
    double lambda_min = 0.25, lambda_max = 3.0;
    int lambda_points = 12;
    int n_max = 4;
    std::vector<double> p_list;
    std::vector<double> r_list;
    bool dump_orbitals = false;

    for (const auto& v : verbs) {
        auto* cmd = app.add_subcommand(v.name, v.help);
        runs.emplace_back(v.kind, CommonFlags{});
        add_common(cmd, runs.back().second);
        if (v.kind == fnls::ExperimentKind::sweep_lambda ||
            v.kind == fnls::ExperimentKind::figure4) {
            cmd->add_option("--lambda-min", lambda_min, "first mass");
            cmd->add_option("--lambda-max", lambda_max, "last mass");
            cmd->add_option("--lambda-points", lambda_points, "number of masses");
        }
        if (v.kind == fnls::ExperimentKind::binding_table ||
            v.kind == fnls::ExperimentKind::figure2 || v.kind == fnls::ExperimentKind::figure3) {
            cmd->add_option("--n-max", n_max, "largest particle number");
        }
        if (v.kind == fnls::ExperimentKind::gap_vs_p) {
            cmd->add_option("--p-list", p_list, "exponents to probe");
        }
        if (v.kind == fnls::ExperimentKind::dimer_curve) {
            cmd->add_option("--r-list", r_list, "separations (default: auto from the decay rate)");
        }
        if (v.kind == fnls::ExperimentKind::solve) {
            cmd->add_flag("--dump-orbitals", dump_orbitals, "write orbitals.bin + sidecar");
        }
        cmds.push_back(cmd);
    }

    std::string validate_path;
    auto* validate = app.add_subcommand("validate-config", "parse a config and print it resolved");
    validate->add_option("path", validate_path, "config file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate->parsed()) {
            const auto cfg = fnls::load_config_file(validate_path);
            std::cout << "# effective configuration (defaults resolved)\n"
                      << fnls::effective_config_string(cfg);
            return 0;
        }
        for (std::size_t i = 0; i < std::size(verbs); ++i) {
            if (!cmds[i]->parsed()) continue;
            auto spec = build_spec(runs[i].first, runs[i].second);
            spec.lambda_min = lambda_min;
            spec.lambda_max = lambda_max;
            spec.lambda_points = lambda_points;
            spec.n_max = n_max;
            if (!p_list.empty()) spec.p_list = p_list;
            if (!r_list.empty()) spec.r_list = r_list;
            if (dump_orbitals) spec.dump_orbitals = true;
            return execute(spec);
        }
    } catch (const fnls::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
