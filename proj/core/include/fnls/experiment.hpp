#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fnls/config.hpp"
#include "fnls/solver.hpp"

namespace fnls {

enum class ExperimentKind {
    solve,
    sweep_lambda,
    binding_table,
    bounds_report,
    dimer_curve,
    figure1,
    figure2,
    figure3,
    figure4,
    gap_vs_p,
};

std::string kind_name(ExperimentKind k);
ExperimentKind kind_from_name(const std::string& name);

/// A fully-specified experiment. Reruns with the same spec and seed reproduce
/// all numbers (output differs only in timestamps and wall time).
struct ExperimentSpec {
    ExperimentKind kind = ExperimentKind::solve;
    ModelParams params;
    SolverConfig solver;
    std::string out_dir = ".";
    bool dump_orbitals = false;

    // sweep/figure4
    double lambda_min = 0.25;
    double lambda_max = 3.0;
    int lambda_points = 12;
    // binding-table / figure2 / figure3
    int n_max = 4;
    // gap-vs-p
    std::vector<double> p_list{1.3, 1.6, 1.9};
    // dimer-curve
    std::vector<double> r_list;
};

struct RunRecord {
    std::string kind;
    std::string out_dir;
    bool success = false;
    bool all_converged = false;
    double wall_seconds = 0.0;
    std::string summary;       // plain-text summary (also written to summary.txt)
    std::string record_json;   // full record (also written to record.json)
    std::vector<std::string> files_written;
};

/// Execute the experiment, write record.json + CSV curves + summary.txt under
/// spec.out_dir. Returns the record; solver failures yield success=false
/// partial records instead of throwing.
RunRecord run_experiment(const ExperimentSpec& spec);

/// Reload a record written by run_experiment.
RunRecord load_record(const std::string& out_dir);

/// Defaults for the paper-figure experiment kinds (dimension, exponent, mass).
ExperimentSpec spec_with_figure_defaults(ExperimentKind kind);

}  // namespace fnls
