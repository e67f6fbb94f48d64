#include "fnls/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <future>
#include <sstream>

#include <json.hpp>

#include "fnls/bounds.hpp"
#include "fnls/dimer.hpp"
#include "fnls/io.hpp"
#include "fnls/ledger.hpp"
#include "fnls/util.hpp"

namespace fnls {

namespace fs = std::filesystem;
using nlohmann::json;

std::string kind_name(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::solve: return "solve";
        case ExperimentKind::sweep_lambda: return "sweep-lambda";
        case ExperimentKind::binding_table: return "binding-table";
        case ExperimentKind::bounds_report: return "bounds-report";
        case ExperimentKind::dimer_curve: return "dimer-curve";
        case ExperimentKind::figure1: return "figure1";
        case ExperimentKind::figure2: return "figure2";
        case ExperimentKind::figure3: return "figure3";
        case ExperimentKind::figure4: return "figure4";
        case ExperimentKind::gap_vs_p: return "gap-vs-p";
    }
    return "unknown";
}

ExperimentKind kind_from_name(const std::string& name) {
    for (int k = 0; k <= static_cast<int>(ExperimentKind::gap_vs_p); ++k) {
        if (kind_name(static_cast<ExperimentKind>(k)) == name) {
            return static_cast<ExperimentKind>(k);
        }
    }
    throw std::invalid_argument("unknown experiment kind '" + name + "'");
}

ExperimentSpec spec_with_figure_defaults(ExperimentKind kind) {
    ExperimentSpec spec;
    spec.kind = kind;
    switch (kind) {
        case ExperimentKind::figure1:
            spec.params = ModelParams{1, 1.3, 15.0};
            spec.solver.grid_n = 2048;
            spec.solver.n_restarts = 2;
            break;
        case ExperimentKind::figure2:
        case ExperimentKind::figure3:
            spec.params = ModelParams{2, 1.5, 1.0};
            spec.n_max = 4;
            spec.solver.n_restarts = 3;
            break;
        case ExperimentKind::figure4:
            spec.params = ModelParams{1, 1.3, 3.0};
            spec.lambda_min = 0.25;
            spec.lambda_max = 3.0;
            spec.lambda_points = 12;
            break;
        case ExperimentKind::dimer_curve:
            spec.params = ModelParams{1, 1.3, 1.0};
            break;
        case ExperimentKind::gap_vs_p:
            spec.params = ModelParams{1, 1.3, 2.0};
            spec.p_list = {1.3, 1.6, 1.9};
            break;
        default:
            break;
    }
    return spec;
}

namespace {

std::string utc_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

json spec_to_json(const ExperimentSpec& spec) {
    json j;
    j["kind"] = kind_name(spec.kind);
    j["params"] = {{"d", spec.params.d}, {"p", spec.params.p}, {"lambda", spec.params.lambda}};
    json s;
    s["grid_n"] = spec.solver.grid_n ? *spec.solver.grid_n : 0;
    s["box_l"] = spec.solver.box ? *spec.solver.box : 0.0;
    s["el_tol"] = spec.solver.el_tol;
    s["eig_tol"] = spec.solver.eig_tol;
    s["energy_tol"] = spec.solver.energy_tol;
    s["max_iter"] = spec.solver.max_iter;
    s["mixing"] = spec.solver.mixing;
    s["n_restarts"] = spec.solver.n_restarts;
    s["seed"] = spec.solver.seed;
    s["engine"] = spec.solver.engine;
    s["threads"] = spec.solver.threads;
    s["box_policy"] = {{"l_min", spec.solver.box_policy.l_min},
                       {"c_box", spec.solver.box_policy.c_box},
                       {"margin", spec.solver.box_policy.margin},
                       {"h_target", spec.solver.box_policy.h_target},
                       {"n_max", spec.solver.box_policy.n_max}};
    s["c_lt"] = spec.solver.c_lt;
    j["solver"] = s;
    j["dump_orbitals"] = spec.dump_orbitals;
    j["lambda_min"] = spec.lambda_min;
    j["lambda_max"] = spec.lambda_max;
    j["lambda_points"] = spec.lambda_points;
    j["n_max"] = spec.n_max;
    j["p_list"] = spec.p_list;
    j["r_list"] = spec.r_list;
    return j;
}

json result_brief(const GroundStateResult& r) {
    json j;
    j["lambda"] = r.params.lambda;
    j["energy"] = r.energy;
    j["converged"] = r.converged;
    j["iterations"] = r.iterations;
    j["mu"] = r.mu;
    if (r.mu_next) j["mu_next"] = *r.mu_next;
    j["virial_residual"] = r.diagnostics.virial_residual;
    j["aufbau_ok"] = r.diagnostics.aufbau_ok;
    j["mu_bounds_ok"] = r.diagnostics.mu_bounds_ok;
    j["restart_energies"] = r.restart_energies;
    j["grid"] = {{"box", r.grid.box}, {"n", r.grid.n}};
    if (r.density.size() > 0) j["local_maxima"] = count_local_maxima(r.density);
    return j;
}

void write_density_csv(const fs::path& path, const GridFunction& rho,
                       std::vector<std::string>& files) {
    const Grid& g = rho.grid();
    std::vector<std::string> cols;
    if (g.d == 1) {
        cols = {"x", "rho"};
    } else if (g.d == 2) {
        cols = {"x", "y", "rho"};
    } else {
        cols = {"x", "y", "z", "rho"};
    }
    CsvWriter csv(path, cols);
    std::vector<double> row(g.d + 1);
    for (std::size_t i = 0; i < g.m; ++i) {
        const auto mi = unflatten(g, i);
        for (int a = 0; a < g.d; ++a) row[a] = g.coord(mi[a]);
        row[g.d] = rho[i];
        csv.row(row);
    }
    files.push_back(path.filename().string());
}

// run independent points on a small pool; results land by index, so the
// outcome does not depend on the worker count
template <typename Fn>
void parallel_points(int count, int threads, Fn&& fn) {
    const int workers = std::max(1, std::min(threads, count));
    if (workers == 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::future<void>> futs;
    for (int w = 0; w < workers; ++w) {
        futs.push_back(std::async(std::launch::async, [&] {
            for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
        }));
    }
    for (auto& f : futs) f.get();
}

struct ExperimentIo {
    fs::path dir;
    std::vector<std::string> files;
    std::ostringstream summary;
};

// ---- kind implementations ------------------------------------------------

void run_solve(const ExperimentSpec& spec, ExperimentIo& io, json& results, bool& ok) {
    ScalarCache cache;
    GroundStateResult r = solve_ground_state(spec.params, spec.solver, &cache);
    ok = r.converged;
    results["state"] = json::parse(ground_state_to_json(r));
    write_density_csv(io.dir / "density.csv", r.density, io.files);
    if (spec.dump_orbitals && !r.orbitals.orbitals.empty()) {
        dump_orbitals(io.dir / "orbitals", r.orbitals);
        io.files.push_back("orbitals.bin");
        io.files.push_back("orbitals.json");
    }
    io.summary << "solve d=" << spec.params.d << " p=" << spec.params.p
               << " lambda=" << spec.params.lambda << "\n"
               << "  energy = " << format_double(r.energy) << "\n"
               << "  converged = " << (r.converged ? "yes" : "no")
               << " (iterations " << r.iterations << ")\n"
               << "  virial residual = " << format_double(r.diagnostics.virial_residual) << "\n"
               << "  local maxima of the density = " << count_local_maxima(r.density) << "\n"
               << "columns density.csv: grid coordinates per axis, then the density value\n";
}

void run_sweep(const ExperimentSpec& spec, ExperimentIo& io, json& results, bool& ok,
               bool figure4) {
    std::vector<double> lambdas;
    for (int i = 0; i < spec.lambda_points; ++i) {
        lambdas.push_back(spec.lambda_min + (spec.lambda_max - spec.lambda_min) * i /
                                                std::max(1, spec.lambda_points - 1));
    }
    ScalarCache cache;
    auto states = sweep_mass(spec.params.d, spec.params.p, lambdas, spec.solver, &cache);

    CsvWriter csv(io.dir / "j_of_lambda.csv",
                  {"lambda", "J", "J_over_lambda", "mu_last", "converged"});
    json arr = json::array();
    ok = true;
    for (const auto& st : states) {
        const double mu_last = st.mu.empty() ? 0.0 : st.mu.back();
        csv.row(std::vector<double>{st.params.lambda, st.energy, st.energy / st.params.lambda,
                                    mu_last, st.converged ? 1.0 : 0.0});
        arr.push_back(result_brief(st));
        ok = ok && st.converged;
    }
    io.files.push_back("j_of_lambda.csv");
    results["points"] = arr;

    // qualitative structure: strict decrease, concavity inside unit intervals,
    // monotonicity of J/lambda across integer masses
    bool decreasing = true;
    for (std::size_t i = 1; i < states.size(); ++i) {
        if (!(states[i].energy < states[i - 1].energy)) decreasing = false;
    }
    int concavity_violations = 0;
    double worst_second_difference = -1e300;
    for (std::size_t i = 1; i + 1 < states.size(); ++i) {
        const double a = states[i - 1].params.lambda;
        const double c = states[i + 1].params.lambda;
        // concavity applies on closed unit intervals [K-1, K]: the triple must
        // not straddle an integer kink, i.e. some integer K has K-1 <= a, c <= K
        const double kmin = std::ceil(c - 1e-9);
        const double kmax = std::floor(a + 1.0 + 1e-9);
        if (kmin > kmax) continue;
        const double d2 = states[i + 1].energy - 2.0 * states[i].energy + states[i - 1].energy;
        worst_second_difference = std::max(worst_second_difference, d2);
        if (d2 > 1e-5) ++concavity_violations;
    }
    bool j_over_lambda_monotone = true;
    for (std::size_t i = 1; i < states.size(); ++i) {
        if (states[i].energy / states[i].params.lambda >
            states[i - 1].energy / states[i - 1].params.lambda) {
            j_over_lambda_monotone = false;
        }
    }
    results["strictly_decreasing"] = decreasing;
    results["concavity_violations"] = concavity_violations;
    results["worst_second_difference"] = worst_second_difference;
    results["j_over_lambda_monotone"] = j_over_lambda_monotone;

    io.summary << (figure4 ? "figure4" : "sweep-lambda") << " d=" << spec.params.d
               << " p=" << spec.params.p << " lambda in [" << spec.lambda_min << ", "
               << spec.lambda_max << "], " << spec.lambda_points << " points\n"
               << "  J strictly decreasing: " << (decreasing ? "yes" : "no") << "\n"
               << "  concavity violations inside unit intervals: " << concavity_violations
               << "\n"
               << "  J/lambda monotone: " << (j_over_lambda_monotone ? "yes" : "no")
               << " (non-monotone across integer kinks is expected)\n"
               << "columns j_of_lambda.csv: lambda, J, J/lambda, last multiplier, converged "
                  "0/1\n";
}

void run_binding_table(const ExperimentSpec& spec, ExperimentIo& io, json& results, bool& ok) {
    ScalarCache cache;
    BindingLedger ledger(spec.params.d, spec.params.p, spec.solver.c_lt);
    std::vector<GroundStateResult> states(spec.n_max);
    std::vector<int> ns;
    for (int n = 1; n <= spec.n_max; ++n) ns.push_back(n);

    parallel_points(spec.n_max, spec.solver.threads, [&](int idx) {
        ModelParams mp{spec.params.d, spec.params.p, static_cast<double>(ns[idx])};
        SolverConfig cfg = spec.solver;
        cfg.seed = mix_seed(spec.solver.seed, idx);
        if (spec.solver.threads > 1) cfg.threads = 1;
        states[idx] = solve_ground_state(mp, cfg, &cache);
    });

    ok = true;
    json arr = json::array();
    for (int idx = 0; idx < spec.n_max; ++idx) {
        const auto& st = states[idx];
        ok = ok && st.converged;
        ledger.record(st.params.lambda, st.energy,
                      "solve seed=" + std::to_string(mix_seed(spec.solver.seed, idx)));
        arr.push_back(result_brief(st));
    }
    results["points"] = arr;

    CsvWriter csv(io.dir / "binding_table.csv",
                  {"N", "J", "min_margin", "argmin_k", "slack", "binds"});
    io.files.push_back("binding_table.csv");
    json verdicts = json::array();
    io.summary << "binding-table d=" << spec.params.d << " p=" << spec.params.p
               << " N=1.." << spec.n_max << "\n";
    for (int n = 1; n <= spec.n_max; ++n) {
        const double Jn = *ledger.lookup(n);
        if (n == 1) {
            csv.row(std::vector<double>{1.0, Jn, 0.0, 0.0, 0.0, 1.0});
            io.summary << "  N=1: J=" << format_double(Jn) << " (reference)\n";
            continue;
        }
        const auto v = binding_check(ledger, n);
        csv.row(std::vector<double>{static_cast<double>(n), Jn, v.min_margin,
                                    static_cast<double>(v.argmin_k), v.slack,
                                    v.binds ? 1.0 : 0.0});
        json vj;
        vj["n"] = n;
        vj["min_margin"] = v.min_margin;
        vj["argmin_k"] = v.argmin_k;
        vj["slack"] = v.slack;
        vj["binds"] = v.binds;
        vj["margins"] = v.margins;
        verdicts.push_back(vj);
        io.summary << "  N=" << n << ": J=" << format_double(Jn)
                   << " min margin=" << format_double(v.min_margin)
                   << " (k=" << v.argmin_k << ") binds=" << (v.binds ? "yes" : "no") << "\n";
    }
    results["verdicts"] = verdicts;
    results["binding_set"] = binding_set(ledger, spec.n_max);
    results["ledger"] = json::parse(ledger.to_json());
    write_text_file(io.dir / "ledger.json", ledger.to_json() + "\n");
    io.files.push_back("ledger.json");
    io.summary << "columns binding_table.csv: N, J(N), min over k of J(k)+J(N-k)-J(N), "
                  "argmin k, slack, binding verdict 0/1\n";
}

void run_bounds_report(const ExperimentSpec& spec, ExperimentIo& io, json& results, bool& ok) {
    const int d = spec.params.d;
    const double p = spec.params.p;
    ScalarCache cache;
    const double c_lt = spec.solver.c_lt > 0.0 ? spec.solver.c_lt : default_c_LT(d);

    json j;
    j["d"] = d;
    j["p"] = p;
    j["c_tf"] = c_TF(d);
    j["c_lt"] = c_lt;
    j["c_lt_provenance"] =
        spec.solver.c_lt > 0.0 ? std::string("user supplied") : default_c_LT_provenance(d);
    j["e_tf"] = e_TF(d, p);
    j["e_lt"] = e_LT(d, p, c_lt);
    j["rho_tf"] = rho_TF(d, p);
    const double I1 = cache.I1(d, p);
    const double mu1 = cache.mu1(d, p);
    j["I1"] = I1;
    j["mu1"] = mu1;

    PCriticalResult pc = p_critical(d, c_lt, [&](double q) { return cache.I1_interpolated(d, q); });
    j["p_critical"] = {{"value", pc.p_c},
                       {"bracket_lo", pc.bracket_lo},
                       {"bracket_hi", pc.bracket_hi},
                       {"f_lo", pc.f_lo},
                       {"f_hi", pc.f_hi},
                       {"c_lt", pc.c_lt},
                       {"evaluations", pc.evaluations}};

    json pw = json::array();
    CsvWriter csv(io.dir / "plane_wave_bound.csv",
                  {"L", "N", "per_particle", "kinetic_pp", "mollifier_pp", "interaction_pp",
                   "fermi_degeneracy", "e_tf"});
    for (double L : {50.0, 100.0, 200.0}) {
        const int N = std::max(1, static_cast<int>(std::llround(rho_TF(d, p) * std::pow(L, d))));
        const auto b = plane_wave_upper_bound(d, p, N, L);
        pw.push_back({{"L", L},
                      {"N", N},
                      {"per_particle", b.per_particle},
                      {"kinetic_pp", b.kinetic_pp},
                      {"mollifier_pp", b.mollifier_pp},
                      {"interaction_pp", b.interaction_pp},
                      {"fermi_degeneracy", b.fermi_degeneracy}});
        csv.row(std::vector<double>{L, static_cast<double>(N), b.per_particle, b.kinetic_pp,
                                    b.mollifier_pp, b.interaction_pp,
                                    static_cast<double>(b.fermi_degeneracy), e_TF(d, p)});
    }
    io.files.push_back("plane_wave_bound.csv");
    j["plane_wave"] = pw;

    results = j;
    ok = true;
    io.summary << "bounds-report d=" << d << " p=" << p << "\n"
               << "  c_TF = " << format_double(c_TF(d)) << "\n"
               << "  c_LT = " << format_double(c_lt) << "  ["
               << j["c_lt_provenance"].get<std::string>() << "]\n"
               << "  e_TF = " << format_double(e_TF(d, p))
               << "  e_LT = " << format_double(e_LT(d, p, c_lt)) << "\n"
               << "  I(d,p,1) = " << format_double(I1) << "  mu(1) = " << format_double(mu1)
               << "\n"
               << "  p_critical = " << format_double(pc.p_c) << " (bracket ["
               << format_double(pc.bracket_lo) << ", " << format_double(pc.bracket_hi) << "])\n"
               << "columns plane_wave_bound.csv: box side, particle count, per-particle energy "
                  "and its pieces, Fermi-shell degeneracy, e_TF target\n";
}

void run_dimer_curve(const ExperimentSpec& spec, ExperimentIo& io, json& results, bool& ok) {
    ScalarCache cache;
    const int d = spec.params.d;
    const double p = spec.params.p;
    const double lambda = spec.params.lambda;

    // size one shared grid off the expected decay rate, large enough for the
    // farthest separation plus margins
    const double mu1 = cache.mu1(d, p);
    const double eps = std::sqrt(std::abs(mu_lambda(d, p, mu1, lambda)));
    std::vector<double> r_list = spec.r_list;
    if (r_list.empty()) {
        for (int i = 0; i < 12; ++i) r_list.push_back((4.0 + 1.8 * i) / eps);
    }
    const double r_max = *std::max_element(r_list.begin(), r_list.end());

    SolverConfig cfg = spec.solver;
    if (!cfg.box) cfg.box = r_max + 24.0 / eps;
    if (!cfg.grid_n) {
        int n = 256;
        while (*cfg.box / n > 0.08 && n < 8192) n *= 2;
        cfg.grid_n = n;
    }
    ModelParams mp{d, p, lambda};
    GroundStateResult cluster = solve_ground_state(mp, cfg, &cache);
    ok = cluster.converged;

    InteractionCurve curve = interaction_curve(cluster, cluster, r_list, p);
    CsvWriter csv(io.dir / "interaction.csv",
                  {"R", "interaction", "fitted_rate", "theory_rate_attract", "theory_rate_orth",
                   "gram_condition"});
    for (const auto& pt : curve.points) {
        csv.row(std::vector<double>{pt.R, pt.interaction, curve.fitted_rate,
                                    curve.rate_attraction, curve.rate_orthogonalization,
                                    pt.gram_condition});
    }
    io.files.push_back("interaction.csv");

    json cj;
    cj["eps"] = curve.eps_left;
    cj["eps_prime"] = curve.eps_right;
    cj["rate_attraction"] = curve.rate_attraction;
    cj["rate_orthogonalization"] = curve.rate_orthogonalization;
    cj["fitted_rate"] = curve.fitted_rate;
    cj["fit_window"] = {curve.fit_r_lo, curve.fit_r_hi};
    cj["fit_points"] = curve.fit_points;
    json pts = json::array();
    bool attractive = true;
    for (const auto& pt : curve.points) {
        pts.push_back({{"R", pt.R},
                       {"interaction", pt.interaction},
                       {"gram_condition", pt.gram_condition},
                       {"ok", pt.ok}});
        if (pt.ok && pt.R >= curve.fit_r_lo && pt.R <= curve.fit_r_hi && pt.interaction >= 0.0) {
            attractive = false;
        }
    }
    cj["points"] = pts;
    cj["attractive_in_window"] = attractive;
    results["cluster"] = result_brief(cluster);
    results["curve"] = cj;

    io.summary << "dimer-curve d=" << d << " p=" << p << " lambda=" << lambda << "\n"
               << "  J(cluster) = " << format_double(cluster.energy) << "\n"
               << "  fitted decay rate = " << format_double(curve.fitted_rate)
               << " vs attraction marker " << format_double(curve.rate_attraction)
               << " and orthogonalization marker "
               << format_double(curve.rate_orthogonalization) << "\n"
               << "  interaction negative across the fit window: "
               << (attractive ? "yes" : "no") << "\n"
               << "columns interaction.csv: separation, interaction energy, fitted decay rate "
                  "(curve-level), the two theoretical rate markers, Gram condition number\n";
}

void run_figure1(const ExperimentSpec& spec, ExperimentIo& io, json& results, bool& ok) {
    ScalarCache cache;
    GroundStateResult r = solve_ground_state(spec.params, spec.solver, &cache);
    const int peaks = count_local_maxima(r.density);
    ok = r.converged;
    results["state"] = json::parse(ground_state_to_json(r));
    results["local_maxima"] = peaks;
    write_density_csv(io.dir / "density.csv", r.density, io.files);
    io.summary << "figure1 d=" << spec.params.d << " p=" << spec.params.p
               << " lambda=" << spec.params.lambda << "\n"
               << "  energy = " << format_double(r.energy) << "\n"
               << "  local maxima of the density = " << peaks << "\n"
               << "columns density.csv: x, rho\n";
}

void run_figure23(const ExperimentSpec& spec, ExperimentIo& io, json& results, bool& ok,
                  bool densities) {
    ScalarCache cache;
    std::vector<GroundStateResult> states(spec.n_max);
    parallel_points(spec.n_max, spec.solver.threads, [&](int idx) {
        ModelParams mp{spec.params.d, spec.params.p, static_cast<double>(idx + 1)};
        SolverConfig cfg = spec.solver;
        cfg.seed = mix_seed(spec.solver.seed, idx);
        if (spec.solver.threads > 1) cfg.threads = 1;
        states[idx] = solve_ground_state(mp, cfg, &cache);
    });

    ok = true;
    json arr = json::array();
    CsvWriter csv(io.dir / "j_over_n.csv", {"N", "J", "J_over_N", "local_maxima", "converged"});
    io.summary << (densities ? "figure2" : "figure3") << " d=" << spec.params.d
               << " p=" << spec.params.p << " N=1.." << spec.n_max << "\n";
    for (int idx = 0; idx < spec.n_max; ++idx) {
        const auto& st = states[idx];
        ok = ok && st.converged;
        const int peaks = count_local_maxima(st.density);
        csv.row(std::vector<double>{static_cast<double>(idx + 1), st.energy,
                                    st.energy / (idx + 1), static_cast<double>(peaks),
                                    st.converged ? 1.0 : 0.0});
        json b = result_brief(st);
        b["local_maxima"] = peaks;
        arr.push_back(b);
        if (densities) {
            write_density_csv(io.dir / ("density_N" + std::to_string(idx + 1) + ".csv"),
                              st.density, io.files);
        }
        io.summary << "  N=" << (idx + 1) << ": J=" << format_double(st.energy)
                   << " J/N=" << format_double(st.energy / (idx + 1)) << " peaks=" << peaks
                   << "\n";
    }
    io.files.push_back("j_over_n.csv");
    results["points"] = arr;
    bool monotone = true;
    for (int idx = 1; idx < spec.n_max; ++idx) {
        if (states[idx].energy / (idx + 1) > states[idx - 1].energy / idx + 1e-10) {
            monotone = false;
        }
    }
    results["j_over_n_nonincreasing"] = monotone;
    io.summary << "  J/N non-increasing: " << (monotone ? "yes" : "no") << "\n"
               << "columns j_over_n.csv: N, J(N), J(N)/N, density peak count, converged 0/1\n";
}

void run_gap_vs_p(const ExperimentSpec& spec, ExperimentIo& io, json& results, bool& ok) {
    ScalarCache cache;
    auto gaps = binding_gap_vs_p(spec.p_list, spec.solver, &cache);
    CsvWriter csv(io.dir / "gap_vs_p.csv", {"p", "J1", "J2", "gap", "converged"});
    json arr = json::array();
    ok = true;
    for (const auto& gp : gaps) {
        csv.row(std::vector<double>{gp.p, gp.J1, gp.J2, gp.gap, gp.converged ? 1.0 : 0.0});
        arr.push_back({{"p", gp.p},
                       {"J1", gp.J1},
                       {"J2", gp.J2},
                       {"gap", gp.gap},
                       {"converged", gp.converged}});
        ok = ok && gp.converged;
    }
    io.files.push_back("gap_vs_p.csv");
    results["points"] = arr;
    bool shrinking = true;
    for (std::size_t i = 1; i < gaps.size(); ++i) {
        if (!(std::abs(gaps[i].gap) < std::abs(gaps[i - 1].gap))) shrinking = false;
    }
    results["gap_magnitude_shrinking"] = shrinking;
    io.summary << "gap-vs-p d=1, p in {";
    for (std::size_t i = 0; i < gaps.size(); ++i) {
        io.summary << (i ? ", " : "") << gaps[i].p;
    }
    io.summary << "}\n  |gap| shrinking toward p=2: " << (shrinking ? "yes" : "no") << "\n"
               << "columns gap_vs_p.csv: p, J(1), J(2), J(2)-2J(1), converged 0/1\n";
}

}  // namespace

RunRecord run_experiment(const ExperimentSpec& spec) {
    const auto t0 = std::chrono::steady_clock::now();
    RunRecord rec;
    rec.kind = kind_name(spec.kind);
    rec.out_dir = spec.out_dir;

    ExperimentIo io;
    io.dir = spec.out_dir;
    fs::create_directories(io.dir);

    json record;
    record["schema_version"] = 1;
    record["kind"] = rec.kind;
    record["seed"] = spec.solver.seed;
    record["spec"] = spec_to_json(spec);

    json results;
    bool ok = false;
    try {
        switch (spec.kind) {
            case ExperimentKind::solve: run_solve(spec, io, results, ok); break;
            case ExperimentKind::sweep_lambda: run_sweep(spec, io, results, ok, false); break;
            case ExperimentKind::figure4: run_sweep(spec, io, results, ok, true); break;
            case ExperimentKind::binding_table: run_binding_table(spec, io, results, ok); break;
            case ExperimentKind::bounds_report: run_bounds_report(spec, io, results, ok); break;
            case ExperimentKind::dimer_curve: run_dimer_curve(spec, io, results, ok); break;
            case ExperimentKind::figure1: run_figure1(spec, io, results, ok); break;
            case ExperimentKind::figure2: run_figure23(spec, io, results, ok, true); break;
            case ExperimentKind::figure3: run_figure23(spec, io, results, ok, false); break;
            case ExperimentKind::gap_vs_p: run_gap_vs_p(spec, io, results, ok); break;
        }
        rec.success = true;
        rec.all_converged = ok;
    } catch (const std::exception& e) {
        rec.success = false;
        rec.all_converged = false;
        results["error"] = e.what();
        io.summary << "FAILED: " << e.what() << "\n";
    }
    record["results"] = results;
    record["files"] = io.files;
    record["all_converged"] = rec.all_converged;

    const auto t1 = std::chrono::steady_clock::now();
    rec.wall_seconds = std::chrono::duration<double>(t1 - t0).count();
    record["timing"] = {{"wall_seconds", rec.wall_seconds}};
    record["timestamp"] = utc_now();

    rec.summary = io.summary.str();
    rec.record_json = record.dump(2) + "\n";
    rec.files_written = io.files;
    write_text_file(io.dir / "record.json", rec.record_json);
    write_text_file(io.dir / "summary.txt", rec.summary);
    rec.files_written.push_back("record.json");
    rec.files_written.push_back("summary.txt");
    return rec;
}

RunRecord load_record(const std::string& out_dir) {
    RunRecord rec;
    rec.out_dir = out_dir;
    rec.record_json = read_text_file(fs::path(out_dir) / "record.json");
    const json j = json::parse(rec.record_json);
    rec.kind = j.at("kind").get<std::string>();
    rec.success = !j.at("results").contains("error");
    rec.all_converged = j.value("all_converged", false);
    rec.wall_seconds = j.at("timing").at("wall_seconds").get<double>();
    if (fs::exists(fs::path(out_dir) / "summary.txt")) {
        rec.summary = read_text_file(fs::path(out_dir) / "summary.txt");
    }
    for (const auto& f : j.value("files", json::array())) {
        rec.files_written.push_back(f.get<std::string>());
    }
    return rec;
}

}  // namespace fnls
