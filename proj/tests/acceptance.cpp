// Acceptance suite: one pass/fail line per criterion.
//
// Usage: acceptance [--criterion K]   (default: run all)

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "fnls/bounds.hpp"
#include "fnls/dimer.hpp"
#include "fnls/experiment.hpp"
#include "fnls/ledger.hpp"
#include "fnls/solver.hpp"
#include "oracles.hpp"

using namespace fnls;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

ScalarCache& cache() {
    static ScalarCache c;
    return c;
}

SolverConfig base_config(std::uint64_t seed = 101) {
    SolverConfig cfg;
    cfg.el_tol = 1e-8;
    cfg.eig_tol = 1e-9;
    cfg.max_iter = 20000;
    cfg.seed = seed;
    return cfg;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

// ---- criterion 1: scalar ground state vs the soliton oracle ---------------

Outcome criterion1() {
    std::ostringstream msg;
    bool ok = true;
    for (double p : {1.3, 1.6, 1.9}) {
        const auto sol = oracle::soliton_oracle(p);
        const auto gs = solve_scalar(1, p);
        const double rel = std::abs(gs.I1 - sol.I1) / std::abs(sol.I1);
        ok = ok && gs.converged && rel < 1e-4;
        msg << "p=" << p << ": I1=" << fmt(gs.I1) << " oracle=" << fmt(sol.I1)
            << " rel=" << fmt(rel) << "; ";
    }
    return {ok, msg.str()};
}

// ---- criterion 2: fractional-mass scaling law ------------------------------

Outcome criterion2() {
    const double I1 = oracle::soliton_oracle(1.3).I1;
    std::ostringstream msg;
    bool ok = true;
    SolverConfig cfg = base_config(7);
    for (double lambda : {0.25, 0.5, 0.75}) {
        ModelParams mp{1, 1.3, lambda};
        const auto r = solve_ground_state(mp, cfg, &cache());
        const double target = I_lambda(1, 1.3, I1, lambda);
        const double rel = std::abs(r.energy - target) / std::abs(target);
        ok = ok && r.converged && rel < 1e-4;
        msg << "lambda=" << lambda << ": J=" << fmt(r.energy) << " target=" << fmt(target)
            << " rel=" << fmt(rel) << "; ";
    }
    return {ok, msg.str()};
}

// ---- criteria 3 and 4 share a case matrix ----------------------------------

struct MatrixCase {
    ModelParams mp;
    double box;
    int n;
    int restarts;
};

const std::vector<MatrixCase>& case_matrix() {
    static const std::vector<MatrixCase> cases = {
        {{1, 1.3, 1.0}, 50.0, 1024, 1},
        {{1, 1.3, 2.0}, 60.0, 1024, 1},
        {{1, 1.3, 3.5}, 70.0, 1024, 2},
        {{1, 1.9, 2.0}, 110.0, 2048, 1},
        {{2, 1.5, 1.0}, 64.0, 256, 1},
        {{2, 1.5, 2.0}, 72.0, 256, 2},
    };
    return cases;
}

const GroundStateResult& matrix_state(std::size_t idx) {
    static std::map<std::size_t, GroundStateResult> memo;
    auto it = memo.find(idx);
    if (it == memo.end()) {
        const auto& c = case_matrix()[idx];
        SolverConfig cfg = base_config(31 + idx);
        cfg.box = c.box;
        cfg.grid_n = c.n;
        cfg.n_restarts = c.restarts;
        it = memo.emplace(idx, solve_ground_state(c.mp, cfg, &cache())).first;
    }
    return it->second;
}

Outcome criterion3() {
    std::ostringstream msg;
    bool ok = true;
    for (std::size_t i = 0; i < case_matrix().size(); ++i) {
        const auto& st = matrix_state(i);
        const auto& c = case_matrix()[i];
        const double v = st.diagnostics.virial_residual;
        ok = ok && st.converged && v < 1e-5;
        msg << "(d=" << c.mp.d << ",p=" << c.mp.p << ",l=" << c.mp.lambda
            << "): virial=" << fmt(v) << (st.converged ? "" : " NOT-CONVERGED") << "; ";
    }
    return {ok, msg.str()};
}

Outcome criterion4() {
    std::ostringstream msg;
    bool ok = true;
    for (std::size_t i = 0; i < case_matrix().size(); ++i) {
        const auto& st = matrix_state(i);
        const auto& c = case_matrix()[i];
        const bool aufbau = st.diagnostics.aufbau_ok &&
                            st.diagnostics.aufbau_margin >= -1e-8;
        const bool bounds = st.diagnostics.mu_bounds_ok;
        ok = ok && aufbau && bounds;
        msg << "(d=" << c.mp.d << ",p=" << c.mp.p << ",l=" << c.mp.lambda
            << "): aufbau=" << (aufbau ? "ok" : "VIOLATED")
            << " margin=" << fmt(st.diagnostics.aufbau_margin)
            << " mu_bounds=" << (bounds ? "ok" : "VIOLATED") << "; ";
    }
    return {ok, msg.str()};
}

// ---- criterion 5: 1d crystallization at lambda = 15 ------------------------

Outcome criterion5() {
    ModelParams mp{1, 1.3, 15.0};
    SolverConfig cfg = base_config(55);
    cfg.box = 60.0;
    cfg.grid_n = 2048;
    cfg.n_restarts = 2;
    const auto r = solve_ground_state(mp, cfg, &cache());
    const int peaks = count_local_maxima(r.density);
    std::ostringstream msg;
    msg << "J=" << fmt(r.energy) << " peaks=" << peaks << " converged=" << r.converged;
    return {r.converged && peaks == 15, msg.str()};
}

// ---- criterion 6: J(lambda) kinks ------------------------------------------

Outcome criterion6() {
    std::vector<double> lambdas;
    for (int i = 0; i < 12; ++i) lambdas.push_back(0.25 + 0.25 * i);
    SolverConfig cfg = base_config(66);
    cfg.box = 60.0;
    cfg.grid_n = 1024;
    const auto states = sweep_mass(1, 1.3, lambdas, cfg, &cache());

    bool all_conv = true;
    bool decreasing = true;
    for (std::size_t i = 0; i < states.size(); ++i) {
        all_conv = all_conv && states[i].converged;
        if (i > 0 && !(states[i].energy < states[i - 1].energy)) decreasing = false;
    }
    int concavity_violations = 0;
    for (std::size_t i = 1; i + 1 < states.size(); ++i) {
        const double a = states[i - 1].params.lambda;
        const double c = states[i + 1].params.lambda;
        const double kmin = std::ceil(c - 1e-9);
        const double kmax = std::floor(a + 1.0 + 1e-9);
        if (kmin > kmax) continue;
        const double d2 = states[i + 1].energy - 2.0 * states[i].energy + states[i - 1].energy;
        if (d2 > 1e-5) ++concavity_violations;
    }
    bool ratio_monotone = true;
    for (std::size_t i = 1; i < states.size(); ++i) {
        if (states[i].energy / states[i].params.lambda >
            states[i - 1].energy / states[i - 1].params.lambda + 1e-12) {
            ratio_monotone = false;
        }
    }
    std::ostringstream msg;
    msg << "strictly decreasing=" << (decreasing ? "yes" : "NO")
        << " concavity violations=" << concavity_violations
        << " J/lambda non-monotone observed=" << (ratio_monotone ? "no" : "yes (permitted)")
        << " all converged=" << (all_conv ? "yes" : "NO");
    return {all_conv && decreasing && concavity_violations == 0, msg.str()};
}

// ---- criterion 7: binding ledger N <= 4 ------------------------------------

Outcome criterion7() {
    SolverConfig cfg = base_config(77);
    cfg.box = 60.0;
    cfg.grid_n = 1024;
    cfg.n_restarts = 2;
    BindingLedger ledger(1, 1.3);
    bool all_conv = true;
    for (int n = 1; n <= 4; ++n) {
        ModelParams mp{1, 1.3, static_cast<double>(n)};
        SolverConfig ci = cfg;
        ci.seed = cfg.seed + n;
        const auto r = solve_ground_state(mp, ci, &cache());
        all_conv = all_conv && r.converged;
        ledger.record(n, r.energy, "acceptance");
    }
    std::ostringstream msg;
    bool ok = all_conv;
    for (int n = 2; n <= 4; ++n) {
        const auto v = binding_check(ledger, n);
        ok = ok && v.binds;
        msg << "N=" << n << ": min margin=" << fmt(v.min_margin) << " slack=" << fmt(v.slack)
            << "; ";
    }
    return {ok, msg.str()};
}

// ---- criterion 8: dimer attraction and its decay rate -----------------------

Outcome criterion8() {
    ModelParams mp{1, 1.3, 1.0};
    SolverConfig cfg = base_config(88);
    cfg.box = 100.0;
    cfg.grid_n = 2048;
    const auto cluster = solve_ground_state(mp, cfg, &cache());
    const double eps = std::sqrt(std::abs(cluster.mu.back()));
    std::vector<double> rs;
    for (int i = 0; i < 12; ++i) rs.push_back((4.0 + 1.8 * i) / eps);
    const auto curve = interaction_curve(cluster, cluster, rs, 1.3);

    bool negative = curve.fit_points >= 4;
    for (const auto& pt : curve.points) {
        if (pt.ok && pt.R >= curve.fit_r_lo && pt.R <= curve.fit_r_hi && pt.interaction >= 0.0) {
            negative = false;
        }
    }
    const double target = curve.rate_attraction;  // p*eps for equal clusters
    const double rel = std::abs(curve.fitted_rate - target) / target;
    std::ostringstream msg;
    msg << "fit window [" << fmt(curve.fit_r_lo) << ", " << fmt(curve.fit_r_hi) << "] ("
        << curve.fit_points << " pts) fitted rate=" << fmt(curve.fitted_rate)
        << " target p*eps=" << fmt(target) << " rel=" << fmt(rel)
        << " negative=" << (negative ? "yes" : "NO");
    return {cluster.converged && negative && rel < 0.2, msg.str()};
}

// ---- criterion 9: p -> 2 degeneration trend ---------------------------------

Outcome criterion9() {
    SolverConfig cfg = base_config(99);
    std::vector<GapPoint> gaps;
    for (double p : {1.3, 1.6, 1.9}) {
        SolverConfig ci = cfg;
        const double eps1 = std::sqrt(std::abs(oracle::soliton_oracle(p).mu1));
        ci.box = std::max(60.0, 34.0 / eps1);
        ci.grid_n = 2048;
        const auto g = binding_gap_vs_p({p}, ci, &cache());
        gaps.push_back(g.front());
    }
    bool ok = true;
    std::ostringstream msg;
    for (std::size_t i = 0; i < gaps.size(); ++i) {
        ok = ok && gaps[i].converged && gaps[i].gap < 0.0;
        if (i > 0) ok = ok && std::abs(gaps[i].gap) < std::abs(gaps[i - 1].gap);
        msg << "p=" << gaps[i].p << ": gap=" << fmt(gaps[i].gap) << "; ";
    }
    return {ok, msg.str()};
}

// ---- criterion 10: p_critical values ----------------------------------------

Outcome criterion10() {
    const double published[4] = {0.0, 1.629, 1.560, 1.402};
    std::ostringstream msg;
    bool ok = true;
    for (int d = 1; d <= 3; ++d) {
        const auto pc = p_critical(d, default_c_LT(d),
                                   [&](double q) { return cache().I1_interpolated(d, q); });
        const bool good = pc.p_c >= published[d] && pc.p_c < published[d] + 0.05;
        ok = ok && good;
        msg << "d=" << d << ": p_c=" << fmt(pc.p_c) << " published=" << published[d]
            << " c_lt=" << fmt(pc.c_lt) << (good ? "" : " OUT-OF-BAND") << "; ";
    }
    return {ok, msg.str()};
}

// ---- criterion 11: bound sandwich and the plane-wave limit -------------------

Outcome criterion11() {
    SolverConfig cfg = base_config(111);
    cfg.box = 50.0;
    cfg.grid_n = 1024;
    const double I1 = cache().I1(1, 1.3);
    const double elt = e_LT(1, 1.3, default_c_LT(1));
    bool ok = true;
    std::ostringstream msg;
    for (int n = 1; n <= 3; ++n) {
        ModelParams mp{1, 1.3, static_cast<double>(n)};
        SolverConfig ci = cfg;
        ci.seed = cfg.seed + n;
        const auto r = solve_ground_state(mp, ci, &cache());
        const double per = r.energy / n;
        const bool sandwich = r.converged && per >= elt - 1e-9 && per <= I1 + 1e-6;
        ok = ok && sandwich;
        msg << "N=" << n << ": J/N=" << fmt(per) << (sandwich ? "" : " OUTSIDE") << "; ";
    }
    const double target = e_TF(1, 1.3);
    const int N = static_cast<int>(std::llround(rho_TF(1, 1.3) * 200.0));
    const auto pw = plane_wave_upper_bound(1, 1.3, N, 200.0);
    const double rel = std::abs(pw.per_particle - target) / std::abs(target);
    msg << "plane-wave L=200: " << fmt(pw.per_particle) << " vs e_TF=" << fmt(target)
        << " rel=" << fmt(rel);
    ok = ok && rel < 0.05;
    return {ok, msg.str()};
}

// ---- criterion 12: 2d desk-scale trend ---------------------------------------

Outcome criterion12() {
    SolverConfig cfg = base_config(122);
    cfg.box = 72.0;
    cfg.grid_n = 256;
    cfg.n_restarts = 3;
    cfg.threads = 3;
    std::vector<GroundStateResult> states;
    bool all_conv = true;
    for (int n = 1; n <= 4; ++n) {
        ModelParams mp{2, 1.5, static_cast<double>(n)};
        SolverConfig ci = cfg;
        ci.seed = cfg.seed + 7 * n;
        states.push_back(solve_ground_state(mp, ci, &cache()));
        all_conv = all_conv && states.back().converged;
    }
    bool monotone = true;
    std::ostringstream msg;
    for (int n = 1; n <= 4; ++n) {
        const auto& st = states[n - 1];
        double spread = 0.0;
        for (double e : st.restart_energies) {
            spread = std::max(spread, std::abs(e - st.energy));
        }
        if (n > 1) {
            const double prev = states[n - 2].energy / (n - 1);
            if (st.energy / n > prev + std::max(spread, 1e-8)) monotone = false;
        }
        msg << "N=" << n << ": J/N=" << fmt(st.energy / n);
        if (n >= 2) {
            const int peaks = count_local_maxima(st.density);
            msg << " peaks=" << peaks;
            if (peaks != n) {
                monotone = monotone && false;
                msg << " (expected " << n << ")";
            }
        }
        msg << "; ";
    }
    return {all_conv && monotone, msg.str()};
}

// ---- criterion 13: core numerics property suite ------------------------------

Outcome criterion13() {
    std::ostringstream msg;
    bool ok = true;

    // Parseval, self-adjointness, translate isometry
    {
        const Grid g = Grid::make(1, 12.0, 128);
        double worst_p = 0.0, worst_sa = 0.0, worst_iso = 0.0;
        for (std::uint64_t seed = 1; seed <= 6; ++seed) {
            const GridFunction f = random_smooth_field(g, 3.0, seed);
            const GridFunction h = random_smooth_field(g, 3.0, seed + 50);
            worst_p = std::max(worst_p,
                               std::abs(spectral_norm2(f) - norm2(f)) / norm2(f));
            const double a = inner_product(f, laplacian_apply(h));
            const double b = inner_product(laplacian_apply(f), h);
            worst_sa = std::max(worst_sa, std::abs(a - b) / std::max(std::abs(a), 1e-300));
            const GridFunction t = translate(f, {0.77, 0.0, 0.0});
            worst_iso = std::max(worst_iso, std::abs(norm2(t) - norm2(f)) / norm2(f));
        }
        ok = ok && worst_p < 1e-12 && worst_sa < 1e-12 && worst_iso < 1e-12;
        msg << "parseval=" << fmt(worst_p) << " self-adjoint=" << fmt(worst_sa)
            << " isometry=" << fmt(worst_iso) << "; ";
    }

    // gradient versus central differences
    {
        const Grid g = Grid::make(1, 20.0, 128);
        const double p = 1.4;
        OrbitalSet os;
        os.orbitals = {random_smooth_field(g, 2.5, 301), random_smooth_field(g, 2.5, 302)};
        os.occupations = {1.0, 0.6};
        for (auto& u : os.orbitals) {
            const double nn = std::sqrt(norm2(u));
            for (double& v : u.values()) v /= nn;
        }
        double worst = 0.0;
        for (std::uint64_t s = 0; s < 10; ++s) {
            std::vector<GridFunction> dir{random_smooth_field(g, 2.0, 400 + s),
                                          random_smooth_field(g, 2.0, 500 + s)};
            GridFunction rho = density(os);
            double analytic = 0.0;
            for (int j = 0; j < 2; ++j) {
                analytic += 2.0 * os.occupations[j] *
                            inner_product(mean_field_apply(rho, p, os.orbitals[j]), dir[j]);
            }
            const double h = 1e-5;
            auto at = [&](double t) {
                OrbitalSet w = os;
                for (int j = 0; j < 2; ++j) {
                    for (std::size_t q = 0; q < g.m; ++q) w.orbitals[j][q] += t * dir[j][q];
                }
                return energy(w, p);
            };
            const double numeric = (at(h) - at(-h)) / (2.0 * h);
            worst = std::max(worst, std::abs(numeric - analytic) / std::abs(analytic));
        }
        ok = ok && worst < 1e-5;
        msg << "gradient-vs-fd=" << fmt(worst) << "; ";
    }

    // orthonormality bookkeeping of a converged solve
    {
        ModelParams mp{1, 1.3, 2.0};
        SolverConfig cfg = base_config(133);
        cfg.box = 50.0;
        cfg.grid_n = 512;
        const auto r = solve_ground_state(mp, cfg, &cache());
        ok = ok && r.diagnostics.orthonormality_error < 1e-10 &&
             r.diagnostics.max_gram_drift < 1e-10;
        msg << "gram error=" << fmt(r.diagnostics.orthonormality_error) << "; ";
    }

    // determinism of (spec, seed)
    {
        ExperimentSpec spec;
        spec.kind = ExperimentKind::solve;
        spec.params = ModelParams{1, 1.35, 1.5};
        spec.solver = base_config(144);
        spec.solver.grid_n = 256;
        spec.solver.box = 40.0;
        spec.out_dir = "/tmp/fnls_acceptance_det_a";
        const auto a = run_experiment(spec);
        spec.out_dir = "/tmp/fnls_acceptance_det_b";
        const auto b = run_experiment(spec);
        auto strip = [](std::string s) {
            // drop the timestamp/timing lines from the serialized record
            std::istringstream in(s);
            std::ostringstream out;
            std::string line;
            while (std::getline(in, line)) {
                if (line.find("\"timestamp\"") != std::string::npos) continue;
                if (line.find("\"wall_seconds\"") != std::string::npos) continue;
                out << line << "\n";
            }
            return out.str();
        };
        const bool same = strip(a.record_json) == strip(b.record_json);
        ok = ok && same;
        msg << "determinism=" << (same ? "exact" : "MISMATCH");
    }
    return {ok, msg.str()};
}

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    for (int i = 1; i + 1 < argc + 0; ++i) {
        if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
            only = std::atoi(argv[i + 1]);
        }
    }

    struct Entry {
        int id;
        const char* name;
        std::function<Outcome()> fn;
    };
    const std::vector<Entry> entries = {
        {1, "scalar ground state vs soliton oracle (d=1)", criterion1},
        {2, "fractional-mass scaling law", criterion2},
        {3, "virial identity across the case matrix", criterion3},
        {4, "aufbau and multiplier bounds", criterion4},
        {5, "1d crystallization: 15 peaks at lambda=15", criterion5},
        {6, "J(lambda) strictly decreasing, piecewise concave", criterion6},
        {7, "binding inequalities for N <= 4", criterion7},
        {8, "dimer attraction and decay rate", criterion8},
        {9, "gap J(2)-2J(1) shrinks toward p=2", criterion9},
        {10, "p_critical values per dimension", criterion10},
        {11, "bound sandwich and plane-wave limit", criterion11},
        {12, "2d J(N)/N trend and cluster peaks", criterion12},
        {13, "core numerics property suite", criterion13},
    };

    int failures = 0;
    for (const auto& e : entries) {
        if (only != 0 && e.id != only) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = e.fn();
        } catch (const std::exception& ex) {
            out.pass = false;
            out.detail = std::string("exception: ") + ex.what();
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%s criterion %d: %s [%.1fs] %s\n", out.pass ? "PASS" : "FAIL", e.id,
                    e.name, secs, out.detail.c_str());
        std::fflush(stdout);
        if (!out.pass) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
