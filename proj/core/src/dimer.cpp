#include "fnls/dimer.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fnls/util.hpp"

namespace fnls {

namespace {

// translate every orbital so the cluster's density centroid sits at the origin,
// then shift by `offset` along e1
std::vector<GridFunction> place_cluster(const GroundStateResult& state, double offset) {
    const auto center = density_centroid(state.density);
    std::array<double, 3> shift{offset - center[0], -center[1], -center[2]};
    std::vector<GridFunction> out;
    out.reserve(state.orbitals.orbitals.size());
    for (const auto& u : state.orbitals.orbitals) out.push_back(translate(u, shift));
    return out;
}

double cluster_decay_rate(const GroundStateResult& s) {
    return std::sqrt(std::abs(s.mu.empty() ? 1.0 : s.mu.back()));
}

}  // namespace

DimerTrial build_dimer(const GroundStateResult& left, const GroundStateResult& right, double R) {
    if (left.orbitals.orbitals.empty() || right.orbitals.orbitals.empty()) {
        throw std::invalid_argument("dimer inputs must carry orbitals");
    }
    const Grid& g = left.grid;
    if (!(g == right.grid)) throw std::invalid_argument("dimer inputs must share one grid");
    const double eps = std::min(cluster_decay_rate(left), cluster_decay_rate(right));
    if (R + 6.0 / eps > g.box) {
        throw std::invalid_argument("box too small for this separation");
    }

    std::vector<GridFunction> fields = place_cluster(left, -0.5 * R);
    {
        auto rightFields = place_cluster(right, +0.5 * R);
        for (auto& f : rightFields) fields.push_back(std::move(f));
    }
    std::vector<double> occ = left.orbitals.occupations;
    occ.insert(occ.end(), right.orbitals.occupations.begin(), right.orbitals.occupations.end());

    const int n = static_cast<int>(fields.size());
    Eigen::MatrixXd S(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            S(i, j) = S(j, i) = inner_product(fields[i], fields[j]);
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
    const double ev_min = es.eigenvalues().minCoeff();
    const double ev_max = es.eigenvalues().maxCoeff();
    if (ev_min < 1e-12) {
        throw std::runtime_error("dimer Gram matrix numerically singular: clusters too close");
    }
    const Eigen::MatrixXd W = es.operatorInverseSqrt();

    DimerTrial out;
    out.separation = R;
    out.gram_condition = ev_max / ev_min;
    std::vector<GridFunction> ortho(n, GridFunction(g));
    for (int i = 0; i < n; ++i) {
        double* o = ortho[i].data();
        for (int j = 0; j < n; ++j) {
            const double w = W(j, i);
            const double* v = fields[j].data();
            for (std::size_t q = 0; q < g.m; ++q) o[q] += w * v[q];
        }
    }
    out.frame.orbitals = std::move(ortho);
    out.frame.occupations = std::move(occ);
    out.energy = energy(out.frame, left.params.p);
    out.interaction = out.energy - left.energy - right.energy;
    return out;
}

InteractionCurve interaction_curve(const GroundStateResult& left, const GroundStateResult& right,
                                   const std::vector<double>& R_list, double p) {
    InteractionCurve out;
    double el = cluster_decay_rate(left);
    double er = cluster_decay_rate(right);
    if (er > el) std::swap(el, er);
    out.eps_left = el;
    out.eps_right = er;
    out.rate_attraction = 2.0 * p * el * er / (el + er);
    out.rate_orthogonalization = 2.0 * er;
    out.noise_floor = 1e-12 * std::abs(left.energy);

    for (double R : R_list) {
        InteractionPoint pt;
        pt.R = R;
        try {
            DimerTrial t = build_dimer(left, right, R);
            pt.interaction = t.interaction;
            pt.gram_condition = t.gram_condition;
            pt.ok = true;
        } catch (const std::exception&) {
            pt.ok = false;
        }
        out.points.push_back(pt);
    }

    // fit |interaction| decay inside the trusted window
    std::vector<double> xs, ys;
    const double hi_cut = 1e-2 * std::abs(left.energy);
    const double lo_cut = 1e3 * out.noise_floor;
    for (const auto& pt : out.points) {
        const double a = std::abs(pt.interaction);
        if (pt.ok && a > lo_cut && a < hi_cut) {
            xs.push_back(pt.R);
            ys.push_back(std::log(a));
        }
    }
    if (xs.size() >= 3) {
        LineFit fit = fit_line(xs, ys);
        out.fitted_rate = -fit.slope;
        out.fit_r_lo = xs.front();
        out.fit_r_hi = xs.back();
        out.fit_points = fit.points;
    }
    return out;
}

std::vector<GapPoint> binding_gap_vs_p(const std::vector<double>& p_list,
                                       const SolverConfig& config, ScalarCache* cache) {
    std::vector<GapPoint> out;
    for (double p : p_list) {
        GapPoint gp;
        gp.p = p;
        try {
            ModelParams one{1, p, 1.0};
            ModelParams two{1, p, 2.0};
            SolverConfig c2 = config;
            // same grid for both masses so the discretization bias cancels in the gap
            const Grid g = solver_grid(two, config);
            c2.box = g.box;
            c2.grid_n = g.n;
            GroundStateResult r1 = solve_ground_state(one, c2, cache);
            GroundStateResult r2 = solve_ground_state(two, c2, cache);
            gp.J1 = r1.energy;
            gp.J2 = r2.energy;
            gp.gap = r2.energy - 2.0 * r1.energy;
            gp.converged = r1.converged && r2.converged;
        } catch (const std::exception&) {
            gp.converged = false;
        }
        out.push_back(gp);
    }
    return out;
}

}  // namespace fnls
