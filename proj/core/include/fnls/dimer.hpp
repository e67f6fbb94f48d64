#pragma once

#include <vector>

#include "fnls/solver.hpp"

namespace fnls {

/// Two converged clusters, Gram-orthonormalized at separation R along e1.
struct DimerTrial {
    double separation = 0.0;
    OrbitalSet frame;           // orthonormalized union of the translated clusters
    double gram_condition = 0.0;
    double energy = 0.0;        // energy of the trial state
    double interaction = 0.0;   // energy - J(left) - J(right)
};

/// Builds the trial state: centers both clusters, translates them +-R/2 along
/// e1 on the shared grid, orthonormalizes via the inverse square root of the
/// Gram matrix, and evaluates the orthonormal-system energy. Both inputs must
/// live on the same grid; R must leave decay margins inside the box.
/// Throws when the Gram matrix is numerically singular (clusters too close)
/// or the box is too small.
DimerTrial build_dimer(const GroundStateResult& left, const GroundStateResult& right, double R);

struct InteractionPoint {
    double R = 0.0;
    double interaction = 0.0;
    double gram_condition = 0.0;
    bool ok = false;
};

struct InteractionCurve {
    std::vector<InteractionPoint> points;
    double eps_left = 0.0;         // sqrt(|mu_N|) of the left cluster
    double eps_right = 0.0;        // sqrt(|mu_M|), labeled so eps_right <= eps_left
    double rate_attraction = 0.0;  // 2 p eps eps' / (eps + eps')
    double rate_orthogonalization = 0.0;  // 2 eps'
    double fitted_rate = 0.0;      // decay of |interaction| over the fit window
    double fit_r_lo = 0.0, fit_r_hi = 0.0;
    int fit_points = 0;
    double noise_floor = 0.0;
};

/// Interaction energy over an ascending list of separations plus the decay
/// fit against the theoretical rate markers. The fit window keeps
/// |interaction| between 1e3 * noise and 1e-2 |J(left)|.
InteractionCurve interaction_curve(const GroundStateResult& left,
                                   const GroundStateResult& right,
                                   const std::vector<double>& R_list, double p);

struct GapPoint {
    double p = 0.0;
    double J1 = 0.0;
    double J2 = 0.0;
    double gap = 0.0;  // J(2) - 2 J(1)
    bool converged = false;
};

/// d=1 probe of the p -> 2 degeneration: the gap J(2) - 2J(1) per exponent.
std::vector<GapPoint> binding_gap_vs_p(const std::vector<double>& p_list,
                                       const SolverConfig& config, ScalarCache* cache = nullptr);

}  // namespace fnls
