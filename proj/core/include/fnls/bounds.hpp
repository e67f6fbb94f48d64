#pragma once

#include <functional>
#include <string>

namespace fnls {

/// Thomas-Fermi kinetic constant 4 pi^2 d/(d+2) (d/|S^{d-1}|)^{2/d}.
double c_TF(int d);

/// Shipped Lieb-Thirring constant defaults (see data/lt_constants.json and
/// default_c_LT_provenance); inputs, not derived quantities.
double default_c_LT(int d);
std::string default_c_LT_provenance(int d);

/// -(1+2/d-p) (d/2p) (d(p-1)/(2p C))^{(p-1)/(1+2/d-p)} with C = c_TF.
double e_TF(int d, double p);

/// Same expression with a caller-chosen constant; for C = c_LT it lower-bounds
/// J(N)/N.
double e_LT(int d, double p, double c_lt);

/// min over {rho >= 0, int rho = N} of int(C rho^{1+2/d} - rho^p/p); equals
/// N times the per-particle value; linear in N.
double lt_min_value(double C, int d, double p, double N);

/// Level of the bang-bang Thomas-Fermi minimizer.
double rho_TF(int d, double p);

/// Best constant of the rescaled kinetic inequality given J(N).
double rescaled_constant(int d, double p, double N, double J_N);

/// Parameters bundle for bounds reports.
struct BoundsContext {
    int d = 1;
    double p = 1.3;
    double c_lt = 0.0;
    double c_tf = 0.0;
    double I1 = 0.0;
};
/// Validates 0 < c_lt (and c_lt <= c_TF for d >= 3).
BoundsContext make_bounds_context(int d, double p, double c_lt, double I1);

struct PCriticalResult {
    double p_c = 0.0;
    double bracket_lo = 0.0, bracket_hi = 0.0;  // bracketing evidence
    double f_lo = 0.0, f_hi = 0.0;
    double c_lt = 0.0;
    int evaluations = 0;
};

/// First zero in (1, min(2, 1+2/d)) of
///   p -> 1 + sqrt(|I(d,p,1)| / |e_LT(d,p)|) sqrt((2-d(p-1))/(2p-d(p-1))) - p
/// located by coarse scan plus bisection to `tol`. I1_of_p supplies I(d,p,1).
/// Throws std::domain_error when no sign change exists in the scan range.
PCriticalResult p_critical(int d, double c_lt, const std::function<double(double)>& I1_of_p,
                           double tol = 1e-4);

struct PlaneWaveBound {
    double per_particle = 0.0;
    double kinetic_pp = 0.0;      // filled-shell sum / N
    double mollifier_pp = 0.0;    // gradient of the mollified-indicator square root
    double interaction_pp = 0.0;
    int fermi_degeneracy = 0;     // lattice points tied at the boundary shell
    int n_particles = 0;
    double box = 0.0;
};

/// Energy per particle of the mollified plane-wave trial state: N lowest
/// |k|-shells of (2pi/L)Z^d over the cube of side L, gaussian mollifier of
/// unit width. All integrals are evaluated numerically on a 1d grid (the
/// mollified indicator factorizes). Upper bound for e(d,p); tends to e_TF
/// at the Thomas-Fermi density as L grows.
PlaneWaveBound plane_wave_upper_bound(int d, double p, int N, double L);

}  // namespace fnls
