#pragma once

// Test-side oracles, independent of the library's solve paths: adaptive
// quadrature on the line, the closed-form 1d soliton family, and a dense
// finite-difference eigensolver.

#include <functional>
#include <vector>

#include "fnls/grid.hpp"

namespace oracle {

/// Adaptive quadrature of f over the whole line (boost sinh_sinh).
double integrate_line(const std::function<double(double)>& f);

/// Closed-form 1d soliton data: the mu = -1 profile
/// Q0(x) = (p)^{1/(2p-2)} sech^{1/(p-1)}((p-1) x), its quadrature mass and
/// energy, and the mass-1 values I(1,p,1), mu(1,p,1) recovered through the
/// exact scaling of the family.
struct Soliton1D {
    double p = 0.0;
    double mass0 = 0.0;    // mass of the mu=-1 profile
    double energy0 = 0.0;  // energy of the mu=-1 profile
    double I1 = 0.0;
    double mu1 = 0.0;
};
Soliton1D soliton_oracle(double p);

/// Mass-1 soliton profile value at x (exact rescaling of the mu=-1 profile).
double soliton_profile_mass1(double p, double x);

/// All eigenvalues of -u'' + V u on the periodic grid, dense 4th-order
/// finite differences; returns the k smallest, ascending.
std::vector<double> fd_eigenvalues_1d(const fnls::Grid& g, const std::vector<double>& V, int k);

}  // namespace oracle
