#pragma once

#include <map>
#include <mutex>
#include <optional>

#include "fnls/grid.hpp"

namespace fnls {

/// Exponent of lambda in I(lambda) = I(1) * lambda^{1 + (2/d)(p-1)/(1+2/d-p)}.
double mass_energy_exponent(int d, double p);

/// Exponent of lambda in mu(lambda) = mu(1) * lambda^{(2/d)(p-1)/(1+2/d-p)}.
double mass_mu_exponent(int d, double p);

/// I(1) * lambda^{...}; throws when the scaling denominator 1 + 2/d - p <= 0.
double I_lambda(int d, double p, double I1, double lambda);

/// mu(1) * lambda^{...}; same admissibility as I_lambda.
double mu_lambda(int d, double p, double mu1, double lambda);

/// Throws unless 1 < p < 1 + 2/d strictly.
void require_subcritical(int d, double p);

/// Grid selection for a single solve. With n/box unset, the box is sized from
/// the decay rate sqrt(|mu|) of the state (margin decay lengths of padding)
/// and n chosen as the next power of two reaching h_target.
struct GridPolicy {
    std::optional<int> n;
    std::optional<double> box;
    double h_target = 0.12;
    double margin = 10.0;   // box padding in units of 1/sqrt(|mu|)
    int n_max = 2048;       // cap per axis (1d); divided for d=2,3 internally
};

struct ScalarSolveOptions {
    double el_tol = 1e-9;      // ||H Q - mu Q|| / sqrt(mass)
    double energy_tol = 1e-13; // relative energy stagnation
    int max_iter = 40000;
    double tau = 1.5;          // semi-implicit step
};

/// Ground state of the single-function problem at unit mass.
struct ScalarGroundState {
    int d = 0;
    double p = 0.0;
    double I1 = 0.0;          // minimal energy at mass 1
    double mu1 = 0.0;         // multiplier at mass 1
    GridFunction profile;     // positive, unit L2 norm, on its own grid
    double decay_rate = 0.0;  // sqrt(|mu1|)
    double el_residual = 0.0;
    int iterations = 0;
    bool converged = false;
    double work_mass = 1.0;   // the solve ran at this mass and was rescaled exactly
};

/// Minimize int|grad u|^2 - (1/p) int u^{2p} over ||u||^2 = 1 by normalized
/// gradient flow (semi-implicit imaginary time). Internally the solve runs at
/// a work mass chosen so the multiplier is O(1) and is mapped back to mass 1
/// by the exact scaling of the soliton family, which keeps the grid small for
/// every admissible (d, p).
ScalarGroundState solve_scalar(int d, double p, const GridPolicy& gp = {},
                               const ScalarSolveOptions& opts = {});

/// Memoized I(d,p,1) / mu(d,p,1) with monotone-cubic interpolation over a
/// fixed p-lattice (spacing 0.025). Thread-safe.
class ScalarCache {
public:
    double I1(int d, double p);
    double mu1(int d, double p);

    /// Interpolated I(d,p,1) suitable for root finding in p.
    double I1_interpolated(int d, double p);

private:
    struct Entry {
        double I1, mu1;
    };
    Entry solve_at(int d, double p);
    std::map<std::pair<int, long long>, Entry> table_;
    std::mutex mutex_;
};

}  // namespace fnls
