#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fnls/eigensolver.hpp"
#include "fnls/grid.hpp"
#include "fnls/scalar.hpp"

namespace fnls {

struct ModelParams {
    int d = 1;
    double p = 1.3;
    double lambda = 1.0;

    void validate() const;  // 1 < p < 1 + 2/d strictly, lambda > 0
    int orbital_count() const;  // smallest N with N >= lambda
};

/// Automatic box sizing: L = max(l_min, c_box * N^{1/d} + margin / sqrt(|mu_est|)),
/// mu_est from the last-eigenvalue lower bound with the Lieb-Thirring proxy
/// for J(lambda)/lambda.
struct BoxPolicy {
    double l_min = 16.0;
    double c_box = 3.0;
    double margin = 10.0;
    double h_target = 0.15;
    int n_max = 4096;
};

struct SolverConfig {
    std::optional<int> grid_n;
    std::optional<double> box;
    BoxPolicy box_policy;

    double el_tol = 1e-7;      // per-orbital ||H u - mu u||
    double eig_tol = 1e-8;     // eigensolver residual tolerance
    double energy_tol = 1e-12; // relative energy stagnation
    int max_iter = 8000;
    double mixing = 0.3;       // SCF linear density mixing in (0, 1]
    int n_restarts = 1;
    std::uint64_t seed = 1;
    std::string engine = "hybrid";  // flow | scf | hybrid
    int threads = 1;
    bool keep_orbitals = true;
    bool record_energy_trace = false;
    double c_lt = 0.0;  // Lieb-Thirring constant for the box rule; 0 = built-in default
};

/// N orthonormal orbitals with occupations (1, ..., 1, lambda - N + 1).
struct OrbitalSet {
    std::vector<GridFunction> orbitals;
    std::vector<double> occupations;

    std::size_t size() const { return orbitals.size(); }
    double total_mass() const;
};

/// Occupations in the canonical form: all 1 except the last = lambda - N + 1.
OrbitalSet make_orbital_set(std::vector<GridFunction> orbitals, double lambda);

/// sum_i nu_i int |grad u_i|^2 - (1/p) int rho^p; zero for an empty set.
double energy(const OrbitalSet& os, double p);

/// rho = sum_i nu_i u_i^2. Throws on an empty set (no grid to attach to).
GridFunction density(const OrbitalSet& os);

struct DiagnosticsReport {
    double virial_residual = 0.0;
    std::vector<double> el_residuals;

    bool aufbau_ok = false;
    double aufbau_margin = 0.0;   // mu_{N+1} - mu_N of the converged operator
    bool near_degenerate = false; // |mu_N - mu_{N+1}| < 1e-8

    bool mu_bounds_ok = false;
    double mu_lower_bound = 0.0;  // ((2p-d(p-1))/(2-d(p-1))) J(lambda)/lambda
    double mu_upper_bound = 0.0;  // J(1) (lambda-N+1)^{(2/d)(p-1)/(1+2/d-p)}

    bool decay_fit_available = false;
    double decay_rate_fit = 0.0;
    double decay_rate_target = 0.0;  // 2 sqrt(|mu_N|)

    double orthonormality_error = 0.0;  // max |<u_i,u_j> - delta_ij| at the end
    double max_gram_drift = 0.0;        // worst deviation seen after any re-orthonormalization
};

struct GroundStateResult {
    ModelParams params;
    Grid grid;
    double energy = 0.0;
    OrbitalSet orbitals;
    std::vector<double> mu;          // occupied multipliers, ascending
    std::optional<double> mu_next;   // (N+1)-th eigenvalue of the converged operator
    GridFunction density;
    DiagnosticsReport diagnostics;
    int iterations = 0;
    bool converged = false;
    std::vector<double> restart_energies;
    std::vector<double> energy_trace;  // filled when record_energy_trace
};

/// The grid the solver would use for these parameters.
Grid solver_grid(const ModelParams& params, const SolverConfig& config);

/// Minimize the orthonormal-system energy at mass lambda with occupations
/// (1,...,1, lambda-N+1). Energy is the minimum over config.n_restarts
/// independent initializations; diagnostics are computed on the winner.
/// `cache` supplies I(d,p,1) for the multiplier bound check (a local solve
/// fills it when null).
GroundStateResult solve_ground_state(const ModelParams& params, const SolverConfig& config,
                                     ScalarCache* cache = nullptr);

/// Recompute the diagnostics block of a state. I1_reference = I(d,p,1).
DiagnosticsReport compute_diagnostics(const GroundStateResult& state, double I1_reference);

/// Solve each mass in ascending order, warm-starting from the previous state
/// on a shared grid sized for the largest mass. Per-point failures yield
/// converged=false entries; the sweep continues.
std::vector<GroundStateResult> sweep_mass(int d, double p, const std::vector<double>& lambdas,
                                          const SolverConfig& config, ScalarCache* cache = nullptr);

/// Peak rule: strictly greater than every neighbor (full 3^d-1 stencil,
/// periodic wrap) and above rel_floor * max(rho).
int count_local_maxima(const GridFunction& rho, double rel_floor = 1e-3);

/// Density centroid via the circular mean per axis (well-defined on the torus).
std::array<double, 3> density_centroid(const GridFunction& rho);

/// Spherical average about the density centroid, radial bins of width h.
struct RadialProfile {
    std::vector<double> r;
    std::vector<double> value;
};
RadialProfile radial_average(const GridFunction& f);

}  // namespace fnls
