#include "fnls/solver.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <future>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "fft_cache.hpp"
#include "fnls/bounds.hpp"
#include "fnls/util.hpp"

namespace fnls {

using Eigen::MatrixXd;

void ModelParams::validate() const {
    require_subcritical(d, p);
    if (!(lambda > 0.0)) throw std::invalid_argument("mass lambda must be positive");
}

int ModelParams::orbital_count() const {
    return static_cast<int>(std::ceil(lambda - 1e-12));
}

double OrbitalSet::total_mass() const {
    double s = 0.0;
    for (double nu : occupations) s += nu;
    return s;
}

OrbitalSet make_orbital_set(std::vector<GridFunction> orbitals, double lambda) {
    const int n = static_cast<int>(orbitals.size());
    if (n == 0 && lambda > 0.0) throw std::invalid_argument("orbital set empty but mass positive");
    OrbitalSet os;
    os.orbitals = std::move(orbitals);
    os.occupations.assign(n, 1.0);
    if (n > 0) {
        const double last = lambda - (n - 1);
        if (last <= 0.0 || last > 1.0 + 1e-12) {
            throw std::invalid_argument("mass incompatible with orbital count");
        }
        os.occupations.back() = std::min(last, 1.0);
    }
    return os;
}

GridFunction density(const OrbitalSet& os) {
    if (os.orbitals.empty()) throw std::invalid_argument("density of an empty orbital set");
    GridFunction rho(os.orbitals.front().grid());
    for (std::size_t j = 0; j < os.orbitals.size(); ++j) {
        const auto& u = os.orbitals[j];
        if (!(u.grid() == rho.grid())) throw std::invalid_argument("orbitals on mismatched grids");
        const double nu = os.occupations[j];
        for (std::size_t i = 0; i < rho.size(); ++i) rho[i] += nu * u[i] * u[i];
    }
    return rho;
}

double energy(const OrbitalSet& os, double p) {
    if (os.orbitals.empty()) return 0.0;
    double e = 0.0;
    for (std::size_t j = 0; j < os.orbitals.size(); ++j) {
        e += os.occupations[j] * kinetic_energy(os.orbitals[j]);
    }
    const GridFunction rho = density(os);
    double pot = 0.0;
    for (double r : rho.values()) pot += std::pow(std::max(r, 0.0), p);
    pot *= std::pow(rho.grid().h, rho.grid().d);
    return e - pot / p;
}

// ---------------------------------------------------------------------------
// internal engine
// ---------------------------------------------------------------------------

namespace {

struct Frame {
    std::vector<GridFunction> u;
    std::vector<double> occ;
    int size() const { return static_cast<int>(u.size()); }
};

std::vector<double> frame_density(const Frame& f) {
    const Grid& g = f.u.front().grid();
    std::vector<double> rho(g.m, 0.0);
    for (int j = 0; j < f.size(); ++j) {
        const double nu = f.occ[j];
        const double* v = f.u[j].data();
        for (std::size_t i = 0; i < g.m; ++i) rho[i] += nu * v[i] * v[i];
    }
    return rho;
}

double potential_term(const Grid& g, const std::vector<double>& rho, double p) {
    double pot = 0.0;
    for (double r : rho) pot += std::pow(std::max(r, 0.0), p);
    return pot * std::pow(g.h, g.d) / p;
}

// -Lap u_j plus the kinetic energy of each orbital, one transform pair per orbital
void apply_laplacian_block(const Grid& g, const std::vector<GridFunction>& u,
                           std::vector<GridFunction>& lap, std::vector<double>& kin) {
    auto& ws = detail::workspace_for(g);
    const std::size_t m = g.m;
    lap.assign(u.size(), GridFunction(g));
    kin.assign(u.size(), 0.0);
    const double hd = std::pow(g.h, g.d);
    for (std::size_t j = 0; j < u.size(); ++j) {
        std::memcpy(ws.real_buf(), u[j].data(), m * sizeof(double));
        ws.forward();
        auto* c = ws.cplx_buf();
        double s = 0.0;
        for (std::size_t i = 0; i < ws.spectral_size(); ++i) {
            s += ws.parseval_weight(i) * ws.k2(i) * std::norm(c[i]);
            c[i] *= ws.k2(i);
        }
        kin[j] = s * hd / static_cast<double>(m);
        ws.inverse();
        const double scale = 1.0 / static_cast<double>(m);
        double* out = lap[j].data();
        for (std::size_t i = 0; i < m; ++i) out[i] = ws.real_buf()[i] * scale;
    }
}

// Loewdin-orthonormalize in place. Throws when the frame is numerically dependent.
void loewdin(Frame& f) {
    const int n = f.size();
    const Grid& g = f.u.front().grid();
    MatrixXd G(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            G(i, j) = G(j, i) = inner_product(f.u[i], f.u[j]);
        }
    }
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(G);
    if (es.eigenvalues().minCoeff() < 1e-12) {
        throw std::runtime_error("orthonormalization failed: frame numerically dependent");
    }
    MatrixXd W = es.operatorInverseSqrt();
    std::vector<GridFunction> next(n, GridFunction(g));
    for (int i = 0; i < n; ++i) {
        double* out = next[i].data();
        for (int j = 0; j < n; ++j) {
            const double w = W(j, i);
            const double* v = f.u[j].data();
            for (std::size_t q = 0; q < g.m; ++q) out[q] += w * v[q];
        }
    }
    f.u = std::move(next);
}

double gram_deviation(const Frame& f) {
    const int n = f.size();
    double dev = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            const double gij = inner_product(f.u[i], f.u[j]);
            dev = std::max(dev, std::abs(gij - (i == j ? 1.0 : 0.0)));
        }
    }
    return dev;
}

std::vector<GridFunction> rotate_block(const std::vector<GridFunction>& v, const MatrixXd& W) {
    const int n = static_cast<int>(v.size());
    const Grid& g = v.front().grid();
    std::vector<GridFunction> out(n, GridFunction(g));
    for (int i = 0; i < n; ++i) {
        double* o = out[i].data();
        for (int j = 0; j < n; ++j) {
            const double w = W(j, i);
            const double* src = v[j].data();
            for (std::size_t q = 0; q < g.m; ++q) o[q] += w * src[q];
        }
    }
    return out;
}

struct EngineState {
    Frame frame;
    std::vector<double> mu;
    double energy = 0.0;
    double residual = std::numeric_limits<double>::infinity();
    int iterations = 0;
    bool converged = false;
    double max_drift = 0.0;
    std::vector<double> trace;
};

// energy via forward transforms only
double frame_energy_fast(const Frame& f, double p) {
    const Grid& g = f.u.front().grid();
    auto& ws = detail::workspace_for(g);
    const double hd = std::pow(g.h, g.d);
    double e = -potential_term(g, frame_density(f), p);
    for (int j = 0; j < f.size(); ++j) {
        std::memcpy(ws.real_buf(), f.u[j].data(), g.m * sizeof(double));
        ws.forward();
        const auto* c = ws.cplx_buf();
        double s = 0.0;
        for (std::size_t i = 0; i < ws.spectral_size(); ++i) {
            s += ws.parseval_weight(i) * ws.k2(i) * std::norm(c[i]);
        }
        e += f.occ[j] * s * hd / static_cast<double>(g.m);
    }
    return e;
}

// Projected preconditioned gradient flow with Loewdin retraction and energy
// backtracking. Each iteration first realigns the frame with the mean-field
// operator (diagonalize <u_i, H u_j>) and refills occupations bottom-up; the
// energy is concave in the density matrix, so the realignment never raises it.
void run_flow(EngineState& st, double p, const SolverConfig& cfg, double el_target,
              int iter_budget, bool record_trace) {
    Frame& f = st.frame;
    const Grid& g = f.u.front().grid();
    const int n = f.size();
    const double hd = std::pow(g.h, g.d);

    double tau = 0.8;
    int stagnant = 0;

    std::vector<GridFunction> lap, hu(n, GridFunction(g));
    std::vector<double> kin;
    for (int it = 0; it < iter_budget; ++it) {
        ++st.iterations;
        std::vector<double> rho = frame_density(f);
        apply_laplacian_block(g, f.u, lap, kin);
        std::vector<double> vpot(g.m);
        for (std::size_t q = 0; q < g.m; ++q) vpot[q] = -std::pow(std::max(rho[q], 0.0), p - 1.0);
        for (int j = 0; j < n; ++j) {
            const double* uj = f.u[j].data();
            const double* lj = lap[j].data();
            double* out = hu[j].data();
            for (std::size_t q = 0; q < g.m; ++q) out[q] = lj[q] + vpot[q] * uj[q];
        }

        MatrixXd A(n, n), K(n, n);
        for (int i = 0; i < n; ++i) {
            for (int j = i; j < n; ++j) {
                A(i, j) = A(j, i) =
                    0.5 * (inner_product(f.u[i], hu[j]) + inner_product(f.u[j], hu[i]));
                K(i, j) = K(j, i) =
                    0.5 * (inner_product(f.u[i], lap[j]) + inner_product(f.u[j], lap[i]));
            }
        }
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(A);
        const MatrixXd& W = es.eigenvectors();
        f.u = rotate_block(f.u, W);
        hu = rotate_block(hu, W);
        lap = rotate_block(lap, W);
        st.mu.assign(es.eigenvalues().data(), es.eigenvalues().data() + n);
        const MatrixXd Krot = W.transpose() * K * W;

        rho = frame_density(f);  // occupations are tied to the sorted multipliers
        double e_cur = -potential_term(g, rho, p);
        for (int j = 0; j < n; ++j) e_cur += f.occ[j] * Krot(j, j);
        if (record_trace) st.trace.push_back(e_cur);

        for (std::size_t q = 0; q < g.m; ++q) vpot[q] = -std::pow(std::max(rho[q], 0.0), p - 1.0);
        std::vector<GridFunction> r(n, GridFunction(g));
        double res = 0.0;
        for (int j = 0; j < n; ++j) {
            const double* uj = f.u[j].data();
            const double* lj = lap[j].data();
            double* out = r[j].data();
            double r2 = 0.0;
            for (std::size_t q = 0; q < g.m; ++q) {
                out[q] = lj[q] + vpot[q] * uj[q] - st.mu[j] * uj[q];
                r2 += out[q] * out[q];
            }
            res = std::max(res, std::sqrt(r2 * hd));
        }
        st.residual = res;
        st.energy = e_cur;
        if (res < el_target) {
            st.converged = true;
            break;
        }

        Frame trial;
        trial.occ = f.occ;
        bool accepted = false;
        while (tau >= 1e-9) {
            trial.u.clear();
            trial.u.reserve(n);
            for (int j = 0; j < n; ++j) {
                const double sigma = std::max(0.05, std::abs(st.mu[j]));
                GridFunction dir = helmholtz_inverse(r[j], sigma);
                GridFunction uj = f.u[j];
                const double step = tau * f.occ[j];
                for (std::size_t q = 0; q < g.m; ++q) uj[q] -= step * dir[q];
                trial.u.push_back(std::move(uj));
            }
            try {
                loewdin(trial);
            } catch (const std::runtime_error&) {
                tau *= 0.5;
                continue;
            }
            const double e_trial = frame_energy_fast(trial, p);
            if (e_trial <= e_cur + 1e-12) {
                st.max_drift = std::max(st.max_drift, gram_deviation(trial));
                f.u = std::move(trial.u);
                const bool flat =
                    std::abs(e_trial - e_cur) < cfg.energy_tol * std::max(1.0, std::abs(e_trial));
                stagnant = flat ? stagnant + 1 : 0;
                st.energy = e_trial;
                tau = std::min(tau * 1.15, 2.5);
                accepted = true;
                break;
            }
            tau *= 0.5;
        }
        if (!accepted) break;      // flow stalled at the backtracking floor
        if (stagnant > 60) break;  // energy flat but residual not reaching target
    }
}

void run_scf(EngineState& st, double p, const SolverConfig& cfg, int iter_budget,
             bool record_trace) {
    Frame& f = st.frame;
    const Grid& g = f.u.front().grid();
    const int n = f.size();
    const double hd = std::pow(g.h, g.d);

    GridFunction rho_mix(g);
    {
        auto rho = frame_density(f);
        std::copy(rho.begin(), rho.end(), rho_mix.values().begin());
    }

    for (int it = 0; it < iter_budget; ++it) {
        ++st.iterations;
        EigOptions eo;
        eo.tol = std::max(cfg.eig_tol, 0.02 * cfg.el_tol);
        eo.max_iter = 250;
        eo.seed = mix_seed(cfg.seed, 77 + static_cast<std::uint64_t>(it));
        EigResult eig = lowest_eigenpairs(rho_mix, p, n + 1, eo, &f.u);
        if (static_cast<int>(eig.pairs.size()) < n) break;

        Frame cand;
        cand.occ = f.occ;
        for (int j = 0; j < n; ++j) cand.u.push_back(eig.pairs[j].vec);
        loewdin(cand);  // eigensolver output is orthonormal to its tol; tighten it
        st.max_drift = std::max(st.max_drift, gram_deviation(cand));

        auto rho_new = frame_density(cand);
        std::vector<double> vpot(g.m);
        for (std::size_t q = 0; q < g.m; ++q) {
            vpot[q] = -std::pow(std::max(rho_new[q], 0.0), p - 1.0);
        }
        std::vector<GridFunction> lap;
        std::vector<double> kin;
        apply_laplacian_block(g, cand.u, lap, kin);
        std::vector<double> mu(n);
        double res = 0.0;
        double e_new = -potential_term(g, rho_new, p);
        for (int j = 0; j < n; ++j) {
            e_new += cand.occ[j] * kin[j];
            double dot = 0.0;
            double r2 = 0.0;
            const double* uj = cand.u[j].data();
            for (std::size_t q = 0; q < g.m; ++q) {
                dot += uj[q] * (lap[j][q] + vpot[q] * uj[q]);
            }
            mu[j] = dot * hd;
            for (std::size_t q = 0; q < g.m; ++q) {
                const double rr = lap[j][q] + vpot[q] * uj[q] - mu[j] * uj[q];
                r2 += rr * rr;
            }
            res = std::max(res, std::sqrt(r2 * hd));
        }
        if (record_trace) st.trace.push_back(e_new);

        f = std::move(cand);
        st.mu = mu;
        st.energy = e_new;
        st.residual = res;
        if (res < cfg.el_tol) {
            st.converged = true;
            break;
        }

        const double theta = std::clamp(cfg.mixing, 0.05, 1.0);
        for (std::size_t q = 0; q < g.m; ++q) {
            rho_mix[q] = (1.0 - theta) * rho_mix[q] + theta * rho_new[q];
        }
    }
}

EngineState run_engine(const ModelParams& params, const SolverConfig& cfg, Frame init,
                       bool record_trace) {
    EngineState st;
    st.frame = std::move(init);
    if (cfg.engine == "flow") {
        run_flow(st, params.p, cfg, cfg.el_tol, cfg.max_iter, record_trace);
    } else if (cfg.engine == "scf") {
        run_scf(st, params.p, cfg, std::min(cfg.max_iter, 300), record_trace);
    } else if (cfg.engine == "hybrid") {
        const double coarse = std::max(cfg.el_tol * 30.0, 1e-5);
        run_flow(st, params.p, cfg, coarse, cfg.max_iter, record_trace);
        st.converged = false;
        run_scf(st, params.p, cfg, std::min(cfg.max_iter, 250), record_trace);
        if (!st.converged) {
            run_flow(st, params.p, cfg, cfg.el_tol, cfg.max_iter / 2, record_trace);
        }
    } else {
        throw std::invalid_argument("unknown engine '" + cfg.engine + "'");
    }
    return st;
}

std::vector<GridFunction> hermite_ladder(const Grid& g, int count, double width) {
    // products of Hermite polynomials times a centered gaussian, enumerated by
    // total degree; analytically orthogonal, so the starting Gram is well conditioned
    std::vector<std::array<int, 3>> degrees;
    for (int total = 0; static_cast<int>(degrees.size()) < count; ++total) {
        if (g.d == 1) {
            degrees.push_back({total, 0, 0});
        } else if (g.d == 2) {
            for (int a = total; a >= 0 && static_cast<int>(degrees.size()) < count; --a) {
                degrees.push_back({a, total - a, 0});
            }
        } else {
            for (int a = total; a >= 0 && static_cast<int>(degrees.size()) < count; --a) {
                for (int b = total - a; b >= 0 && static_cast<int>(degrees.size()) < count; --b) {
                    degrees.push_back({a, b, total - a - b});
                }
            }
        }
    }

    auto hermite = [](int k, double x) {
        double h0 = 1.0, h1 = 2.0 * x;
        if (k == 0) return h0;
        if (k == 1) return h1;
        for (int i = 2; i <= k; ++i) {
            const double h2 = 2.0 * x * h1 - 2.0 * (i - 1) * h0;
            h0 = h1;
            h1 = h2;
        }
        return h1;
    };

    std::vector<GridFunction> out;
    out.reserve(count);
    for (const auto& deg : degrees) {
        GridFunction f = sample(g, [&](const std::array<double, 3>& x) {
            double v = 1.0;
            double r2 = 0.0;
            for (int a = 0; a < g.d; ++a) {
                v *= hermite(deg[static_cast<std::size_t>(a)], x[a] / width);
                r2 += x[a] * x[a];
            }
            return v * std::exp(-0.5 * r2 / (width * width));
        });
        const double nn = std::sqrt(norm2(f));
        for (double& v : f.values()) v /= nn;
        out.push_back(std::move(f));
    }
    return out;
}

Frame initial_frame(const Grid& g, const ModelParams& params, int restart, std::uint64_t seed) {
    const int n = params.orbital_count();
    std::vector<GridFunction> fields;
    if (restart == 0) {
        const double width = std::max(1.5, 0.6 * std::pow(n, 1.0 / params.d));
        fields = hermite_ladder(g, n, std::min(width, g.box / 8.0));
    } else {
        // random restarts impose no symmetry; essential for crystallized minima
        fields.reserve(n);
        for (int j = 0; j < n; ++j) {
            GridFunction r = random_smooth_field(
                g, 2.5, mix_seed(seed, static_cast<std::uint64_t>(restart) * 1000 + j));
            GridFunction env = sample(g, [&](const std::array<double, 3>& x) {
                double r2 = 0.0;
                for (int a = 0; a < params.d; ++a) r2 += x[a] * x[a];
                const double w = 0.25 * g.box;
                return std::exp(-0.5 * r2 / (w * w));
            });
            for (std::size_t q = 0; q < g.m; ++q) r[q] *= env[q];
            const double nn = std::sqrt(norm2(r));
            for (double& v : r.values()) v /= nn;
            fields.push_back(std::move(r));
        }
    }
    Frame f;
    f.u = std::move(fields);
    f.occ.assign(n, 1.0);
    f.occ.back() = params.lambda - (n - 1);
    loewdin(f);
    return f;
}

Frame warm_frame(const Grid& g, const ModelParams& params, const OrbitalSet& prev,
                 std::uint64_t seed) {
    const int n = params.orbital_count();
    std::vector<GridFunction> fields;
    for (const auto& u : prev.orbitals) {
        if (static_cast<int>(fields.size()) >= n) break;
        if (!(u.grid() == g)) throw std::invalid_argument("warm start requires matching grids");
        fields.push_back(u);
    }
    int extra = 0;
    while (static_cast<int>(fields.size()) < n) {
        GridFunction r = random_smooth_field(g, 2.5, mix_seed(seed, 555 + extra++));
        const double nn = std::sqrt(norm2(r));
        for (double& v : r.values()) v /= nn;
        fields.push_back(std::move(r));
    }
    Frame f;
    f.u = std::move(fields);
    f.occ.assign(n, 1.0);
    f.occ.back() = params.lambda - (n - 1);
    loewdin(f);
    return f;
}

GroundStateResult finalize_result(const ModelParams& params, const SolverConfig& config,
                                  const Grid& g, std::vector<EngineState> runs,
                                  ScalarCache* cache) {
    int best = 0;
    for (int r = 1; r < static_cast<int>(runs.size()); ++r) {
        const bool better_conv = runs[r].converged && !runs[best].converged;
        const bool same_conv = runs[r].converged == runs[best].converged;
        if (better_conv || (same_conv && runs[r].energy < runs[best].energy)) best = r;
    }
    EngineState& win = runs[best];

    GroundStateResult out;
    out.params = params;
    out.grid = g;
    out.energy = win.energy;
    out.mu = win.mu;
    out.iterations = win.iterations;
    out.converged = win.converged;
    out.energy_trace = std::move(win.trace);
    for (const auto& run : runs) out.restart_energies.push_back(run.energy);
    out.orbitals.orbitals = std::move(win.frame.u);
    out.orbitals.occupations = std::move(win.frame.occ);
    out.density = density(out.orbitals);

    double I1 = 0.0;
    {
        static ScalarCache shared_cache;
        ScalarCache& c = cache ? *cache : shared_cache;
        I1 = c.I1(params.d, params.p);
    }
    out.diagnostics = compute_diagnostics(out, I1);
    out.diagnostics.max_gram_drift =
        std::max(win.max_drift, out.diagnostics.orthonormality_error);
    if (out.diagnostics.aufbau_margin != 0.0 && !out.mu.empty()) {
        out.mu_next = out.mu.back() + out.diagnostics.aufbau_margin;
    }
    if (!config.keep_orbitals) {
        out.orbitals.orbitals.clear();
        out.orbitals.occupations.clear();
    }
    return out;
}

GroundStateResult solve_impl(const ModelParams& params, const SolverConfig& config,
                             const std::optional<OrbitalSet>& warm, ScalarCache* cache) {
    params.validate();
    const Grid g = solver_grid(params, config);
    const int n_restarts = std::max(1, config.n_restarts);

    auto run_one = [&](int restart) -> EngineState {
        Frame f = (restart == 0 && warm)
                      ? warm_frame(g, params, *warm, mix_seed(config.seed, 7919))
                      : initial_frame(g, params, restart, mix_seed(config.seed, 7919));
        return run_engine(params, config, std::move(f),
                          config.record_energy_trace && restart == 0);
    };

    std::vector<EngineState> runs(n_restarts);
    const int workers = std::max(1, std::min(config.threads, n_restarts));
    if (workers == 1) {
        for (int r = 0; r < n_restarts; ++r) runs[r] = run_one(r);
    } else {
        std::vector<std::future<EngineState>> futs;
        futs.reserve(n_restarts);
        for (int r = 0; r < n_restarts; ++r) {
            futs.push_back(std::async(std::launch::async, run_one, r));
        }
        for (int r = 0; r < n_restarts; ++r) runs[r] = futs[r].get();
    }
    return finalize_result(params, config, g, std::move(runs), cache);
}

}  // namespace

Grid solver_grid(const ModelParams& params, const SolverConfig& config) {
    params.validate();
    if (config.grid_n && config.box) return Grid::make(params.d, *config.box, *config.grid_n);
    const double c_lt = config.c_lt > 0.0 ? config.c_lt : default_c_LT(params.d);
    const double elt = e_LT(params.d, params.p, c_lt);
    const double factor = (2.0 * params.p - params.d * (params.p - 1.0)) /
                          (2.0 - params.d * (params.p - 1.0));
    const double mu_est = factor * elt;  // mu_N lower-bound proxy via J(lambda)/lambda >= e_LT
    const auto& bp = config.box_policy;
    const int nparticles = params.orbital_count();
    const double box =
        config.box ? *config.box
                   : std::max(bp.l_min, bp.c_box * std::pow(nparticles, 1.0 / params.d) +
                                            bp.margin / std::sqrt(std::abs(mu_est)));
    int n;
    if (config.grid_n) {
        n = *config.grid_n;
    } else {
        const int cap = params.d == 1
                            ? bp.n_max
                            : (params.d == 2 ? std::min(bp.n_max, 512) : std::min(bp.n_max, 128));
        n = 16;
        while (n < cap && box / n > bp.h_target) n *= 2;
    }
    return Grid::make(params.d, box, n);
}

GroundStateResult solve_ground_state(const ModelParams& params, const SolverConfig& config,
                                     ScalarCache* cache) {
    return solve_impl(params, config, std::nullopt, cache);
}

DiagnosticsReport compute_diagnostics(const GroundStateResult& state, double I1_reference) {
    DiagnosticsReport rep;
    const auto& os = state.orbitals;
    if (os.orbitals.empty()) return rep;
    const Grid& g = state.grid;
    const double hd = std::pow(g.h, g.d);
    const int n = static_cast<int>(os.orbitals.size());
    const double p = state.params.p;
    const double lambda = state.params.lambda;
    const int d = state.params.d;

    {
        double dev = 0.0;
        for (int i = 0; i < n; ++i) {
            for (int j = i; j < n; ++j) {
                dev = std::max(dev, std::abs(inner_product(os.orbitals[i], os.orbitals[j]) -
                                             (i == j ? 1.0 : 0.0)));
            }
        }
        rep.orthonormality_error = dev;
        rep.max_gram_drift = dev;
    }

    const GridFunction rho = density(os);

    double kin_total = 0.0;
    for (int j = 0; j < n; ++j) kin_total += os.occupations[j] * kinetic_energy(os.orbitals[j]);
    double rho_p = 0.0;
    for (double r : rho.values()) rho_p += std::pow(std::max(r, 0.0), p);
    rho_p *= hd;
    rep.virial_residual =
        std::abs(kin_total - (d * (p - 1.0) / (2.0 * p)) * rho_p) / std::max(kin_total, 1e-300);

    std::vector<double> mu(n, 0.0);
    rep.el_residuals.assign(n, 0.0);
    for (int j = 0; j < n; ++j) {
        GridFunction hu = mean_field_apply(rho, p, os.orbitals[j]);
        mu[j] = inner_product(os.orbitals[j], hu);
        double r2 = 0.0;
        for (std::size_t q = 0; q < g.m; ++q) {
            const double rr = hu[q] - mu[j] * os.orbitals[j][q];
            r2 += rr * rr;
        }
        rep.el_residuals[j] = std::sqrt(r2 * hd);
    }
    const double mu_last = state.mu.empty() ? mu.back() : state.mu.back();

    {
        EigOptions eo;
        eo.tol = 1e-8;
        eo.max_iter = 400;
        eo.seed = 4242;
        EigResult eig = lowest_eigenpairs(rho, p, n + 1, eo, &os.orbitals);
        if (static_cast<int>(eig.pairs.size()) == n + 1) {
            const double mu_next = eig.pairs[n].value;
            rep.aufbau_margin = mu_next - mu_last;
            rep.near_degenerate = std::abs(mu_next - mu_last) < 1e-8;
            bool ok = rep.aufbau_margin >= -1e-8;
            for (int j = 0; j < n; ++j) {
                if (std::abs(mu[j] - eig.pairs[j].value) >
                    200.0 * std::max(1e-8, eig.residuals[j])) {
                    ok = false;
                }
            }
            rep.aufbau_ok = ok;
        }
    }

    {
        const double factor = (2.0 * p - d * (p - 1.0)) / (2.0 - d * (p - 1.0));
        rep.mu_lower_bound = factor * state.energy / lambda;
        const double frac = lambda - (n - 1);
        rep.mu_upper_bound = I1_reference * std::pow(frac, mass_mu_exponent(d, p));
        const double slack = 1e-6 * std::max(1.0, std::abs(rep.mu_lower_bound));
        rep.mu_bounds_ok = (mu_last >= rep.mu_lower_bound - slack) &&
                           (mu_last <= rep.mu_upper_bound + slack) && (rep.mu_upper_bound < 0.0);
    }

    {
        rep.decay_rate_target = 2.0 * std::sqrt(std::abs(mu_last));
        RadialProfile prof = radial_average(rho);
        const double rho_max = *std::max_element(rho.values().begin(), rho.values().end());
        const double r_box = 0.5 * g.box;
        std::vector<double> xs, ys;
        for (std::size_t i = 0; i < prof.r.size(); ++i) {
            const double r = prof.r[i];
            const double v = prof.value[i];
            if (r > 0.85 * r_box) break;
            if (v < 1e-12 * rho_max || v <= 0.0) break;
            if (v < 1e-2 * rho_max) {
                xs.push_back(r);
                ys.push_back(std::log(v * std::pow(1.0 + r, d - 1)));
            }
        }
        const double decay_len = 1.0 / std::max(rep.decay_rate_target, 1e-6);
        if (xs.size() >= 6 && xs.back() - xs.front() > 2.0 * decay_len) {
            LineFit fit = fit_line(xs, ys);
            rep.decay_rate_fit = -fit.slope;
            rep.decay_fit_available = true;
        }
    }
    return rep;
}

std::vector<GroundStateResult> sweep_mass(int d, double p, const std::vector<double>& lambdas,
                                          const SolverConfig& config, ScalarCache* cache) {
    for (std::size_t i = 1; i < lambdas.size(); ++i) {
        if (lambdas[i] <= lambdas[i - 1]) {
            throw std::invalid_argument("sweep_mass: masses must be ascending");
        }
    }
    std::vector<GroundStateResult> out;
    out.reserve(lambdas.size());
    // one shared grid sized for the largest mass keeps warm starts exact
    SolverConfig cfg = config;
    {
        ModelParams top{d, p, lambdas.back()};
        const Grid g = solver_grid(top, config);
        cfg.box = g.box;
        cfg.grid_n = g.n;
    }
    bool have_prev = false;
    OrbitalSet prev;
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        ModelParams mp{d, p, lambdas[i]};
        SolverConfig ci = cfg;
        ci.seed = mix_seed(config.seed, i);
        try {
            std::optional<OrbitalSet> warm;
            if (have_prev && !prev.orbitals.empty()) warm = prev;
            GroundStateResult r = solve_impl(mp, ci, warm, cache);
            prev = r.orbitals;
            have_prev = !prev.orbitals.empty();
            out.push_back(std::move(r));
        } catch (const std::exception&) {
            GroundStateResult fail;
            fail.params = mp;
            fail.converged = false;
            out.push_back(std::move(fail));
            have_prev = false;
        }
    }
    return out;
}

int count_local_maxima(const GridFunction& rho, double rel_floor) {
    const Grid& g = rho.grid();
    const int n = g.n;
    double mx = 0.0;
    for (double v : rho.values()) mx = std::max(mx, v);
    const double floor_v = rel_floor * mx;

    std::vector<std::array<int, 3>> offsets;
    for (int a = -1; a <= 1; ++a) {
        for (int b = (g.d >= 2 ? -1 : 0); b <= (g.d >= 2 ? 1 : 0); ++b) {
            for (int c = (g.d >= 3 ? -1 : 0); c <= (g.d >= 3 ? 1 : 0); ++c) {
                if (a == 0 && b == 0 && c == 0) continue;
                offsets.push_back({a, b, c});
            }
        }
    }
    auto mod = [n](int i) { return ((i % n) + n) % n; };
    int count = 0;
    for (std::size_t idx = 0; idx < g.m; ++idx) {
        const double v = rho[idx];
        if (v <= floor_v) continue;
        const auto mi = unflatten(g, idx);
        bool is_max = true;
        for (const auto& off : offsets) {
            std::size_t nb = 0;
            for (int a = 0; a < g.d; ++a) nb = nb * n + mod(mi[a] + off[a]);
            if (rho[nb] >= v) {
                is_max = false;
                break;
            }
        }
        if (is_max) ++count;
    }
    return count;
}

std::array<double, 3> density_centroid(const GridFunction& rho) {
    const Grid& g = rho.grid();
    std::array<double, 3> center{0.0, 0.0, 0.0};
    for (int a = 0; a < g.d; ++a) {
        double cs = 0.0, sn = 0.0;
        for (std::size_t i = 0; i < g.m; ++i) {
            const auto mi = unflatten(g, i);
            const double theta =
                2.0 * std::numbers::pi * (g.coord(mi[a]) + 0.5 * g.box) / g.box;
            cs += rho[i] * std::cos(theta);
            sn += rho[i] * std::sin(theta);
        }
        double ang = std::atan2(sn, cs);
        if (ang < 0.0) ang += 2.0 * std::numbers::pi;
        center[a] = g.box * ang / (2.0 * std::numbers::pi) - 0.5 * g.box;
    }
    return center;
}

RadialProfile radial_average(const GridFunction& f) {
    const Grid& g = f.grid();
    const auto center = density_centroid(f);
    const int nbins = static_cast<int>(std::ceil(0.5 * g.box * std::sqrt(g.d) / g.h)) + 1;
    std::vector<double> sum(nbins, 0.0);
    std::vector<int> cnt(nbins, 0);
    for (std::size_t i = 0; i < g.m; ++i) {
        const auto mi = unflatten(g, i);
        double r2 = 0.0;
        for (int a = 0; a < g.d; ++a) {
            const double dx = g.wrap(g.coord(mi[a]) - center[a]);
            r2 += dx * dx;
        }
        const int bin = std::min(nbins - 1, static_cast<int>(std::sqrt(r2) / g.h));
        sum[bin] += f[i];
        cnt[bin] += 1;
    }
    RadialProfile out;
    for (int b = 0; b < nbins; ++b) {
        if (cnt[b] == 0) continue;
        out.r.push_back((b + 0.5) * g.h);
        out.value.push_back(sum[b] / cnt[b]);
    }
    return out;
}

}  // namespace fnls
