#include "fnls/eigensolver.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstring>
#include <stdexcept>

#include "fft_cache.hpp"
#include "fnls/util.hpp"

namespace fnls {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// H = -Lap + V acting on euclid-normalized columns
struct Operator {
    const Grid* g;
    std::vector<double> V;  // -rho^{p-1}

    void apply(const double* in, double* out) const {
        auto& ws = detail::workspace_for(*g);
        std::memcpy(ws.real_buf(), in, g->m * sizeof(double));
        ws.forward();
        auto* c = ws.cplx_buf();
        for (std::size_t i = 0; i < ws.spectral_size(); ++i) c[i] *= ws.k2(i);
        ws.inverse();
        const double scale = 1.0 / static_cast<double>(g->m);
        for (std::size_t i = 0; i < g->m; ++i) {
            out[i] = ws.real_buf()[i] * scale + V[i] * in[i];
        }
    }

    MatrixXd apply_block(const MatrixXd& X) const {
        MatrixXd Y(X.rows(), X.cols());
        for (int j = 0; j < X.cols(); ++j) apply(X.col(j).data(), Y.col(j).data());
        return Y;
    }
};

void precondition(const Grid& g, double sigma, const double* in, double* out) {
    auto& ws = detail::workspace_for(g);
    std::memcpy(ws.real_buf(), in, g.m * sizeof(double));
    ws.forward();
    auto* c = ws.cplx_buf();
    for (std::size_t i = 0; i < ws.spectral_size(); ++i) c[i] /= (sigma + ws.k2(i));
    ws.inverse();
    const double scale = 1.0 / static_cast<double>(g.m);
    for (std::size_t i = 0; i < g.m; ++i) out[i] = ws.real_buf()[i] * scale;
}

// Loewdin-orthonormalize columns in place, dropping near-dependent directions.
// Returns the transform applied so the caller can update H*S consistently.
MatrixXd orthonormalize(MatrixXd& S) {
    const MatrixXd G = S.transpose() * S;
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(G);
    const VectorXd& ev = es.eigenvalues();
    const double floor = std::max(ev.maxCoeff(), 1.0) * 1e-13;
    int keep = 0;
    for (int i = 0; i < ev.size(); ++i) {
        if (ev(i) > floor) ++keep;
    }
    MatrixXd T(G.rows(), keep);
    int c = 0;
    for (int i = 0; i < ev.size(); ++i) {
        if (ev(i) > floor) T.col(c++) = es.eigenvectors().col(i) / std::sqrt(ev(i));
    }
    S = S * T;
    return T;
}

}  // namespace

GridFunction mean_field_apply(const GridFunction& rho, double p, const GridFunction& u) {
    if (!(rho.grid() == u.grid())) throw std::invalid_argument("mean_field_apply: grid mismatch");
    GridFunction out = laplacian_apply(u);
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double r = std::max(rho[i], 0.0);
        out[i] -= std::pow(r, p - 1.0) * u[i];
    }
    return out;
}

EigResult lowest_eigenpairs(const GridFunction& rho, double p, int k, const EigOptions& opts,
                            const std::vector<GridFunction>* warm_start) {
    if (k < 1) throw std::invalid_argument("lowest_eigenpairs: k must be >= 1");
    const Grid& g = rho.grid();
    const auto m = static_cast<Eigen::Index>(g.m);
    const int nb = std::min<int>(k + opts.block_extra, static_cast<int>(g.m) / 2);

    Operator H{&g, {}};
    H.V.resize(g.m);
    for (std::size_t i = 0; i < g.m; ++i) H.V[i] = -std::pow(std::max(rho[i], 0.0), p - 1.0);

    MatrixXd X(m, nb);
    int filled = 0;
    if (warm_start) {
        for (const auto& w : *warm_start) {
            if (filled >= nb) break;
            if (!(w.grid() == g)) throw std::invalid_argument("lowest_eigenpairs: warm start grid mismatch");
            for (Eigen::Index i = 0; i < m; ++i) X(i, filled) = w[static_cast<std::size_t>(i)];
            ++filled;
        }
    }
    for (; filled < nb; ++filled) {
        GridFunction r = random_smooth_field(g, 2.0, mix_seed(opts.seed, static_cast<std::uint64_t>(filled)));
        for (Eigen::Index i = 0; i < m; ++i) X(i, filled) = r[static_cast<std::size_t>(i)];
    }
    orthonormalize(X);

    MatrixXd HX = H.apply_block(X);
    MatrixXd P, HP;
    VectorXd theta = VectorXd::Zero(nb);
    EigResult out;

    for (int it = 0; it < opts.max_iter; ++it) {
        out.iterations = it + 1;
        {
            // Rayleigh-Ritz inside span(X)
            MatrixXd A = X.transpose() * HX;
            A = 0.5 * (A + A.transpose()).eval();
            Eigen::SelfAdjointEigenSolver<MatrixXd> es(A);
            X = (X * es.eigenvectors()).eval();
            HX = (HX * es.eigenvectors()).eval();
            theta = es.eigenvalues();
        }
        MatrixXd R = HX - X * theta.asDiagonal();
        int nconv = 0;
        for (int j = 0; j < k; ++j) {
            if (R.col(j).norm() <= opts.tol * std::max(1.0, std::abs(theta(j)))) {
                ++nconv;
            } else {
                break;
            }
        }
        if (nconv >= k) {
            out.converged = true;
            break;
        }

        MatrixXd W(m, nb);
        for (int j = 0; j < nb; ++j) {
            const double sigma = std::max(1e-2, std::abs(theta(j)));
            precondition(g, sigma, R.col(j).data(), W.col(j).data());
        }
        // project out the X component and normalize each direction; otherwise
        // near convergence the tiny residual directions fall under the
        // orthonormalization floor and progress stalls
        W -= X * (X.transpose() * W).eval();
        for (int j = 0; j < nb; ++j) {
            const double nw = W.col(j).norm();
            if (nw > 1e-280) W.col(j) /= nw;
        }
        if (P.cols() > 0) {
            for (int j = 0; j < P.cols(); ++j) {
                const double npn = P.col(j).norm();
                if (npn > 1e-280) {
                    P.col(j) /= npn;
                    HP.col(j) /= npn;
                }
            }
        }

        const int np = static_cast<int>(P.cols());
        MatrixXd S(m, nb + nb + np);
        S.leftCols(nb) = X;
        S.middleCols(nb, nb) = W;
        if (np > 0) S.rightCols(np) = P;

        MatrixXd HS(m, S.cols());
        HS.leftCols(nb) = HX;
        HS.middleCols(nb, nb) = H.apply_block(W);
        if (np > 0) HS.rightCols(np) = HP;

        MatrixXd T = orthonormalize(S);
        HS = (HS * T).eval();

        MatrixXd A = S.transpose() * HS;
        A = 0.5 * (A + A.transpose()).eval();
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(A);
        const int nkeep = std::min<int>(nb, static_cast<int>(S.cols()));
        MatrixXd C = es.eigenvectors().leftCols(nkeep);

        // next P: the part of the update built from the non-X blocks
        MatrixXd Cp = C;
        Cp.topRows(nb).setZero();
        P = S * Cp;
        HP = HS * Cp;
        if (P.cols() > 0) {
            // drop tiny P directions
            MatrixXd Tp = orthonormalize(P);
            HP = (HP * Tp).eval();
        }

        X = S * C;
        HX = HS * C;
        theta = es.eigenvalues().head(nkeep);
    }

    // final Ritz values/vectors and residuals
    const double hd_half = std::pow(g.h, 0.5 * g.d);
    out.pairs.reserve(k);
    out.residuals.reserve(k);
    MatrixXd R = HX - X * theta.asDiagonal();
    for (int j = 0; j < k; ++j) {
        EigPair pr;
        pr.value = theta(j);
        pr.vec = GridFunction(g);
        for (Eigen::Index i = 0; i < m; ++i) {
            pr.vec[static_cast<std::size_t>(i)] = X(i, j) / hd_half;
        }
        out.pairs.push_back(std::move(pr));
        out.residuals.push_back(R.col(j).norm());
    }
    return out;
}

}  // namespace fnls
