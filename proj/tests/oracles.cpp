#include "oracles.hpp"

#include <Eigen/Dense>
#include <boost/math/quadrature/sinh_sinh.hpp>

#include <cmath>
#include <stdexcept>

namespace oracle {

double integrate_line(const std::function<double(double)>& f) {
    boost::math::quadrature::sinh_sinh<double> integrator;
    return integrator.integrate(f, 1e-12);
}

namespace {

// mu = -1 profile: Q0(x) = p^{1/(2p-2)} sech^{1/(p-1)}((p-1) x).
// Check: with s = p-1, -Q'' + Q = Q^{2p-1} has A = (s+1)^{1/(2s)}.
double q0(double p, double x) {
    const double s = p - 1.0;
    const double c = std::cosh(s * x);
    return std::pow(p, 1.0 / (2.0 * s)) * std::pow(1.0 / c, 1.0 / s);
}

double dq0(double p, double x) {
    const double s = p - 1.0;
    return -q0(p, x) * std::tanh(s * x);
}

}  // namespace

Soliton1D soliton_oracle(double p) {
    if (!(p > 1.0 && p < 3.0)) throw std::invalid_argument("soliton oracle needs 1 < p < 3");
    Soliton1D out;
    out.p = p;
    out.mass0 = integrate_line([p](double x) { return q0(p, x) * q0(p, x); });
    const double kin = integrate_line([p](double x) { return dq0(p, x) * dq0(p, x); });
    const double pot = integrate_line([p](double x) { return std::pow(q0(p, x), 2.0 * p); });
    out.energy0 = kin - pot / p;
    const double e_energy = 1.0 + 2.0 * (p - 1.0) / (3.0 - p);
    const double e_mu = 2.0 * (p - 1.0) / (3.0 - p);
    out.I1 = out.energy0 / std::pow(out.mass0, e_energy);
    out.mu1 = -1.0 / std::pow(out.mass0, e_mu);
    return out;
}

double soliton_profile_mass1(double p, double x) {
    const Soliton1D s = soliton_oracle(p);
    // Q_lambda(y) = t^{1/(p-1)} Q(t y) scales mass by t^{(3-p)/(p-1)}; pick t
    // mapping mass0 -> 1
    const double t = std::pow(s.mass0, -(p - 1.0) / (3.0 - p));
    return std::pow(t, 1.0 / (p - 1.0)) * q0(p, t * x);
}

std::vector<double> fd_eigenvalues_1d(const fnls::Grid& g, const std::vector<double>& V, int k) {
    if (g.d != 1) throw std::invalid_argument("fd oracle is 1d only");
    if (V.size() != g.m) throw std::invalid_argument("potential size mismatch");
    const int n = g.n;
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n, n);
    const double ih2 = 1.0 / (g.h * g.h);
    // 4th-order periodic stencil for -d^2/dx^2: (1/12)[-1 16 -30 16 -1] / h^2
    for (int i = 0; i < n; ++i) {
        H(i, i) += 30.0 / 12.0 * ih2 + V[i];
        H(i, (i + 1) % n) += -16.0 / 12.0 * ih2;
        H(i, (i - 1 + n) % n) += -16.0 / 12.0 * ih2;
        H(i, (i + 2) % n) += 1.0 / 12.0 * ih2;
        H(i, (i - 2 + n) % n) += 1.0 / 12.0 * ih2;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    std::vector<double> out;
    for (int i = 0; i < k && i < n; ++i) out.push_back(es.eigenvalues()(i));
    return out;
}

}  // namespace oracle
