#include "fnls/grid.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstring>
#include <numbers>
#include <random>
#include <stdexcept>

#include "fft_cache.hpp"

namespace fnls {

Grid Grid::make(int d, double box, int n) {
    if (d < 1 || d > 3) throw std::invalid_argument("grid: dimension must be 1, 2 or 3");
    if (box <= 0.0) throw std::invalid_argument("grid: box length must be positive");
    if (n < 8) throw std::invalid_argument("grid: need at least 8 points per axis");
    if (n % 2 != 0) throw std::invalid_argument("grid: points per axis must be even");
    Grid g;
    g.d = d;
    g.box = box;
    g.n = n;
    g.h = box / n;
    g.m = 1;
    for (int a = 0; a < d; ++a) g.m *= static_cast<std::size_t>(n);
    return g;
}

double Grid::wrap(double x) const {
    double y = std::fmod(x, box);
    if (y > 0.5 * box) y -= box;
    if (y < -0.5 * box) y += box;
    return y;
}

bool GridFunction::finite() const {
    return std::all_of(v_.begin(), v_.end(), [](double x) { return std::isfinite(x); });
}

std::array<int, 3> unflatten(const Grid& g, std::size_t idx) {
    const int n = g.n;
    if (g.d == 1) return {static_cast<int>(idx), 0, 0};
    if (g.d == 2) return {static_cast<int>(idx / n), static_cast<int>(idx % n), 0};
    return {static_cast<int>(idx / (static_cast<std::size_t>(n) * n)),
            static_cast<int>((idx / n) % n), static_cast<int>(idx % n)};
}

GridFunction sample(const Grid& g, const std::function<double(const std::array<double, 3>&)>& f) {
    GridFunction out(g);
    std::array<double, 3> x{0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < g.m; ++i) {
        const auto mi = unflatten(g, i);
        for (int a = 0; a < g.d; ++a) x[a] = g.coord(mi[a]);
        out[i] = f(x);
    }
    return out;
}

static void check_same_grid(const GridFunction& f, const GridFunction& g) {
    if (!(f.grid() == g.grid())) throw std::invalid_argument("grid functions live on different grids");
}

double inner_product(const GridFunction& f, const GridFunction& g) {
    check_same_grid(f, g);
    double s = 0.0;
    const double* a = f.data();
    const double* b = g.data();
    for (std::size_t i = 0; i < f.size(); ++i) s += a[i] * b[i];
    return s * std::pow(f.grid().h, f.grid().d);
}

double integrate(const GridFunction& f) {
    double s = 0.0;
    for (double v : f.values()) s += v;
    return s * std::pow(f.grid().h, f.grid().d);
}

double norm2(const GridFunction& f) { return inner_product(f, f); }

double spectral_norm2(const GridFunction& f) {
    auto& ws = detail::workspace_for(f.grid());
    std::memcpy(ws.real_buf(), f.data(), f.size() * sizeof(double));
    ws.forward();
    const auto* c = ws.cplx_buf();
    double s = 0.0;
    for (std::size_t i = 0; i < ws.spectral_size(); ++i) {
        s += ws.parseval_weight(i) * std::norm(c[i]);
    }
    const Grid& g = f.grid();
    return s * std::pow(g.h, g.d) / static_cast<double>(g.m);
}

GridFunction laplacian_apply(const GridFunction& f) {
    auto& ws = detail::workspace_for(f.grid());
    std::memcpy(ws.real_buf(), f.data(), f.size() * sizeof(double));
    ws.forward();
    auto* c = ws.cplx_buf();
    for (std::size_t i = 0; i < ws.spectral_size(); ++i) c[i] *= ws.k2(i);
    ws.inverse();
    GridFunction out(f.grid());
    const double scale = 1.0 / static_cast<double>(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) out[i] = ws.real_buf()[i] * scale;
    return out;
}

double kinetic_energy(const GridFunction& f) {
    auto& ws = detail::workspace_for(f.grid());
    std::memcpy(ws.real_buf(), f.data(), f.size() * sizeof(double));
    ws.forward();
    const auto* c = ws.cplx_buf();
    double s = 0.0;
    for (std::size_t i = 0; i < ws.spectral_size(); ++i) {
        s += ws.parseval_weight(i) * ws.k2(i) * std::norm(c[i]);
    }
    const Grid& g = f.grid();
    return s * std::pow(g.h, g.d) / static_cast<double>(g.m);
}

GridFunction helmholtz_inverse(const GridFunction& f, double sigma) {
    if (sigma <= 0.0) throw std::invalid_argument("helmholtz_inverse: sigma must be positive");
    auto& ws = detail::workspace_for(f.grid());
    std::memcpy(ws.real_buf(), f.data(), f.size() * sizeof(double));
    ws.forward();
    auto* c = ws.cplx_buf();
    for (std::size_t i = 0; i < ws.spectral_size(); ++i) c[i] /= (sigma + ws.k2(i));
    ws.inverse();
    GridFunction out(f.grid());
    const double scale = 1.0 / static_cast<double>(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) out[i] = ws.real_buf()[i] * scale;
    return out;
}

GridFunction implicit_euler_step(const GridFunction& g, double tau) {
    if (tau <= 0.0) throw std::invalid_argument("implicit_euler_step: tau must be positive");
    auto& ws = detail::workspace_for(g.grid());
    std::memcpy(ws.real_buf(), g.data(), g.size() * sizeof(double));
    ws.forward();
    auto* c = ws.cplx_buf();
    for (std::size_t i = 0; i < ws.spectral_size(); ++i) c[i] /= (1.0 + tau * ws.k2(i));
    ws.inverse();
    GridFunction out(g.grid());
    const double scale = 1.0 / static_cast<double>(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) out[i] = ws.real_buf()[i] * scale;
    return out;
}

static GridFunction translate_by_roll(const GridFunction& f, const std::array<int, 3>& steps) {
    const Grid& g = f.grid();
    GridFunction out(g);
    const int n = g.n;
    auto mod = [n](int i) { return ((i % n) + n) % n; };
    for (std::size_t i = 0; i < g.m; ++i) {
        auto mi = unflatten(g, i);
        // out(x) = f(x - s) -> source index = i - steps
        std::size_t src = 0;
        for (int a = 0; a < g.d; ++a) src = src * n + mod(mi[a] - steps[a]);
        out[i] = f[src];
    }
    return out;
}

GridFunction translate(const GridFunction& f, const std::array<double, 3>& shift) {
    const Grid& g = f.grid();

    bool on_grid = true;
    std::array<int, 3> steps{0, 0, 0};
    for (int a = 0; a < g.d; ++a) {
        const double s = shift[a] / g.h;
        const double r = std::round(s);
        if (std::abs(s - r) > 1e-12 * std::max(1.0, std::abs(s))) on_grid = false;
        steps[a] = static_cast<int>(std::llround(r));
    }
    if (on_grid) return translate_by_roll(f, steps);

    auto& ws = detail::workspace_for(g);
    auto* fb = ws.full_buf();
    for (std::size_t i = 0; i < g.m; ++i) fb[i] = f[i];
    ws.forward_full();
    const double nyq = std::numbers::pi / g.h;  // |k| at the Nyquist index
    double k[3];
    for (std::size_t i = 0; i < g.m; ++i) {
        ws.full_freqs(i, k);
        double phase = 0.0;
        double nyq_factor = 1.0;
        for (int a = 0; a < g.d; ++a) {
            // the Nyquist mode has no conjugate partner; keep output real with cos
            if (std::abs(std::abs(k[a]) - nyq) < 1e-12 * nyq) {
                nyq_factor *= std::cos(k[a] * shift[a]);
            } else {
                phase -= k[a] * shift[a];
            }
        }
        fb[i] *= std::polar(nyq_factor, phase);
    }
    ws.inverse_full();
    GridFunction out(g);
    const double scale = 1.0 / static_cast<double>(g.m);
    for (std::size_t i = 0; i < g.m; ++i) out[i] = fb[i].real() * scale;
    return out;
}

GridFunction random_smooth_field(const Grid& g, double cutoff, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto unit = [&rng]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    GridFunction noise(g);
    // portable Box-Muller
    for (std::size_t i = 0; i + 1 < g.m; i += 2) {
        const double u1 = std::max(unit(), 1e-300);
        const double u2 = unit();
        const double r = std::sqrt(-2.0 * std::log(u1));
        noise[i] = r * std::cos(2.0 * std::numbers::pi * u2);
        noise[i + 1] = r * std::sin(2.0 * std::numbers::pi * u2);
    }
    if (g.m % 2 == 1) noise[g.m - 1] = unit() - 0.5;

    auto& ws = detail::workspace_for(g);
    std::memcpy(ws.real_buf(), noise.data(), g.m * sizeof(double));
    ws.forward();
    auto* c = ws.cplx_buf();
    const double w2 = cutoff * cutoff / (8.0 * std::numbers::pi * std::numbers::pi);
    for (std::size_t i = 0; i < ws.spectral_size(); ++i) {
        c[i] *= std::exp(-0.5 * w2 * ws.k2(i));
    }
    ws.inverse();
    GridFunction out(g);
    const double scale = 1.0 / static_cast<double>(g.m);
    for (std::size_t i = 0; i < g.m; ++i) out[i] = ws.real_buf()[i] * scale;
    return out;
}

}  // namespace fnls
