#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace fnls {

/// Uniform periodic box discretization of R^d (d = 1, 2, 3).
///
/// Points along each axis sit at x_i = -L/2 + i*h with h = L/n; the endpoint
/// x = L/2 is identified with x = -L/2. The frequency set per axis is
/// {2*pi*k/L : k = -n/2, ..., n/2 - 1}.
struct Grid {
    int d = 1;
    double box = 0.0;    // side length L
    int n = 0;           // points per axis, even, >= 8
    double h = 0.0;      // spacing L/n
    std::size_t m = 0;   // total points n^d

    /// Throws std::invalid_argument on d not in {1,2,3}, odd n, n < 8, L <= 0.
    static Grid make(int d, double box, int n);

    double coord(int i) const { return -0.5 * box + h * static_cast<double>(i); }

    /// Signed distance on the circle of circumference `box`.
    double wrap(double x) const;

    bool operator==(const Grid&) const = default;
};

/// Real scalar field sampled on a Grid. Value semantics; operations on
/// GridFunctions are pure and thread-safe (per-thread transform scratch).
class GridFunction {
public:
    GridFunction() = default;
    explicit GridFunction(const Grid& g, double fill = 0.0)
        : grid_(g), v_(g.m, fill) {}

    const Grid& grid() const { return grid_; }
    std::span<double> values() { return v_; }
    std::span<const double> values() const { return v_; }
    double* data() { return v_.data(); }
    const double* data() const { return v_.data(); }
    std::size_t size() const { return v_.size(); }
    double operator[](std::size_t i) const { return v_[i]; }
    double& operator[](std::size_t i) { return v_[i]; }

    /// True if every value is finite.
    bool finite() const;

private:
    Grid grid_;
    std::vector<double> v_;
};

/// Fill a grid function from a callable of the physical coordinates.
/// The callable receives a d-vector; unused components are zero.
GridFunction sample(const Grid& g, const std::function<double(const std::array<double, 3>&)>& f);

/// Multi-index (i0[,i1[,i2]]) of a flattened row-major grid index.
std::array<int, 3> unflatten(const Grid& g, std::size_t idx);

/// h^d * sum(f*g). Throws on mismatched grids.
double inner_product(const GridFunction& f, const GridFunction& g);

/// h^d * sum(f).
double integrate(const GridFunction& f);

/// squared L2 norm, i.e. inner_product(f, f).
double norm2(const GridFunction& f);

/// Fourier-side squared norm (h^d / M) sum |fhat|^2; equals norm2 by Parseval.
double spectral_norm2(const GridFunction& f);

/// -Laplacian(f), spectral. Positive semidefinite: <f, laplacian_apply(f)> >= 0.
GridFunction laplacian_apply(const GridFunction& f);

/// Integral of |grad f|^2 via Parseval, nonnegative.
double kinetic_energy(const GridFunction& f);

/// (sigma - Laplacian)^{-1} f, sigma > 0, spectral.
GridFunction helmholtz_inverse(const GridFunction& f, double sigma);

/// One semi-implicit descent substep (1 + tau*(-Lap))^{-1} g, used by the flows.
GridFunction implicit_euler_step(const GridFunction& g, double tau);

/// f(. - shift), spectral phase translation; exact for band-limited data.
/// Shifts that are integer multiples of h reduce to an exact index roll.
GridFunction translate(const GridFunction& f, const std::array<double, 3>& shift);

/// Smooth random field: white noise low-passed at wavelength `cutoff`,
/// deterministic in `seed`. Used for solver restarts.
GridFunction random_smooth_field(const Grid& g, double cutoff, std::uint64_t seed);

}  // namespace fnls
