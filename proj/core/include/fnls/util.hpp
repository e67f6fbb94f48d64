#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace fnls {

/// Fritsch-Carlson monotone cubic interpolation through (xs, ys), xs ascending.
double monotone_cubic_interp(std::span<const double> xs, std::span<const double> ys, double x);

/// Least-squares slope and intercept of y over x.
struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    int points = 0;
};
LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// SplitMix64 hash; used to derive independent per-task seeds from one seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

}  // namespace fnls
