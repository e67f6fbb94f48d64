#pragma once

#include <cstdint>
#include <vector>

#include "fnls/grid.hpp"

namespace fnls {

struct EigOptions {
    int max_iter = 500;
    double tol = 1e-8;           // ||H v - theta v||_L2 <= tol * max(1, |theta|)
    int block_extra = 2;         // extra vectors beyond k in the block
    std::uint64_t seed = 12345;  // seeds the random part of the start block
};

struct EigPair {
    double value = 0.0;
    GridFunction vec;  // unit L2 norm
};

struct EigResult {
    std::vector<EigPair> pairs;     // ascending, orthonormal
    std::vector<double> residuals;  // per returned pair
    bool converged = false;
    int iterations = 0;
};

/// k lowest eigenpairs of H = -Laplacian - rho^{p-1} on the periodic grid,
/// by preconditioned block LOBPCG with a spectral (-Lap + sigma)^{-1}
/// preconditioner. `warm_start` columns seed the block when given.
EigResult lowest_eigenpairs(const GridFunction& rho, double p, int k,
                            const EigOptions& opts = {},
                            const std::vector<GridFunction>* warm_start = nullptr);

/// -Lap u - rho^{p-1} u. Negative rho values from roundoff are clamped to zero.
GridFunction mean_field_apply(const GridFunction& rho, double p, const GridFunction& u);

}  // namespace fnls
