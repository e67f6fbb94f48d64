#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "fnls/grid.hpp"

namespace fnls::detail {

// Per-thread FFT workspace for one grid geometry. Plan creation is serialized
// behind a global mutex (the FFTW planner is not thread-safe); execution is
// on thread-local buffers.
class FftWorkspace {
public:
    explicit FftWorkspace(const Grid& g);
    ~FftWorkspace();
    FftWorkspace(const FftWorkspace&) = delete;
    FftWorkspace& operator=(const FftWorkspace&) = delete;

    // half-complex size: n^{d-1} * (n/2 + 1)
    std::size_t spectral_size() const { return mc_; }
    std::size_t real_size() const { return m_; }

    double* real_buf() { return rbuf_; }
    std::complex<double>* cplx_buf() { return cbuf_; }
    std::complex<double>* full_buf() { return fbuf_; }

    void forward();        // rbuf -> cbuf (r2c, unnormalized)
    void inverse();        // cbuf -> rbuf (c2r, unnormalized; caller divides by m)
    void forward_full();   // fbuf -> fbuf in place (c2c, unnormalized)
    void inverse_full();   // fbuf -> fbuf in place

    // |k|^2 for the half-complex layout entry `idx`, plus the Parseval weight
    // (2 for entries whose conjugate partner is folded away, else 1).
    double k2(std::size_t idx) const { return k2_[idx]; }
    double parseval_weight(std::size_t idx) const { return w_[idx]; }

    // physical frequency along each axis for a full-complex layout index
    void full_freqs(std::size_t idx, double out[3]) const;

private:
    Grid g_;
    std::size_t m_ = 0, mc_ = 0;
    double* rbuf_ = nullptr;
    std::complex<double>* cbuf_ = nullptr;
    std::complex<double>* fbuf_ = nullptr;
    void* plan_fwd_ = nullptr;
    void* plan_inv_ = nullptr;
    void* plan_fwd_full_ = nullptr;
    void* plan_inv_full_ = nullptr;
    std::vector<double> k2_;
    std::vector<double> w_;
    std::vector<double> kaxis_;  // frequency by 1d index 0..n-1
};

// Thread-local workspace for this grid (created on first use per thread).
FftWorkspace& workspace_for(const Grid& g);

}  // namespace fnls::detail
