#include "fft_cache.hpp"

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>
#include <numbers>

namespace fnls::detail {

namespace {
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

FftWorkspace::FftWorkspace(const Grid& g) : g_(g) {
    const int n = g.n;
    const int nc_last = n / 2 + 1;
    m_ = g.m;
    mc_ = 1;
    for (int a = 0; a < g.d - 1; ++a) mc_ *= static_cast<std::size_t>(n);
    mc_ *= static_cast<std::size_t>(nc_last);

    rbuf_ = fftw_alloc_real(m_);
    cbuf_ = reinterpret_cast<std::complex<double>*>(fftw_alloc_complex(mc_));
    fbuf_ = reinterpret_cast<std::complex<double>*>(fftw_alloc_complex(m_));

    int dims[3] = {n, n, n};
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        plan_fwd_ = fftw_plan_dft_r2c(g.d, dims, rbuf_,
                                      reinterpret_cast<fftw_complex*>(cbuf_),
                                      FFTW_ESTIMATE);
        plan_inv_ = fftw_plan_dft_c2r(g.d, dims,
                                      reinterpret_cast<fftw_complex*>(cbuf_),
                                      rbuf_, FFTW_ESTIMATE);
        plan_fwd_full_ = fftw_plan_dft(g.d, dims,
                                       reinterpret_cast<fftw_complex*>(fbuf_),
                                       reinterpret_cast<fftw_complex*>(fbuf_),
                                       FFTW_FORWARD, FFTW_ESTIMATE);
        plan_inv_full_ = fftw_plan_dft(g.d, dims,
                                       reinterpret_cast<fftw_complex*>(fbuf_),
                                       reinterpret_cast<fftw_complex*>(fbuf_),
                                       FFTW_BACKWARD, FFTW_ESTIMATE);
    }

    kaxis_.resize(n);
    const double dk = 2.0 * std::numbers::pi / g.box;
    for (int i = 0; i < n; ++i) {
        const int k = (i <= n / 2) ? i : i - n;
        kaxis_[i] = dk * k;  // i == n/2 carries the Nyquist magnitude
    }

    k2_.resize(mc_);
    w_.resize(mc_);
    std::size_t idx = 0;
    const int o0 = (g.d >= 2) ? n : 1;  // slowest axis, present for d >= 2
    const int o1 = (g.d >= 3) ? n : 1;  // middle axis, present for d == 3
    for (int i0 = 0; i0 < o0; ++i0) {
        for (int i1 = 0; i1 < o1; ++i1) {
            for (int iz = 0; iz < nc_last; ++iz) {
                double kk = kaxis_[iz] * kaxis_[iz];
                if (g.d == 2) kk += kaxis_[i0] * kaxis_[i0];
                if (g.d == 3) kk += kaxis_[i0] * kaxis_[i0] + kaxis_[i1] * kaxis_[i1];
                k2_[idx] = kk;
                w_[idx] = (iz == 0 || iz == n / 2) ? 1.0 : 2.0;
                ++idx;
            }
        }
    }
}

FftWorkspace::~FftWorkspace() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
    fftw_destroy_plan(static_cast<fftw_plan>(plan_inv_));
    fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_full_));
    fftw_destroy_plan(static_cast<fftw_plan>(plan_inv_full_));
    fftw_free(rbuf_);
    fftw_free(cbuf_);
    fftw_free(fbuf_);
}

void FftWorkspace::forward() { fftw_execute(static_cast<fftw_plan>(plan_fwd_)); }
void FftWorkspace::inverse() { fftw_execute(static_cast<fftw_plan>(plan_inv_)); }
void FftWorkspace::forward_full() { fftw_execute(static_cast<fftw_plan>(plan_fwd_full_)); }
void FftWorkspace::inverse_full() { fftw_execute(static_cast<fftw_plan>(plan_inv_full_)); }

void FftWorkspace::full_freqs(std::size_t idx, double out[3]) const {
    const int n = g_.n;
    out[0] = out[1] = out[2] = 0.0;
    if (g_.d == 1) {
        out[0] = kaxis_[idx];
    } else if (g_.d == 2) {
        out[0] = kaxis_[idx / n];
        out[1] = kaxis_[idx % n];
    } else {
        out[0] = kaxis_[idx / (static_cast<std::size_t>(n) * n)];
        out[1] = kaxis_[(idx / n) % n];
        out[2] = kaxis_[idx % n];
    }
}

FftWorkspace& workspace_for(const Grid& g) {
    thread_local std::map<std::tuple<int, int, long long>, std::unique_ptr<FftWorkspace>> cache;
    // quantize box to avoid float-key pitfalls; grids with equal (d, n, L) share plans
    const long long boxq = static_cast<long long>(g.box * 1e9);
    auto key = std::make_tuple(g.d, g.n, boxq);
    auto it = cache.find(key);
    if (it == cache.end()) {
        it = cache.emplace(key, std::make_unique<FftWorkspace>(g)).first;
    }
    return *it->second;
}

}  // namespace fnls::detail
