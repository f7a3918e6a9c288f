#pragma once

#include "mns/common.hpp"
#include "mns/grid.hpp"

#include <fftw3.h>

#ifdef __GLIBC__
#include <malloc.h>
#endif

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

namespace mns {

/// FFTW-backed transform engine for one grid size. Plans are created once per
/// process with FFTW_ESTIMATE, which picks its algorithm from heuristics only,
/// so results are deterministic run to run. The engine owns aligned staging
/// buffers; callers never hand their storage to FFTW directly. Execution is
/// internally serialized.
class FftEngine {
public:
    explicit FftEngine(int n) : n_(n), count_(static_cast<std::size_t>(n) * n * n) {
        in_ = fftw_alloc_complex(3 * count_);
        out_ = fftw_alloc_complex(3 * count_);
        if (!in_ || !out_) throw error("FftEngine: allocation failed");
        const int dims[3] = {n, n, n};
        // Row-major FFTW dims are (slowest,...,fastest); our first axis is
        // fastest, which matches dims[2] here. The cube is symmetric anyway.
        fwd1_ = fftw_plan_many_dft(3, dims, 1, in_, nullptr, 1, static_cast<int>(count_),
                                   out_, nullptr, 1, static_cast<int>(count_),
                                   FFTW_FORWARD, FFTW_ESTIMATE);
        fwd3_ = fftw_plan_many_dft(3, dims, 3, in_, nullptr, 1, static_cast<int>(count_),
                                   out_, nullptr, 1, static_cast<int>(count_),
                                   FFTW_FORWARD, FFTW_ESTIMATE);
        bwd1_ = fftw_plan_many_dft(3, dims, 1, in_, nullptr, 1, static_cast<int>(count_),
                                   out_, nullptr, 1, static_cast<int>(count_),
                                   FFTW_BACKWARD, FFTW_ESTIMATE);
        bwd3_ = fftw_plan_many_dft(3, dims, 3, in_, nullptr, 1, static_cast<int>(count_),
                                   out_, nullptr, 1, static_cast<int>(count_),
                                   FFTW_BACKWARD, FFTW_ESTIMATE);
        if (!fwd1_ || !fwd3_ || !bwd1_ || !bwd3_) throw error("FftEngine: planning failed");

        conj_index_.resize(count_);
        std::size_t idx = 0;
        for (int l = 0; l < n; ++l)
            for (int j = 0; j < n; ++j)
                for (int i = 0; i < n; ++i, ++idx) {
                    const int ni = i == 0 ? 0 : n - i;
                    const int nj = j == 0 ? 0 : n - j;
                    const int nl = l == 0 ? 0 : n - l;
                    conj_index_[idx] = static_cast<std::uint32_t>(
                        ni + static_cast<std::size_t>(n) * (nj + static_cast<std::size_t>(n) * nl));
                }
    }

    ~FftEngine() {
        fftw_destroy_plan(fwd1_);
        fftw_destroy_plan(fwd3_);
        fftw_destroy_plan(bwd1_);
        fftw_destroy_plan(bwd3_);
        fftw_free(in_);
        fftw_free(out_);
    }

    FftEngine(const FftEngine&) = delete;
    FftEngine& operator=(const FftEngine&) = delete;

    /// Physical -> spectral for ncomp stacked components:
    /// u_hat_k = n^-3 sum_x u(x) e^{-i k.x}.
    void forward_real(const double* phys, cplx* spec, int ncomp) {
        std::lock_guard<std::mutex> lock(mu_);
        const std::size_t m = count_ * ncomp;
        for (std::size_t i = 0; i < m; ++i) {
            in_[i][0] = phys[i];
            in_[i][1] = 0.0;
        }
        fftw_execute(ncomp == 3 ? fwd3_ : fwd1_);
        const double scale = 1.0 / static_cast<double>(count_);
        for (std::size_t i = 0; i < m; ++i)
            spec[i] = cplx{out_[i][0] * scale, out_[i][1] * scale};
    }

    /// Spectral -> physical, u(x) = sum_k u_hat_k e^{+i k.x}. Returns the
    /// largest imaginary residue and the largest sample magnitude so the
    /// caller can enforce Hermitian symmetry.
    void inverse_to_real(const cplx* spec, double* phys, int ncomp,
                         double& imag_max, double& abs_max) {
        std::lock_guard<std::mutex> lock(mu_);
        const std::size_t m = count_ * ncomp;
        for (std::size_t i = 0; i < m; ++i) {
            in_[i][0] = spec[i].real();
            in_[i][1] = spec[i].imag();
        }
        fftw_execute(ncomp == 3 ? bwd3_ : bwd1_);
        imag_max = 0.0;
        abs_max = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double re = out_[i][0];
            const double im = out_[i][1];
            phys[i] = re;
            if (std::abs(im) > imag_max) imag_max = std::abs(im);
            if (std::abs(re) > abs_max) abs_max = std::abs(re);
        }
    }

    /// Two real fields per complex transform (internal fast path for the
    /// model evaluations; exact by linearity). Inverse of a_hat + i b_hat
    /// yields a(x) = Re, b(x) = Im. `spec_b`/`phys_b` may be null for a
    /// single field. No symmetry checks here: callers guarantee Hermitian
    /// input by construction.
    void inverse_pair(const cplx* spec_a, const cplx* spec_b, double* phys_a, double* phys_b) {
        std::lock_guard<std::mutex> lock(mu_);
        if (spec_b) {
            for (std::size_t i = 0; i < count_; ++i) {
                in_[i][0] = spec_a[i].real() - spec_b[i].imag();
                in_[i][1] = spec_a[i].imag() + spec_b[i].real();
            }
        } else {
            for (std::size_t i = 0; i < count_; ++i) {
                in_[i][0] = spec_a[i].real();
                in_[i][1] = spec_a[i].imag();
            }
        }
        fftw_execute(bwd1_);
        for (std::size_t i = 0; i < count_; ++i) phys_a[i] = out_[i][0];
        if (phys_b)
            for (std::size_t i = 0; i < count_; ++i) phys_b[i] = out_[i][1];
    }

    /// Forward companion: transforms a + i b in one pass and unpacks the two
    /// Hermitian halves, a_hat_k = (c_k + conj(c_{-k}))/2 and
    /// b_hat_k = (c_k - conj(c_{-k}))/(2i), scaled by n^-3.
    void forward_pair(const double* phys_a, const double* phys_b, cplx* spec_a, cplx* spec_b) {
        std::lock_guard<std::mutex> lock(mu_);
        if (phys_b) {
            for (std::size_t i = 0; i < count_; ++i) {
                in_[i][0] = phys_a[i];
                in_[i][1] = phys_b[i];
            }
        } else {
            for (std::size_t i = 0; i < count_; ++i) {
                in_[i][0] = phys_a[i];
                in_[i][1] = 0.0;
            }
        }
        fftw_execute(fwd1_);
        const double s = 1.0 / static_cast<double>(count_);
        const double half = 0.5 * s;
        if (spec_b) {
            for (std::size_t i = 0; i < count_; ++i) {
                const std::size_t ci = conj_index_[i];
                const double cr = out_[i][0], cim = out_[i][1];
                const double mr = out_[ci][0], mim = out_[ci][1];
                spec_a[i] = cplx{half * (cr + mr), half * (cim - mim)};
                spec_b[i] = cplx{half * (cim + mim), half * (mr - cr)};
            }
        } else {
            for (std::size_t i = 0; i < count_; ++i)
                spec_a[i] = cplx{s * out_[i][0], s * out_[i][1]};
        }
    }

    int n() const { return n_; }

private:
    int n_;
    std::size_t count_;
    fftw_complex* in_ = nullptr;
    fftw_complex* out_ = nullptr;
    fftw_plan fwd1_{}, fwd3_{}, bwd1_{}, bwd3_{};
    std::vector<std::uint32_t> conj_index_;
    std::mutex mu_;
};

/// Process-wide engine cache keyed by grid size.
inline FftEngine& fft_engine_for(const Grid& g) {
    static std::mutex reg_mu;
    static std::map<int, std::unique_ptr<FftEngine>> engines;
#ifdef __GLIBC__
    // Field buffers are a few MB each; keep them on the heap proper instead
    // of per-allocation mmap so freed blocks are reused without page faults.
    static const bool malloc_tuned = [] {
        mallopt(M_MMAP_THRESHOLD, 1 << 30);
        mallopt(M_TRIM_THRESHOLD, 1 << 30);
        return true;
    }();
    (void)malloc_tuned;
#endif
    std::lock_guard<std::mutex> lock(reg_mu);
    auto it = engines.find(g.n);
    if (it == engines.end())
        it = engines.emplace(g.n, std::make_unique<FftEngine>(g.n)).first;
    return *it->second;
}

} // namespace mns
