#pragma once

#include "mns/common.hpp"
#include "mns/field.hpp"
#include "mns/grid.hpp"

#include <cmath>

namespace mns {

/// Sign convention of the Riesz symbol sigma * i * k_j / |k|. The default +1
/// matches the transform convention the operators are derived under; the knob
/// exists because the opposite convention flips the symbol. Recorded in run
/// metadata and snapshot headers.
enum class RieszSign : int {
    positive = +1,
    negative = -1,
};

inline int to_int(RieszSign s) { return static_cast<int>(s); }

inline RieszSign riesz_sign_from_int(int v) {
    if (v == 1) return RieszSign::positive;
    if (v == -1) return RieszSign::negative;
    throw error("riesz_sign must be +1 or -1 (got " + std::to_string(v) + ")");
}

namespace detail {
inline cplx times_i(const cplx& z) { return cplx{-z.imag(), z.real()}; }
} // namespace detail

/// Lambda^a: u_hat_k -> |k|^a u_hat_k, zero at k = 0.
inline SpectralScalarField lambda_pow(const SpectralScalarField& s, double a) {
    SpectralScalarField out(s.grid);
    for_each_mode(s.grid, [&](std::size_t idx, int k1, int k2, int k3) {
        const double k2sum = static_cast<double>(k1) * k1 + static_cast<double>(k2) * k2 +
                             static_cast<double>(k3) * k3;
        out.c[idx] = (k2sum == 0.0) ? cplx{0.0, 0.0} : std::pow(k2sum, 0.5 * a) * s.c[idx];
    });
    return out;
}

inline SpectralVectorField lambda_pow(const SpectralVectorField& s, double a) {
    SpectralVectorField out(s.grid);
    const std::size_t m = s.grid.point_count();
    for_each_mode(s.grid, [&](std::size_t idx, int k1, int k2, int k3) {
        const double k2sum = static_cast<double>(k1) * k1 + static_cast<double>(k2) * k2 +
                             static_cast<double>(k3) * k3;
        const double w = (k2sum == 0.0) ? 0.0 : std::pow(k2sum, 0.5 * a);
        out.data[idx] = w * s.data[idx];
        out.data[idx + m] = w * s.data[idx + m];
        out.data[idx + 2 * m] = w * s.data[idx + 2 * m];
    });
    return out;
}

/// Riesz transform along axis j: u_hat_k -> sigma i (k_j/|k|) u_hat_k, zero at k = 0.
inline SpectralScalarField riesz(const SpectralScalarField& s, int j, RieszSign sigma = RieszSign::positive) {
    if (j < 0 || j > 2) throw error("riesz: axis must be 0, 1 or 2");
    SpectralScalarField out(s.grid);
    const double sg = static_cast<double>(to_int(sigma));
    for_each_mode(s.grid, [&](std::size_t idx, int k1, int k2, int k3) {
        const int k[3] = {k1, k2, k3};
        const double k2sum = static_cast<double>(k1) * k1 + static_cast<double>(k2) * k2 +
                             static_cast<double>(k3) * k3;
        if (k2sum == 0.0) {
            out.c[idx] = cplx{0.0, 0.0};
        } else {
            const double w = sg * static_cast<double>(k[j]) / std::sqrt(k2sum);
            out.c[idx] = w * detail::times_i(s.c[idx]);
        }
    });
    return out;
}

/// d/dx_j: u_hat_k -> i k_j u_hat_k.
inline SpectralScalarField partial_derivative(const SpectralScalarField& s, int j) {
    if (j < 0 || j > 2) throw error("partial_derivative: axis must be 0, 1 or 2");
    SpectralScalarField out(s.grid);
    for_each_mode(s.grid, [&](std::size_t idx, int k1, int k2, int k3) {
        const int k[3] = {k1, k2, k3};
        out.c[idx] = static_cast<double>(k[j]) * detail::times_i(s.c[idx]);
    });
    return out;
}

namespace detail {

// Preallocated-output variants for the evaluation hot path.

inline void partial_into(const SpectralVectorField& s, int j, SpectralVectorField& out) {
    const std::size_t m = s.grid.point_count();
    for_each_mode(s.grid, [&](std::size_t idx, int k1, int k2, int k3) {
        const int k[3] = {k1, k2, k3};
        const double kj = static_cast<double>(k[j]);
        out.data[idx] = kj * times_i(s.data[idx]);
        out.data[idx + m] = kj * times_i(s.data[idx + m]);
        out.data[idx + 2 * m] = kj * times_i(s.data[idx + 2 * m]);
    });
}

inline void curl_into(const SpectralVectorField& s, SpectralVectorField& out) {
    const std::size_t m = s.grid.point_count();
    for_each_mode(s.grid, [&](std::size_t idx, int k1, int k2, int k3) {
        const cplx u1 = s.data[idx], u2 = s.data[idx + m], u3 = s.data[idx + 2 * m];
        out.data[idx] = times_i(static_cast<double>(k2) * u3 - static_cast<double>(k3) * u2);
        out.data[idx + m] = times_i(static_cast<double>(k3) * u1 - static_cast<double>(k1) * u3);
        out.data[idx + 2 * m] = times_i(static_cast<double>(k1) * u2 - static_cast<double>(k2) * u1);
    });
}

inline void minus_curl_inplace(SpectralVectorField& s) {
    const std::size_t m = s.grid.point_count();
    for_each_mode(s.grid, [&](std::size_t idx, int k1, int k2, int k3) {
        const cplx u1 = s.data[idx], u2 = s.data[idx + m], u3 = s.data[idx + 2 * m];
        s.data[idx] = -times_i(static_cast<double>(k2) * u3 - static_cast<double>(k3) * u2);
        s.data[idx + m] = -times_i(static_cast<double>(k3) * u1 - static_cast<double>(k1) * u3);
        s.data[idx + 2 * m] = -times_i(static_cast<double>(k1) * u2 - static_cast<double>(k2) * u1);
    });
}

inline void minus_riesz_cross_inplace(SpectralVectorField& s, RieszSign sigma) {
    const std::size_t m = s.grid.point_count();
    const double sg = static_cast<double>(to_int(sigma));
    for_each_mode(s.grid, [&](std::size_t idx, int k1, int k2, int k3) {
        const double k2sum = static_cast<double>(k1) * k1 + static_cast<double>(k2) * k2 +
                             static_cast<double>(k3) * k3;
        if (k2sum == 0.0) {
            s.data[idx] = s.data[idx + m] = s.data[idx + 2 * m] = cplx{0.0, 0.0};
            return;
        }
        const double inv = sg / std::sqrt(k2sum);
        const double m1 = k1 * inv, m2 = k2 * inv, m3 = k3 * inv;
        const cplx u1 = s.data[idx], u2 = s.data[idx + m], u3 = s.data[idx + 2 * m];
        s.data[idx] = -times_i(m2 * u3 - m3 * u2);
        s.data[idx + m] = -times_i(m3 * u1 - m1 * u3);
        s.data[idx + 2 * m] = -times_i(m1 * u2 - m2 * u1);
    });
}

} // namespace detail

/// d/dx_j applied to every component of a vector field.
inline SpectralVectorField partial_derivative(const SpectralVectorField& s, int j) {
    if (j < 0 || j > 2) throw error("partial_derivative: axis must be 0, 1 or 2");
    SpectralVectorField out(s.grid);
    detail::partial_into(s, j, out);
    return out;
}

inline SpectralVectorField gradient(const SpectralScalarField& s) {
    SpectralVectorField out(s.grid);
    const std::size_t m = s.grid.point_count();
    for_each_mode(s.grid, [&](std::size_t idx, int k1, int k2, int k3) {
        const cplx iz = detail::times_i(s.c[idx]);
        out.data[idx] = static_cast<double>(k1) * iz;
        out.data[idx + m] = static_cast<double>(k2) * iz;
        out.data[idx + 2 * m] = static_cast<double>(k3) * iz;
    });
    return out;
}

/// curl: u_hat_k -> i k x u_hat_k.
inline SpectralVectorField curl_vec(const SpectralVectorField& s) {
    SpectralVectorField out(s.grid);
    detail::curl_into(s, out);
    return out;
}

/// div: u_hat_k -> i k . u_hat_k.
inline SpectralScalarField divergence(const SpectralVectorField& s) {
    SpectralScalarField out(s.grid);
    const std::size_t m = s.grid.point_count();
    for_each_mode(s.grid, [&](std::size_t idx, int k1, int k2, int k3) {
        out.c[idx] = detail::times_i(static_cast<double>(k1) * s.data[idx] +
                                     static_cast<double>(k2) * s.data[idx + m] +
                                     static_cast<double>(k3) * s.data[idx + 2 * m]);
    });
    return out;
}

/// R x : u_hat_k -> sigma (i k / |k|) x u_hat_k, zero at k = 0. Output is
/// solenoidal mode by mode, and Lambda^1 (R x u) = sigma curl u exactly.
inline SpectralVectorField riesz_cross(const SpectralVectorField& s, RieszSign sigma = RieszSign::positive) {
    SpectralVectorField out(s.grid);
    const std::size_t m = s.grid.point_count();
    const double sg = static_cast<double>(to_int(sigma));
    for_each_mode(s.grid, [&](std::size_t idx, int k1, int k2, int k3) {
        const double k2sum = static_cast<double>(k1) * k1 + static_cast<double>(k2) * k2 +
                             static_cast<double>(k3) * k3;
        if (k2sum == 0.0) {
            out.data[idx] = out.data[idx + m] = out.data[idx + 2 * m] = cplx{0.0, 0.0};
            return;
        }
        const double inv = sg / std::sqrt(k2sum);
        const double m1 = k1 * inv, m2 = k2 * inv, m3 = k3 * inv;
        const cplx u1 = s.data[idx], u2 = s.data[idx + m], u3 = s.data[idx + 2 * m];
        out.data[idx] = detail::times_i(m2 * u3 - m3 * u2);
        out.data[idx + m] = detail::times_i(m3 * u1 - m1 * u3);
        out.data[idx + 2 * m] = detail::times_i(m1 * u2 - m2 * u1);
    });
    return out;
}

/// Leray projection: u_hat_k -> (I - k k^T/|k|^2) u_hat_k, zero at k = 0.
/// Idempotent, fixes solenoidal fields, annihilates gradients.
inline SpectralVectorField leray_project(const SpectralVectorField& s) {
    SpectralVectorField out(s.grid);
    const std::size_t m = s.grid.point_count();
    for_each_mode(s.grid, [&](std::size_t idx, int k1, int k2, int k3) {
        const double k2sum = static_cast<double>(k1) * k1 + static_cast<double>(k2) * k2 +
                             static_cast<double>(k3) * k3;
        if (k2sum == 0.0) {
            out.data[idx] = out.data[idx + m] = out.data[idx + 2 * m] = cplx{0.0, 0.0};
            return;
        }
        const cplx u1 = s.data[idx], u2 = s.data[idx + m], u3 = s.data[idx + 2 * m];
        const cplx kdotu = (static_cast<double>(k1) * u1 + static_cast<double>(k2) * u2 +
                            static_cast<double>(k3) * u3) /
                           k2sum;
        out.data[idx] = u1 - static_cast<double>(k1) * kdotu;
        out.data[idx + m] = u2 - static_cast<double>(k2) * kdotu;
        out.data[idx + 2 * m] = u3 - static_cast<double>(k3) * kdotu;
    });
    return out;
}

inline void leray_project_inplace(SpectralVectorField& s) {
    const std::size_t m = s.grid.point_count();
    for_each_mode(s.grid, [&](std::size_t idx, int k1, int k2, int k3) {
        const double k2sum = static_cast<double>(k1) * k1 + static_cast<double>(k2) * k2 +
                             static_cast<double>(k3) * k3;
        if (k2sum == 0.0) {
            s.data[idx] = s.data[idx + m] = s.data[idx + 2 * m] = cplx{0.0, 0.0};
            return;
        }
        const cplx kdotu = (static_cast<double>(k1) * s.data[idx] + static_cast<double>(k2) * s.data[idx + m] +
                            static_cast<double>(k3) * s.data[idx + 2 * m]) /
                           k2sum;
        s.data[idx] -= static_cast<double>(k1) * kdotu;
        s.data[idx + m] -= static_cast<double>(k2) * kdotu;
        s.data[idx + 2 * m] -= static_cast<double>(k3) * kdotu;
    });
}

/// Heat semigroup factor: u_hat_k -> e^{-|k|^2 tau} u_hat_k, tau >= 0.
inline SpectralScalarField heat_factor(const SpectralScalarField& s, double tau) {
    if (!(tau >= 0.0)) throw error("heat_factor: tau must be >= 0");
    SpectralScalarField out(s.grid);
    for_each_mode(s.grid, [&](std::size_t idx, int k1, int k2, int k3) {
        const double k2sum = static_cast<double>(k1) * k1 + static_cast<double>(k2) * k2 +
                             static_cast<double>(k3) * k3;
        out.c[idx] = std::exp(-k2sum * tau) * s.c[idx];
    });
    return out;
}

inline SpectralVectorField heat_factor(const SpectralVectorField& s, double tau) {
    if (!(tau >= 0.0)) throw error("heat_factor: tau must be >= 0");
    SpectralVectorField out(s.grid);
    const std::size_t m = s.grid.point_count();
    for_each_mode(s.grid, [&](std::size_t idx, int k1, int k2, int k3) {
        const double k2sum = static_cast<double>(k1) * k1 + static_cast<double>(k2) * k2 +
                             static_cast<double>(k3) * k3;
        const double w = std::exp(-k2sum * tau);
        out.data[idx] = w * s.data[idx];
        out.data[idx + m] = w * s.data[idx + m];
        out.data[idx + 2 * m] = w * s.data[idx + 2 * m];
    });
    return out;
}

} // namespace mns
