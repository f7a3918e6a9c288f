#pragma once

#include "mns/common.hpp"
#include "mns/fft.hpp"
#include "mns/field.hpp"
#include "mns/grid.hpp"

#include <array>
#include <cmath>
#include <vector>

namespace mns {

namespace detail {

inline void check_finite(const double* s, std::size_t m, const char* where) {
    for (std::size_t i = 0; i < m; ++i)
        if (!std::isfinite(s[i]))
            throw error(std::string(where) + ": non-finite sample at linear index " + std::to_string(i));
}

// Inverse transforms must only ever see Hermitian-symmetric input (a real
// field). The residue of legitimate data sits at the rounding floor; broken
// symmetry shows up at O(1) of the field size.
inline void check_hermitian_residue(double imag_max, double abs_max, const char* where) {
    if (imag_max > 1e-10 * (abs_max + imag_max))
        throw error(std::string(where) + ": input is not Hermitian-symmetric (imaginary residue " +
                    std::to_string(imag_max) + " vs sample scale " + std::to_string(abs_max) + ")");
}

// Batched component transforms, two real fields per complex pass. Internal
// fast path for the model evaluations; the checked single-field API below is
// the public contract.
inline void inverse_components(const Grid& g, const std::vector<const cplx*>& spec,
                               const std::vector<double*>& phys) {
    FftEngine& eng = fft_engine_for(g);
    std::size_t i = 0;
    for (; i + 1 < spec.size(); i += 2) eng.inverse_pair(spec[i], spec[i + 1], phys[i], phys[i + 1]);
    if (i < spec.size()) eng.inverse_pair(spec[i], nullptr, phys[i], nullptr);
}

inline void forward_components(const Grid& g, const std::vector<const double*>& phys,
                               const std::vector<cplx*>& spec) {
    FftEngine& eng = fft_engine_for(g);
    std::size_t i = 0;
    for (; i + 1 < phys.size(); i += 2) eng.forward_pair(phys[i], phys[i + 1], spec[i], spec[i + 1]);
    if (i < phys.size()) eng.forward_pair(phys[i], nullptr, spec[i], nullptr);
}

} // namespace detail

inline SpectralScalarField forward_transform(const PhysicalScalarField& p) {
    detail::check_finite(p.s.data(), p.s.size(), "forward_transform");
    SpectralScalarField out(p.grid);
    fft_engine_for(p.grid).forward_real(p.s.data(), out.c.data(), 1);
    return out;
}

inline SpectralVectorField forward_transform(const PhysicalVectorField& p) {
    detail::check_finite(p.data.data(), p.data.size(), "forward_transform");
    SpectralVectorField out(p.grid);
    fft_engine_for(p.grid).forward_real(p.data.data(), out.data.data(), 3);
    return out;
}

inline PhysicalScalarField inverse_transform(const SpectralScalarField& s) {
    PhysicalScalarField out(s.grid);
    double imag_max = 0.0, abs_max = 0.0;
    fft_engine_for(s.grid).inverse_to_real(s.c.data(), out.s.data(), 1, imag_max, abs_max);
    detail::check_hermitian_residue(imag_max, abs_max, "inverse_transform");
    return out;
}

inline PhysicalVectorField inverse_transform(const SpectralVectorField& s) {
    PhysicalVectorField out(s.grid);
    double imag_max = 0.0, abs_max = 0.0;
    fft_engine_for(s.grid).inverse_to_real(s.data.data(), out.data.data(), 3, imag_max, abs_max);
    detail::check_hermitian_residue(imag_max, abs_max, "inverse_transform");
    return out;
}

/// 2/3-rule truncation: zero every mode with any |k_j| > K and the zero mode.
inline void dealias_inplace(SpectralScalarField& s) {
    for_each_mode(s.grid, [&](std::size_t idx, int k1, int k2, int k3) {
        if (!s.grid.in_dealias_band(k1, k2, k3) || (k1 == 0 && k2 == 0 && k3 == 0))
            s.c[idx] = cplx{0.0, 0.0};
    });
}

inline void dealias_inplace(SpectralVectorField& s) {
    const std::size_t m = s.grid.point_count();
    for_each_mode(s.grid, [&](std::size_t idx, int k1, int k2, int k3) {
        if (!s.grid.in_dealias_band(k1, k2, k3) || (k1 == 0 && k2 == 0 && k3 == 0)) {
            s.data[idx] = cplx{0.0, 0.0};
            s.data[idx + m] = cplx{0.0, 0.0};
            s.data[idx + 2 * m] = cplx{0.0, 0.0};
        }
    });
}

inline SpectralScalarField dealias(SpectralScalarField s) {
    dealias_inplace(s);
    return s;
}

inline SpectralVectorField dealias(SpectralVectorField s) {
    dealias_inplace(s);
    return s;
}

/// L2 inner product on the coefficient side: <a,b> = (2pi)^3 sum_k a_k conj(b_k),
/// summed over components for vector fields. Real part returned; it is the
/// whole value for Hermitian-symmetric fields.
inline double l2_inner(const SpectralScalarField& a, const SpectralScalarField& b) {
    require_same_grid(a.grid, b.grid, "l2_inner");
    CompensatedSum acc;
    for (std::size_t i = 0; i < a.c.size(); ++i)
        acc.add(a.c[i].real() * b.c[i].real() + a.c[i].imag() * b.c[i].imag());
    return std::pow(two_pi, 3) * acc.value();
}

inline double l2_inner(const SpectralVectorField& a, const SpectralVectorField& b) {
    require_same_grid(a.grid, b.grid, "l2_inner");
    CompensatedSum acc;
    for (std::size_t i = 0; i < a.data.size(); ++i)
        acc.add(a.data[i].real() * b.data[i].real() + a.data[i].imag() * b.data[i].imag());
    return std::pow(two_pi, 3) * acc.value();
}

template <typename Field>
inline double l2_norm(const Field& a) {
    return std::sqrt(std::max(0.0, l2_inner(a, a)));
}

/// Coefficient-side sum n^-3 sum_x u(x)^2 companion for Parseval checks.
inline double physical_mean_square(const PhysicalScalarField& p) {
    CompensatedSum acc;
    for (double v : p.s) acc.add(v * v);
    return acc.value() / static_cast<double>(p.grid.point_count());
}

inline double spectral_sum_square(const SpectralScalarField& s) {
    CompensatedSum acc;
    for (const auto& z : s.c) acc.add(z.real() * z.real() + z.imag() * z.imag());
    return acc.value();
}

namespace detail {

inline void cross_into(const PhysicalVectorField& u, const PhysicalVectorField& w,
                       PhysicalVectorField& out) {
    const std::size_t m = u.grid.point_count();
    const double* u1 = u.data.data();
    const double* u2 = u1 + m;
    const double* u3 = u2 + m;
    const double* w1 = w.data.data();
    const double* w2 = w1 + m;
    const double* w3 = w2 + m;
    double* o1 = out.data.data();
    double* o2 = o1 + m;
    double* o3 = o2 + m;
    for (std::size_t i = 0; i < m; ++i) {
        o1[i] = u2[i] * w3[i] - u3[i] * w2[i];
        o2[i] = u3[i] * w1[i] - u1[i] * w3[i];
        o3[i] = u1[i] * w2[i] - u2[i] * w1[i];
    }
}

inline void advective_into(const PhysicalVectorField& u,
                           const std::array<PhysicalVectorField, 3>& grad, PhysicalVectorField& out) {
    const std::size_t m = u.grid.point_count();
    for (int c = 0; c < 3; ++c) {
        double* o = out.data.data() + static_cast<std::size_t>(c) * m;
        const double* u0 = u.data.data();
        const double* g0 = grad[0].data.data() + static_cast<std::size_t>(c) * m;
        const double* u1 = u.data.data() + m;
        const double* g1 = grad[1].data.data() + static_cast<std::size_t>(c) * m;
        const double* u2 = u.data.data() + 2 * m;
        const double* g2 = grad[2].data.data() + static_cast<std::size_t>(c) * m;
        for (std::size_t i = 0; i < m; ++i) o[i] = u0[i] * g0[i] + u1[i] * g1[i] + u2[i] * g2[i];
    }
}

} // namespace detail

inline PhysicalVectorField pointwise_cross(const PhysicalVectorField& u, const PhysicalVectorField& w) {
    require_same_grid(u.grid, w.grid, "pointwise_cross");
    PhysicalVectorField out(u.grid);
    detail::cross_into(u, w, out);
    return out;
}

inline PhysicalScalarField pointwise_dot(const PhysicalVectorField& u, const PhysicalVectorField& w) {
    require_same_grid(u.grid, w.grid, "pointwise_dot");
    PhysicalScalarField out(u.grid);
    const std::size_t m = u.grid.point_count();
    for (std::size_t i = 0; i < m; ++i)
        out.s[i] = u.data[i] * w.data[i] + u.data[i + m] * w.data[i + m] +
                   u.data[i + 2 * m] * w.data[i + 2 * m];
    return out;
}

/// (u . grad) u from u and its physical-space gradient; grad[j] holds the
/// vector field d_j u.
inline PhysicalVectorField advective_product(const PhysicalVectorField& u,
                                             const std::array<PhysicalVectorField, 3>& grad) {
    for (const auto& gj : grad) require_same_grid(u.grid, gj.grid, "advective_product");
    PhysicalVectorField out(u.grid);
    detail::advective_into(u, grad, out);
    return out;
}

/// Largest pointwise Euclidean magnitude, exact over grid points.
inline double max_point_magnitude(const PhysicalVectorField& u) {
    const std::size_t m = u.grid.point_count();
    double best = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double a = u.data[i];
        const double b = u.data[i + m];
        const double c = u.data[i + 2 * m];
        const double mag2 = a * a + b * b + c * c;
        if (mag2 > best) best = mag2;
    }
    return std::sqrt(best);
}

/// max_k |k . u_hat_k|, the divergence monitor of the coefficient data.
inline double divergence_max(const SpectralVectorField& u) {
    const std::size_t m = u.grid.point_count();
    double best = 0.0;
    for_each_mode(u.grid, [&](std::size_t idx, int k1, int k2, int k3) {
        const cplx d = static_cast<double>(k1) * u.data[idx] +
                       static_cast<double>(k2) * u.data[idx + m] +
                       static_cast<double>(k3) * u.data[idx + 2 * m];
        const double a = std::abs(d);
        if (a > best) best = a;
    });
    return best;
}

inline double zero_mode_magnitude(const SpectralVectorField& u) {
    const std::size_t m = u.grid.point_count();
    return std::abs(u.data[0]) + std::abs(u.data[m]) + std::abs(u.data[2 * m]);
}

} // namespace mns
