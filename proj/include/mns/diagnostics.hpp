#pragma once

#include "mns/common.hpp"
#include "mns/field.hpp"
#include "mns/models.hpp"
#include "mns/multipliers.hpp"
#include "mns/spectral_ops.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

namespace mns {

namespace detail {
// |k|^{2s} with fast paths for the handful of exponents the solver uses.
inline double k2_pow(double k2, double s) {
    if (k2 == 0.0) return s == 0.0 ? 1.0 : 0.0;
    if (s == 0.0) return 1.0;
    if (s == 0.5) return std::sqrt(k2);
    if (s == 1.0) return k2;
    if (s == 1.5) return k2 * std::sqrt(k2);
    if (s == 2.0) return k2 * k2;
    if (s == 3.0) return k2 * k2 * k2;
    return std::pow(k2, s);
}
} // namespace detail

/// ||Lambda^s u||_{L^2} = ((2pi)^3 sum_k |k|^{2s} |u_k|^2)^{1/2}.
/// The zero mode contributes only at s = 0 (fields are mean-free anyway).
inline double sobolev_seminorm(const SpectralVectorField& u, double s) {
    const std::size_t m = u.grid.point_count();
    CompensatedSum acc;
    for_each_mode(u.grid, [&](std::size_t idx, int k1, int k2, int k3) {
        const double k2sum = static_cast<double>(k1) * k1 + static_cast<double>(k2) * k2 +
                             static_cast<double>(k3) * k3;
        const double w = detail::k2_pow(k2sum, s);
        if (w == 0.0) return;
        acc.add(w * (std::norm(u.data[idx]) + std::norm(u.data[idx + m]) + std::norm(u.data[idx + 2 * m])));
    });
    return std::sqrt(std::max(0.0, std::pow(two_pi, 3) * acc.value()));
}

inline double sobolev_seminorm(const SpectralScalarField& u, double s) {
    CompensatedSum acc;
    for_each_mode(u.grid, [&](std::size_t idx, int k1, int k2, int k3) {
        const double k2sum = static_cast<double>(k1) * k1 + static_cast<double>(k2) * k2 +
                             static_cast<double>(k3) * k3;
        const double w = detail::k2_pow(k2sum, s);
        if (w == 0.0) return;
        acc.add(w * std::norm(u.c[idx]));
    });
    return std::sqrt(std::max(0.0, std::pow(two_pi, 3) * acc.value()));
}

/// H^m norm via the smooth spectral weight (1+|k|^2)^m. Norm-equivalent to the
/// multi-index derivative sum; the equivalence is a tested property.
inline double hm_norm(const SpectralVectorField& u, int m) {
    if (m < 0) throw error("hm_norm: m must be >= 0");
    const std::size_t mm = u.grid.point_count();
    CompensatedSum acc;
    for_each_mode(u.grid, [&](std::size_t idx, int k1, int k2, int k3) {
        const double k2sum = static_cast<double>(k1) * k1 + static_cast<double>(k2) * k2 +
                             static_cast<double>(k3) * k3;
        double w = 1.0;
        for (int p = 0; p < m; ++p) w *= 1.0 + k2sum;
        acc.add(w * (std::norm(u.data[idx]) + std::norm(u.data[idx + mm]) + std::norm(u.data[idx + 2 * mm])));
    });
    return std::sqrt(std::max(0.0, std::pow(two_pi, 3) * acc.value()));
}

/// Collocation-quadrature L^p norms of the pointwise Euclidean magnitude.
/// p = inf is exact over grid points; p = 3, 6 carry quadrature error and are
/// diagnostics, not assertions.
inline double lp_norm(const PhysicalVectorField& u, double p) {
    const std::size_t m = u.grid.point_count();
    if (std::isinf(p)) return max_point_magnitude(u);
    if (p != 3.0 && p != 6.0) throw error("lp_norm: p must be 3, 6 or inf");
    CompensatedSum acc;
    for (std::size_t i = 0; i < m; ++i) {
        const double a = u.data[i];
        const double b = u.data[i + m];
        const double c = u.data[i + 2 * m];
        const double mag2 = a * a + b * b + c * c;
        acc.add(p == 3.0 ? mag2 * std::sqrt(mag2) : mag2 * mag2 * mag2);
    }
    const double cell = std::pow(two_pi / u.grid.n, 3);
    return std::pow(acc.value() * cell, 1.0 / p);
}

inline double lp_norm(const PhysicalScalarField& u, double p) {
    if (std::isinf(p)) {
        double best = 0.0;
        for (double v : u.s) best = std::max(best, std::abs(v));
        return best;
    }
    if (p != 3.0 && p != 6.0) throw error("lp_norm: p must be 3, 6 or inf");
    CompensatedSum acc;
    for (double v : u.s) {
        const double a = std::abs(v);
        acc.add(p == 3.0 ? a * a * a : a * a * a * a * a * a);
    }
    const double cell = std::pow(two_pi / u.grid.n, 3);
    return std::pow(acc.value() * cell, 1.0 / p);
}

/// max_x Frobenius magnitude of the velocity gradient tensor, computed from
/// the spectral state (three vector transforms).
inline double grad_linf_norm(const SpectralVectorField& u) {
    const std::size_t m = u.grid.point_count();
    std::array<PhysicalVectorField, 3> grad;
    for (int j = 0; j < 3; ++j) {
        SpectralVectorField dj(u.grid);
        for_each_mode(u.grid, [&](std::size_t idx, int k1, int k2, int k3) {
            const int k[3] = {k1, k2, k3};
            const double kj = static_cast<double>(k[j]);
            dj.data[idx] = kj * detail::times_i(u.data[idx]);
            dj.data[idx + m] = kj * detail::times_i(u.data[idx + m]);
            dj.data[idx + 2 * m] = kj * detail::times_i(u.data[idx + 2 * m]);
        });
        grad[j] = inverse_transform(dj);
    }
    double best = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        double f2 = 0.0;
        for (int j = 0; j < 3; ++j)
            for (int c = 0; c < 3; ++c) {
                const double g = grad[j].data[i + static_cast<std::size_t>(c) * m];
                f2 += g * g;
            }
        if (f2 > best) best = f2;
    }
    return std::sqrt(best);
}

/// Per-time diagnostics row. The first sixteen fields are the diagnostics.csv
/// schema in order; the trailing ones are in-memory extras.
struct DiagnosticsRecord {
    double t = 0.0;
    double e_l2 = 0.0;        // 0.5 ||u||^2
    double e_half = 0.0;      // 0.5 ||Lambda^{1/2} u||^2
    double d_half_cum = 0.0;  // int_0^t ||Lambda^{3/2} u||^2 ds (per-step trapezoid)
    double grad_sq = 0.0;     // ||grad u||^2 = ||Lambda u||^2
    double lap_sq = 0.0;      // ||Lap u||^2 = ||Lambda^2 u||^2
    double d3_sq = 0.0;       // ||Lambda^3 u||^2
    double hm = 0.0;          // H^m norm, smooth weight
    double l3 = 0.0;
    double l6 = 0.0;
    double linf = 0.0;
    double grad_linf = 0.0;
    double resid_en = 0.0;    // energy-balance residual (H^{1/2} for mns, L^2 otherwise)
    double cancel = 0.0;      // normalized <N,W>, W = Lambda u (mns) or u (ns/hall)
    double div_max = 0.0;
    double bound_rhs = 0.0;   // log10 of the H^m Gronwall envelope, given C

    double dv_hm_sq = 0.0;    // ||D u||_{H^m}^2, used by the estimate monitors
    std::int64_t step = 0;
};

/// rho(t) = E_half(t) + D_half_cum(t) - E_half(0) from a recorded series.
inline double half_energy_residual(const std::vector<DiagnosticsRecord>& series) {
    if (series.empty()) throw error("half_energy_residual: empty series");
    const auto& last = series.back();
    return (last.e_half + last.d_half_cum) - series.front().e_half;
}

/// Normalized cancellation monitor |<N,W>| / (||N|| ||W||) with
/// W = Lambda u for mns and W = u for the NS forms and Hall, fused into one
/// pass (the volume factors cancel in the ratio). Zero nonlinearity returns 0.
inline double cancellation_value(ModelKind model, const SpectralVectorField& n_term,
                                 const SpectralVectorField& u) {
    require_same_grid(n_term.grid, u.grid, "cancellation_value");
    const bool weighted = (model == ModelKind::mns);
    const std::size_t m = u.grid.point_count();
    CompensatedSum ip, nn, ww;
    for_each_mode(u.grid, [&](std::size_t idx, int k1, int k2, int k3) {
        const double kmag =
            weighted ? std::sqrt(static_cast<double>(k1) * k1 + static_cast<double>(k2) * k2 +
                                 static_cast<double>(k3) * k3)
                     : 1.0;
        double dot = 0.0, en = 0.0, eu = 0.0;
        for (int c = 0; c < 3; ++c) {
            const cplx& a = n_term.data[idx + c * m];
            const cplx& b = u.data[idx + c * m];
            dot += a.real() * b.real() + a.imag() * b.imag();
            en += std::norm(a);
            eu += std::norm(b);
        }
        ip.add(kmag * dot);
        nn.add(en);
        ww.add(kmag * kmag * eu);
    });
    const double denom = std::sqrt(std::max(0.0, nn.value())) * std::sqrt(std::max(0.0, ww.value()));
    if (denom == 0.0) return 0.0;
    return std::abs(ip.value()) / denom;
}

inline double cancellation_check(ModelKind model, const SpectralVectorField& u,
                                 RieszSign sigma = RieszSign::positive) {
    return cancellation_value(model, nonlinear_term(model, u, sigma).term, u);
}

/// One monitored inequality, log10 both sides. ratio = LHS/RHS saturates to 0
/// or inf; ratio <= 1 means the inequality holds for the supplied C.
struct MonitorSample {
    double t = 0.0;
    double log10_lhs = 0.0;
    double log10_rhs = 0.0;
    double ratio = 0.0;
};

struct MonitorSeries {
    std::string name;
    std::vector<MonitorSample> samples;
};

struct MonitorReport {
    double constant_c = 1.0;
    int sobolev_m = 3;
    // L2, H1, H2 a-priori estimates and the final H^m bound (Gronwall
    // envelope form evaluated from the recorded series).
    std::vector<MonitorSeries> series;
    // Closed-form initial-data bound for the H^m estimate; the tower of
    // exponentials overflows log space for energetic data, in which case the
    // entry is +inf and the top exponent tells by how much.
    double closed_form_log10_rhs = 0.0;
    double closed_form_top_exponent = 0.0;
};

namespace detail {

inline double safe_log10(double x) {
    if (x <= 0.0) return -std::numeric_limits<double>::infinity();
    return std::log10(x);
}

inline double ratio_from_logs(double l_lhs, double l_rhs) {
    if (std::isinf(l_rhs) && l_rhs > 0) return 0.0;
    if (std::isinf(l_lhs) && l_lhs < 0) return 0.0;
    return std::pow(10.0, l_lhs - l_rhs);
}

} // namespace detail

/// Evaluate the a-priori estimates along a recorded series for a user-supplied
/// generic constant C. Report only; nothing here asserts. Integrals over the
/// series use the trapezoid rule on the recorded rows.
inline MonitorReport estimate_monitors(const std::vector<DiagnosticsRecord>& series, double c_const,
                                       int sobolev_m = 3) {
    if (!(c_const > 0.0)) throw error("estimate_monitors: C must be > 0");
    if (series.empty()) throw error("estimate_monitors: empty series");

    MonitorReport rep;
    rep.constant_c = c_const;
    rep.sobolev_m = sobolev_m;

    const double ln10 = std::log(10.0);
    const auto& first = series.front();
    const double l2sq_0 = 2.0 * first.e_l2;
    const double half_sq_0 = 2.0 * first.e_half;
    const double grad_sq_0 = first.grad_sq;
    const double hm_sq_0 = first.hm * first.hm;

    MonitorSeries l2s{"l2_estimate", {}};      // ||v(t)||^2 + int ||grad v||^2 <= ||v0||^2 exp(C ||L^1/2 v0||^2)
    MonitorSeries h1s{"h1_estimate", {}};      // ||L v(t)||^2 + int ||Lap v||^2 <= ||L v0||^2 exp(C ||L^1/2 v0||^2)
    MonitorSeries h2s{"h2_estimate", {}};      // ||L^2 v(t)||^2 + int ||L^3 v||^2 <= ||L v0||^2 exp{C t ...}
    MonitorSeries hms{"hm_envelope", {}};      // ||v||_Hm^2 + int ||Dv||_Hm^2 <= ||v0||_Hm^2 exp(C int (linf^2+grad_linf^2))

    const double log10_rhs_l2 = detail::safe_log10(l2sq_0) + c_const * half_sq_0 / ln10;
    const double log10_rhs_h1 = detail::safe_log10(grad_sq_0) + c_const * half_sq_0 / ln10;

    double int_grad = 0.0, int_lap = 0.0, int_d3 = 0.0, int_env = 0.0, int_dvhm = 0.0;
    for (std::size_t i = 0; i < series.size(); ++i) {
        const auto& r = series[i];
        if (i > 0) {
            const auto& p = series[i - 1];
            const double h = r.t - p.t;
            int_grad += 0.5 * h * (p.grad_sq + r.grad_sq);
            int_lap += 0.5 * h * (p.lap_sq + r.lap_sq);
            int_d3 += 0.5 * h * (p.d3_sq + r.d3_sq);
            int_env += 0.5 * h * ((p.linf * p.linf + p.grad_linf * p.grad_linf) +
                                  (r.linf * r.linf + r.grad_linf * r.grad_linf));
            int_dvhm += 0.5 * h * (p.dv_hm_sq + r.dv_hm_sq);
        }

        const bool zero_data = (l2sq_0 == 0.0);

        MonitorSample a;
        a.t = r.t;
        a.log10_lhs = detail::safe_log10(2.0 * r.e_l2 + int_grad);
        a.log10_rhs = log10_rhs_l2;
        a.ratio = zero_data ? 0.0 : detail::ratio_from_logs(a.log10_lhs, a.log10_rhs);
        l2s.samples.push_back(a);

        MonitorSample b;
        b.t = r.t;
        b.log10_lhs = detail::safe_log10(r.grad_sq + int_lap);
        b.log10_rhs = log10_rhs_h1;
        b.ratio = zero_data ? 0.0 : detail::ratio_from_logs(b.log10_lhs, b.log10_rhs);
        h1s.samples.push_back(b);

        MonitorSample c;
        c.t = r.t;
        c.log10_lhs = detail::safe_log10(r.lap_sq + int_d3);
        c.log10_rhs = detail::safe_log10(grad_sq_0) +
                      c_const * r.t * l2sq_0 * std::exp(c_const * half_sq_0) * grad_sq_0 *
                          std::exp(c_const * half_sq_0) / ln10;
        c.ratio = zero_data ? 0.0 : detail::ratio_from_logs(c.log10_lhs, c.log10_rhs);
        h2s.samples.push_back(c);

        MonitorSample d;
        d.t = r.t;
        d.log10_lhs = detail::safe_log10(r.hm * r.hm + int_dvhm);
        d.log10_rhs = detail::safe_log10(hm_sq_0) + c_const * int_env / ln10;
        d.ratio = zero_data ? 0.0 : detail::ratio_from_logs(d.log10_lhs, d.log10_rhs);
        hms.samples.push_back(d);
    }

    // Closed-form initial-data bound at the final time, log10, saturating.
    {
        const double t_end = series.back().t;
        const double inner = std::exp(c_const * half_sq_0);
        rep.closed_form_top_exponent =
            c_const * t_end * l2sq_0 * inner * grad_sq_0 * inner;
        rep.closed_form_log10_rhs = detail::safe_log10(hm_sq_0) +
                                    (t_end * l2sq_0 * inner + grad_sq_0 * std::exp(rep.closed_form_top_exponent)) / ln10;
        if (l2sq_0 == 0.0) {
            rep.closed_form_top_exponent = 0.0;
            rep.closed_form_log10_rhs = -std::numeric_limits<double>::infinity();
        }
    }

    rep.series = {std::move(l2s), std::move(h1s), std::move(h2s), std::move(hms)};
    return rep;
}

} // namespace mns
