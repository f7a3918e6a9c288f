#pragma once

#include "mns/common.hpp"
#include "mns/diagnostics.hpp"
#include "mns/initial_conditions.hpp"
#include "mns/models.hpp"
#include "mns/multipliers.hpp"
#include "mns/spectral_ops.hpp"

#include <cstdint>
#include <iostream>
#include <random>
#include <string>
#include <vector>

namespace mns {

/// General random zero-mean Hermitian dealiased field (not solenoidal unless
/// requested); the raw material of the identity suite. Same generator
/// contract as random_solenoidal.
inline SpectralVectorField random_hermitian_field(const Grid& grid, std::uint64_t seed,
                                                  bool solenoidal = false) {
    const int K = grid.dealias_cutoff;
    std::mt19937_64 rng(seed);
    auto uniform = [&rng]() { return (static_cast<double>(rng() >> 11) + 0.5) * 0x1p-53; };
    auto normal_pair = [&](double& z0, double& z1) {
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        z0 = r * std::cos(two_pi * u2);
        z1 = r * std::sin(two_pi * u2);
    };
    SpectralVectorField v(grid);
    const std::size_t m = grid.point_count();
    const double k0 = std::max(1.0, K / 2.0);
    for (int k3 = 0; k3 <= K; ++k3)
        for (int k2 = -K; k2 <= K; ++k2)
            for (int k1 = -K; k1 <= K; ++k1) {
                const bool canonical = k3 > 0 || (k3 == 0 && k2 > 0) || (k3 == 0 && k2 == 0 && k1 > 0);
                if (!canonical) continue;
                const double kmag = std::sqrt(static_cast<double>(k1) * k1 +
                                              static_cast<double>(k2) * k2 +
                                              static_cast<double>(k3) * k3);
                const double amp = std::exp(-(kmag / k0) * (kmag / k0));
                double z[6];
                normal_pair(z[0], z[1]);
                normal_pair(z[2], z[3]);
                normal_pair(z[4], z[5]);
                const std::size_t idx = grid.linear_index(grid.index_of(k1), grid.index_of(k2),
                                                          grid.index_of(k3));
                const std::size_t cid = grid.linear_index(grid.index_of(-k1), grid.index_of(-k2),
                                                          grid.index_of(-k3));
                for (int c = 0; c < 3; ++c) {
                    const cplx val{amp * z[2 * c], amp * z[2 * c + 1]};
                    v.data[idx + c * m] = val;
                    v.data[cid + c * m] = std::conj(val);
                }
            }
    if (solenoidal) leray_project_inplace(v);
    dealias_inplace(v);
    return v;
}

struct CheckResult {
    std::string name;
    double worst = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

namespace detail {

inline double rel_diff(const SpectralVectorField& a, const SpectralVectorField& b, double denom) {
    SpectralVectorField d = a;
    axpy(d, -1.0, b);
    return denom > 0.0 ? l2_norm(d) / denom : l2_norm(d);
}

inline SpectralVectorField riesz_componentwise_square_sum(const SpectralVectorField& u, RieszSign s) {
    SpectralVectorField out(u.grid);
    for (int c = 0; c < 3; ++c) {
        SpectralScalarField comp(u.grid);
        std::copy(u.comp(c).begin(), u.comp(c).end(), comp.c.begin());
        SpectralScalarField acc(u.grid);
        for (int j = 0; j < 3; ++j) {
            SpectralScalarField rr = riesz(riesz(comp, j, s), j, s);
            for (std::size_t i = 0; i < acc.c.size(); ++i) acc.c[i] += rr.c[i];
        }
        std::copy(acc.c.begin(), acc.c.end(),
                  out.data.begin() + static_cast<std::size_t>(c) * u.grid.point_count());
    }
    return out;
}

} // namespace detail

/// The operator-identity battery: `fields` seeded random fields on an n-point
/// grid, every identity checked to 1e-12 relative.
inline std::vector<CheckResult> verify_identities(int n = 16, int fields = 100,
                                                  std::uint64_t seed_base = 20240801u) {
    const Grid grid = Grid::make(n);
    const double tol = 1e-12;

    CheckResult riesz_sq{"riesz_squares_sum_is_minus_identity", 0.0, tol, false};
    CheckResult rxrx{"riesz_cross_twice_equals_leray", 0.0, tol, false};
    CheckResult lam_rx{"lambda_riesz_cross_equals_sigma_curl", 0.0, tol, false};
    CheckResult div_rx{"divergence_of_riesz_cross_vanishes", 0.0, tol, false};
    CheckResult lam_comp{"lambda_power_composition", 0.0, tol, false};
    CheckResult heat_semi{"heat_semigroup_law", 0.0, tol, false};

    for (int f = 0; f < fields; ++f) {
        SpectralVectorField u = random_hermitian_field(grid, seed_base + static_cast<std::uint64_t>(f));
        const double nu = l2_norm(u);

        for (RieszSign s : {RieszSign::positive, RieszSign::negative}) {
            SpectralVectorField r2 = detail::riesz_componentwise_square_sum(u, s);
            riesz_sq.worst = std::max(riesz_sq.worst, detail::rel_diff(r2, scaled(u, -1.0), nu));

            SpectralVectorField lhs = riesz_cross(riesz_cross(u, s), s);
            rxrx.worst = std::max(rxrx.worst, detail::rel_diff(lhs, leray_project(u), nu));

            SpectralVectorField curl_u = curl_vec(u);
            SpectralVectorField lam_rx_u = lambda_pow(riesz_cross(u, s), 1.0);
            lam_rx.worst = std::max(
                lam_rx.worst,
                detail::rel_diff(lam_rx_u, scaled(curl_u, static_cast<double>(to_int(s))), l2_norm(curl_u)));

            const double div_rel = l2_norm(divergence(riesz_cross(u, s))) /
                                   std::max(1e-300, sobolev_seminorm(u, 1.0));
            div_rx.worst = std::max(div_rx.worst, div_rel);
        }

        for (auto [a, b] : {std::pair<double, double>{0.5, 0.5}, {1.0, 0.5}, {-0.5, 1.5}}) {
            SpectralVectorField lhs = lambda_pow(lambda_pow(u, a), b);
            SpectralVectorField rhs = lambda_pow(u, a + b);
            lam_comp.worst = std::max(lam_comp.worst, detail::rel_diff(lhs, rhs, l2_norm(rhs)));
        }

        {
            SpectralVectorField lhs = heat_factor(heat_factor(u, 0.3), 0.7);
            SpectralVectorField rhs = heat_factor(u, 1.0);
            heat_semi.worst = std::max(heat_semi.worst, detail::rel_diff(lhs, rhs, nu));
        }
    }

    std::vector<CheckResult> out = {riesz_sq, rxrx, lam_rx, div_rx, lam_comp, heat_semi};
    for (auto& c : out) c.pass = c.worst <= c.tolerance;
    return out;
}

/// The cancellation battery: normalized <N,W> at 1e-12 for each model on
/// nontrivial data, plus the Beltrami zero-nonlinearity guard.
inline std::vector<CheckResult> verify_cancellations(int n = 32, std::uint64_t seed_base = 7u) {
    const Grid grid = Grid::make(n);
    const double tol = 1e-12;
    std::vector<CheckResult> out;

    const SpectralVectorField tg = taylor_green(grid, 1.0);
    out.push_back({"mns_cancellation_taylor_green",
                   cancellation_check(ModelKind::mns, tg), tol, false});
    out.push_back({"hall_cancellation_taylor_green",
                   cancellation_check(ModelKind::hall, tg), tol, false});

    CheckResult ns{"ns_rotational_cancellation_random", 0.0, tol, false};
    CheckResult conv{"ns_forms_agree_random", 0.0, tol, false};
    for (int f = 0; f < 5; ++f) {
        SpectralVectorField u = random_hermitian_field(grid, seed_base + static_cast<std::uint64_t>(f), true);
        ns.worst = std::max(ns.worst, cancellation_check(ModelKind::ns_rotational, u));
        SpectralVectorField rot = nonlinear_ns_rotational(u);
        SpectralVectorField adv = nonlinear_ns_convective(u);
        conv.worst = std::max(conv.worst, detail::rel_diff(rot, adv, l2_norm(rot)));
    }
    out.push_back(ns);
    out.push_back(conv);

    const SpectralVectorField abc = abc_flow(grid, 1.0, 1.0, 1.0);
    CheckResult beltrami{"beltrami_nonlinearity_vanishes", 0.0, tol, false};
    for (ModelKind m : {ModelKind::mns, ModelKind::ns_rotational, ModelKind::ns_convective, ModelKind::hall}) {
        const double rel = l2_norm(nonlinear_term(m, abc).term) / l2_norm(abc);
        beltrami.worst = std::max(beltrami.worst, rel);
        beltrami.worst = std::max(beltrami.worst, cancellation_check(m, abc));
    }
    out.push_back(beltrami);

    for (auto& c : out) c.pass = c.worst <= c.tolerance;
    return out;
}

/// CLI `verify` entry: run both suites, print one line per check, return
/// overall success.
inline bool run_verify(std::ostream& os) {
    bool ok = true;
    auto report = [&](const std::vector<CheckResult>& checks) {
        for (const auto& c : checks) {
            os << (c.pass ? "PASS" : "FAIL") << " " << c.name << "  worst=" << format_double(c.worst)
               << "  tol=" << format_double(c.tolerance) << "\n";
            ok = ok && c.pass;
        }
    };
    os << "operator identity suite (n=16, 100 random fields)\n";
    report(verify_identities());
    os << "cancellation suite (n=32)\n";
    report(verify_cancellations());
    os << (ok ? "verify: all checks passed\n" : "verify: FAILURES present\n");
    return ok;
}

} // namespace mns
