#pragma once

#include "mns/common.hpp"
#include "mns/field.hpp"
#include "mns/grid.hpp"
#include "mns/multipliers.hpp"
#include "mns/spectral_ops.hpp"

#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace mns {

/// Reproducible solenoidal initial data families.
struct ICSpec {
    enum class Kind { taylor_green, abc, random } kind = Kind::taylor_green;

    double amplitude = 1.0;             // taylor_green
    double a = 1.0, b = 1.0, c = 1.0;   // abc
    std::uint64_t seed = 0;             // random
    int peak_wavenumber = 1;            // random
    double target_norm = 1.0;           // random

    /// Parse "taylor_green:AMP", "abc:A,B,C" or "random:SEED,K0,TARGET".
    static ICSpec parse(const std::string& text);

    std::string describe() const;
};

inline ICSpec ICSpec::parse(const std::string& text) {
    const auto colon = text.find(':');
    const std::string kind = text.substr(0, colon);
    const std::string args = colon == std::string::npos ? std::string{} : text.substr(colon + 1);

    auto split = [](const std::string& s) {
        std::vector<std::string> out;
        std::stringstream ss(s);
        std::string item;
        while (std::getline(ss, item, ',')) out.push_back(item);
        return out;
    };
    auto to_double = [&](const std::string& s, const char* what) {
        try {
            std::size_t pos = 0;
            double v = std::stod(s, &pos);
            if (pos != s.size()) throw std::invalid_argument(s);
            return v;
        } catch (const std::exception&) {
            throw error(std::string("ic: cannot parse ") + what + " from '" + s + "'");
        }
    };

    ICSpec spec;
    if (kind == "taylor_green") {
        const auto parts = split(args);
        if (parts.size() != 1) throw error("ic: taylor_green takes exactly one parameter (amplitude)");
        spec.kind = Kind::taylor_green;
        spec.amplitude = to_double(parts[0], "taylor_green amplitude");
        if (!(spec.amplitude > 0.0)) throw error("ic: taylor_green amplitude must be > 0");
    } else if (kind == "abc") {
        const auto parts = split(args);
        if (parts.size() != 3) throw error("ic: abc takes exactly three parameters (A,B,C)");
        spec.kind = Kind::abc;
        spec.a = to_double(parts[0], "abc A");
        spec.b = to_double(parts[1], "abc B");
        spec.c = to_double(parts[2], "abc C");
        if (spec.a == 0.0 && spec.b == 0.0 && spec.c == 0.0)
            throw error("ic: abc requires at least one of A,B,C nonzero");
    } else if (kind == "random") {
        const auto parts = split(args);
        if (parts.size() != 3) throw error("ic: random takes exactly three parameters (seed,k0,target)");
        spec.kind = Kind::random;
        try {
            spec.seed = std::stoull(parts[0]);
        } catch (const std::exception&) {
            throw error("ic: cannot parse random seed from '" + parts[0] + "'");
        }
        const double k0 = to_double(parts[1], "random k0");
        if (k0 < 1.0 || k0 != static_cast<int>(k0)) throw error("ic: random k0 must be an integer >= 1");
        spec.peak_wavenumber = static_cast<int>(k0);
        spec.target_norm = to_double(parts[2], "random target norm");
        if (!(spec.target_norm > 0.0)) throw error("ic: random target norm must be > 0");
    } else {
        throw error("ic: unknown kind '" + kind + "' (expected taylor_green, abc or random)");
    }
    return spec;
}

inline std::string ICSpec::describe() const {
    std::ostringstream os;
    switch (kind) {
        case Kind::taylor_green: os << "taylor_green:" << amplitude; break;
        case Kind::abc: os << "abc:" << a << "," << b << "," << c; break;
        case Kind::random: os << "random:" << seed << "," << peak_wavenumber << "," << target_norm; break;
    }
    return os.str();
}

/// v = a (sin x cos y cos z, -cos x sin y cos z, 0), built directly in
/// spectral space: 8 exact coefficients per active component.
inline SpectralVectorField taylor_green(const Grid& grid, double a) {
    if (!(a > 0.0)) throw error("taylor_green: amplitude must be > 0");
    SpectralVectorField v(grid);
    const std::size_t m = grid.point_count();
    for (int s1 : {1, -1})
        for (int s2 : {1, -1})
            for (int s3 : {1, -1}) {
                const std::size_t idx =
                    grid.linear_index(grid.index_of(s1), grid.index_of(s2), grid.index_of(s3));
                // sin x cos y cos z -> s1/(8i); -cos x sin y cos z -> -s2/(8i)
                v.data[idx] = cplx{0.0, -a * s1 / 8.0};
                v.data[idx + m] = cplx{0.0, a * s2 / 8.0};
            }
    return v;
}

/// Beltrami family v = (A sin z + C cos y, B sin x + A cos z, C sin y + B cos x);
/// curl v = v exactly (all modes on the |k| = 1 shell).
inline SpectralVectorField abc_flow(const Grid& grid, double a, double b, double c) {
    if (a == 0.0 && b == 0.0 && c == 0.0)
        throw error("abc_flow: at least one of A,B,C must be nonzero");
    SpectralVectorField v(grid);
    const std::size_t m = grid.point_count();
    auto at = [&](int k1, int k2, int k3) {
        return grid.linear_index(grid.index_of(k1), grid.index_of(k2), grid.index_of(k3));
    };
    for (int s : {1, -1}) {
        const double sd = static_cast<double>(s);
        // A sin z at k=(0,0,s): -i s A/2 ; A cos z at the same modes: A/2.
        v.data[at(0, 0, s)] += cplx{0.0, -sd * a / 2.0};
        v.data[at(0, 0, s) + m] += cplx{a / 2.0, 0.0};
        // C cos y at k=(0,s,0): C/2 ; C sin y: -i s C/2.
        v.data[at(0, s, 0)] += cplx{c / 2.0, 0.0};
        v.data[at(0, s, 0) + 2 * m] += cplx{0.0, -sd * c / 2.0};
        // B sin x at k=(s,0,0): -i s B/2 ; B cos x: B/2.
        v.data[at(s, 0, 0) + m] += cplx{0.0, -sd * b / 2.0};
        v.data[at(s, 0, 0) + 2 * m] += cplx{b / 2.0, 0.0};
    }
    return v;
}

/// Random solenoidal field: complex Gaussian modes shaped by the band
/// spectrum E(k) ~ k^4 exp(-2(k/k0)^2), Hermitian by construction, then
/// Leray-projected, dealiased and rescaled to the target L2 norm.
///
/// Reproducibility contract: mt19937_64 seeded as given; uniforms are
/// ((x >> 11) + 0.5) * 2^-53; normals by the trigonometric Box-Muller
/// transform; canonical modes are visited in the documented loop order
/// (k3 = 0..K outer, k2 = -K..K, k1 = -K..K inner, first nonzero of
/// (k3,k2,k1) positive), six normals per mode.
inline SpectralVectorField random_solenoidal(const Grid& grid, std::uint64_t seed, int k0,
                                             double target) {
    const int K = grid.dealias_cutoff;
    if (k0 < 1 || k0 > K - 1)
        throw error("random_solenoidal: k0 must lie in [1, K-1], K = " + std::to_string(K));
    if (!(target > 0.0)) throw error("random_solenoidal: target norm must be > 0");

    std::mt19937_64 rng(seed);
    auto uniform = [&rng]() {
        return (static_cast<double>(rng() >> 11) + 0.5) * 0x1p-53;
    };
    auto normal_pair = [&](double& z0, double& z1) {
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        z0 = r * std::cos(two_pi * u2);
        z1 = r * std::sin(two_pi * u2);
    };

    const std::size_t m = grid.point_count();
    for (int attempt = 0; attempt < 64; ++attempt) {
        SpectralVectorField v(grid);
        for (int k3 = 0; k3 <= K; ++k3)
            for (int k2 = -K; k2 <= K; ++k2)
                for (int k1 = -K; k1 <= K; ++k1) {
                    const bool canonical =
                        k3 > 0 || (k3 == 0 && k2 > 0) || (k3 == 0 && k2 == 0 && k1 > 0);
                    if (!canonical) continue;
                    const double kmag2 = static_cast<double>(k1) * k1 +
                                         static_cast<double>(k2) * k2 +
                                         static_cast<double>(k3) * k3;
                    const double kmag = std::sqrt(kmag2);
                    const double amp = kmag2 * std::exp(-(kmag / k0) * (kmag / k0));
                    double z[6];
                    normal_pair(z[0], z[1]);
                    normal_pair(z[2], z[3]);
                    normal_pair(z[4], z[5]);
                    const std::size_t idx =
                        grid.linear_index(grid.index_of(k1), grid.index_of(k2), grid.index_of(k3));
                    const std::size_t cid =
                        grid.linear_index(grid.index_of(-k1), grid.index_of(-k2), grid.index_of(-k3));
                    for (int c = 0; c < 3; ++c) {
                        const cplx val{amp * z[2 * c], amp * z[2 * c + 1]};
                        v.data[idx + c * m] = val;
                        v.data[cid + c * m] = std::conj(val);
                    }
                }
        leray_project_inplace(v);
        dealias_inplace(v);
        const double norm = l2_norm(v);
        if (norm > 0.0) {
            const double scale = target / norm;
            for (auto& z : v.data) z *= scale;
            return v;
        }
        // Degenerate draw: continue deterministically on the same stream.
    }
    throw error("random_solenoidal: degenerate draws, giving up after 64 attempts");
}

inline SpectralVectorField make_initial(const Grid& grid, const ICSpec& spec) {
    switch (spec.kind) {
        case ICSpec::Kind::taylor_green: return taylor_green(grid, spec.amplitude);
        case ICSpec::Kind::abc: return abc_flow(grid, spec.a, spec.b, spec.c);
        case ICSpec::Kind::random:
            return random_solenoidal(grid, spec.seed, spec.peak_wavenumber, spec.target_norm);
    }
    throw error("make_initial: unknown ic kind");
}

} // namespace mns
