#pragma once

#include "mns/common.hpp"

#include <cstdint>
#include <string>

namespace mns {

/// Uniform collocation grid on the periodic box [0, 2pi)^3 with n points per
/// axis. Storage is row-major with the first axis fastest: the sample at
/// (i, j, l) lives at linear index i + n*(j + n*l), x = 2pi*(i,j,l)/n.
///
/// Spectral storage uses the same linear indexing; index i along an axis
/// carries integer wavenumber i for i < n/2 and i - n otherwise, so
/// k in {-n/2, ..., n/2-1}. The dealias cutoff is K = floor(n/3) (2/3 rule,
/// cube mask).
struct Grid {
    int n = 0;
    int dealias_cutoff = 0;

    static Grid make(int n) {
        if (n < 8 || (n % 2) != 0)
            throw error("Grid: n must be an even integer >= 8 (got " + std::to_string(n) + ")");
        Grid g;
        g.n = n;
        g.dealias_cutoff = n / 3;
        return g;
    }

    std::size_t point_count() const { return static_cast<std::size_t>(n) * n * n; }

    /// Integer wavenumber carried by storage index i along one axis.
    int wavenumber(int i) const { return i < n / 2 ? i : i - n; }

    /// Storage index along one axis holding wavenumber k.
    int index_of(int k) const { return k >= 0 ? k : k + n; }

    std::size_t linear_index(int i, int j, int l) const {
        return static_cast<std::size_t>(i) +
               static_cast<std::size_t>(n) * (static_cast<std::size_t>(j) +
                                              static_cast<std::size_t>(n) * static_cast<std::size_t>(l));
    }

    /// Linear index of mode -k given the per-axis indices of mode k.
    std::size_t conjugate_index(int i, int j, int l) const {
        auto neg = [this](int a) { return a == 0 ? 0 : n - a; };
        return linear_index(neg(i), neg(j), neg(l));
    }

    bool in_dealias_band(int k1, int k2, int k3) const {
        int K = dealias_cutoff;
        return std::abs(k1) <= K && std::abs(k2) <= K && std::abs(k3) <= K;
    }

    bool operator==(const Grid& o) const { return n == o.n; }
    bool operator!=(const Grid& o) const { return n != o.n; }
};

inline void require_same_grid(const Grid& a, const Grid& b, const char* where) {
    if (a != b)
        throw error(std::string(where) + ": grid mismatch (n=" + std::to_string(a.n) +
                    " vs n=" + std::to_string(b.n) + ")");
}

/// Visit every stored mode with its integer wavenumber triple.
/// f(linear_index, k1, k2, k3) is called in storage order.
template <typename F>
inline void for_each_mode(const Grid& g, F&& f) {
    const int n = g.n;
    std::size_t idx = 0;
    for (int l = 0; l < n; ++l) {
        const int k3 = g.wavenumber(l);
        for (int j = 0; j < n; ++j) {
            const int k2 = g.wavenumber(j);
            for (int i = 0; i < n; ++i, ++idx) {
                const int k1 = g.wavenumber(i);
                f(idx, k1, k2, k3);
            }
        }
    }
}

} // namespace mns
