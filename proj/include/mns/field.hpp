#pragma once

#include "mns/common.hpp"
#include "mns/grid.hpp"

#include <array>
#include <span>
#include <vector>

namespace mns {

/// Complex Fourier coefficients of a scalar field, full cube storage.
struct SpectralScalarField {
    Grid grid;
    std::vector<cplx> c;

    SpectralScalarField() = default;
    explicit SpectralScalarField(const Grid& g) : grid(g), c(g.point_count(), cplx{0.0, 0.0}) {}
};

/// Real collocation samples of a scalar field.
struct PhysicalScalarField {
    Grid grid;
    std::vector<double> s;

    PhysicalScalarField() = default;
    explicit PhysicalScalarField(const Grid& g) : grid(g), s(g.point_count(), 0.0) {}
};

/// Complex Fourier coefficients of a vector field. The three components are
/// stored back to back in one buffer (component stride n^3) so batched
/// transforms can run over the whole field in one pass.
struct SpectralVectorField {
    Grid grid;
    std::vector<cplx> data;

    SpectralVectorField() = default;
    explicit SpectralVectorField(const Grid& g) : grid(g), data(3 * g.point_count(), cplx{0.0, 0.0}) {}

    std::span<cplx> comp(int c) {
        return std::span<cplx>(data.data() + static_cast<std::size_t>(c) * grid.point_count(),
                               grid.point_count());
    }
    std::span<const cplx> comp(int c) const {
        return std::span<const cplx>(data.data() + static_cast<std::size_t>(c) * grid.point_count(),
                                     grid.point_count());
    }
};

/// Real collocation samples of a vector field, same component layout.
struct PhysicalVectorField {
    Grid grid;
    std::vector<double> data;

    PhysicalVectorField() = default;
    explicit PhysicalVectorField(const Grid& g) : grid(g), data(3 * g.point_count(), 0.0) {}

    std::span<double> comp(int c) {
        return std::span<double>(data.data() + static_cast<std::size_t>(c) * grid.point_count(),
                                 grid.point_count());
    }
    std::span<const double> comp(int c) const {
        return std::span<const double>(data.data() + static_cast<std::size_t>(c) * grid.point_count(),
                                       grid.point_count());
    }
};

// Linear state algebra used by the integrator; all element-wise and pure.

inline void axpy(SpectralVectorField& y, double a, const SpectralVectorField& x) {
    require_same_grid(y.grid, x.grid, "axpy");
    for (std::size_t i = 0; i < y.data.size(); ++i) y.data[i] += a * x.data[i];
}

inline SpectralVectorField scaled(const SpectralVectorField& x, double a) {
    SpectralVectorField y = x;
    for (auto& z : y.data) z *= a;
    return y;
}

inline SpectralVectorField added(const SpectralVectorField& x, const SpectralVectorField& y) {
    require_same_grid(x.grid, y.grid, "added");
    SpectralVectorField r = x;
    for (std::size_t i = 0; i < r.data.size(); ++i) r.data[i] += y.data[i];
    return r;
}

inline bool all_finite(const SpectralVectorField& u) {
    for (const auto& z : u.data)
        if (!is_finite(z)) return false;
    return true;
}

} // namespace mns
