#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <cmath>
#include <cstddef>
#include <cstdio>

namespace mns {

using cplx = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846264338327950288;
inline constexpr double two_pi = 2.0 * pi;

/// Error type thrown by every validated operation in the library.
class error : public std::runtime_error {
public:
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

/// Neumaier compensated accumulator. All norms, inner products and balance
/// residuals are reduced through this so that identities that cancel exactly
/// in exact arithmetic stay at the rounding floor even on large grids.
struct CompensatedSum {
    double sum = 0.0;
    double comp = 0.0;

    void add(double x) {
        double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            comp += (sum - t) + x;
        else
            comp += (x - t) + sum;
        sum = t;
    }
    double value() const { return sum + comp; }
};

inline bool is_finite(const cplx& z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
}

/// Full round-trip decimal formatting (17 significant digits); strtod on the
/// result recovers the exact binary64 value.
inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
}

} // namespace mns
