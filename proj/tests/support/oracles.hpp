#pragma once

// Test-side reference computations, written independently of the library.

#include <array>
#include <cmath>
#include <complex>
#include <utility>

namespace oracle {

// ds/dt = 2 (J s + G xi) (1 - s^2) for s = |a|^2 - |b|^2, integrated with a
// plain fixed-step RK4 in s. Returns |a|^2 at time t.
inline double weight_after(double weight0, double xi, double t, double dt = 1e-6, double j = 1.0, double g = 1.0) {
    auto f = [&](double s) { return 2.0 * (j * s + g * xi) * (1.0 - s * s); };
    double s = 2.0 * weight0 - 1.0;
    const long n = std::lround(t / dt);
    for (long i = 0; i < n; ++i) {
        const double k1 = f(s);
        const double k2 = f(s + 0.5 * dt * k1);
        const double k3 = f(s + 0.5 * dt * k2);
        const double k4 = f(s + dt * k3);
        s += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return 0.5 * (1.0 + s);
}

// Eigenvalues of the Hermitian matrix [[a, c], [conj(c), d]] by one complex
// Jacobi rotation.
inline std::pair<double, double> hermitian_eigen(double a, double d, std::complex<double> c) {
    const double m = std::abs(c);
    if (m == 0.0) return {std::max(a, d), std::min(a, d)};
    // Remove the phase, then rotate the real symmetric matrix [[a, m], [m, d]].
    const double theta = 0.5 * std::atan2(2.0 * m, a - d);
    const double cs = std::cos(theta);
    const double sn = std::sin(theta);
    const double e1 = cs * cs * a + 2.0 * cs * sn * m + sn * sn * d;
    const double e2 = sn * sn * a - 2.0 * cs * sn * m + cs * cs * d;
    return {std::max(e1, e2), std::min(e1, e2)};
}

inline double entropy_of_spectrum(double x1, double x2) {
    double s = 0.0;
    for (double x : {x1, x2}) {
        if (x > 0.0) s -= x * std::log(x);
    }
    return s;
}

inline constexpr double kEntropy34 = 0.5623351446188083;  // -(3/4)ln(3/4) - (1/4)ln(1/4)

}  // namespace oracle
