#pragma once

#include <complex>

namespace collapse_lab {

using Complex = std::complex<double>;

/// Entangled pair alpha|00> + beta|11>. The subspace spanned by the two
/// correlated basis states is closed under the reduction dynamics, so the
/// pair is fully described by these two amplitudes.
struct PairState {
    Complex alpha{1.0, 0.0};
    Complex beta{0.0, 0.0};

    /// Real, non-negative amplitudes with |alpha|^2 = weight.
    static PairState from_weight(double weight);

    // Spelled out: libstdc++'s std::norm goes through hypot unless -ffast-math.
    double weight0() const noexcept { return alpha.real() * alpha.real() + alpha.imag() * alpha.imag(); }
    double weight1() const noexcept { return beta.real() * beta.real() + beta.imag() * beta.imag(); }
    double norm_squared() const noexcept { return weight0() + weight1(); }

    /// Coherence alpha * conj(beta), i.e. <00|psi><psi|11>.
    Complex coherence() const noexcept { return alpha * std::conj(beta); }

    friend bool operator==(const PairState&, const PairState&) = default;
};

/// Norm deviation tolerated by the public entry points before a state is
/// rejected as invalid.
inline constexpr double kStateTolerance = 1e-6;

/// Throws InvalidStateError unless the state is finite and normalized.
void require_normalized(const PairState& state);

/// Pauli-z expectation |alpha|^2 - |beta|^2.
double sigma_expect(const PairState& state);

/// Scales the state back to unit norm. Returns the norm before scaling.
double renormalize(PairState& state);

enum class Outcome { ket00, ket11, unresolved };

const char* to_string(Outcome outcome) noexcept;

/// Declares an outcome once a component weight is within `threshold` of 1.
Outcome classify(const PairState& state, double threshold) noexcept;

}  // namespace collapse_lab
