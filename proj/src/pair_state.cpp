#include <collapse_lab/pair_state.hpp>

#include <collapse_lab/errors.hpp>

#include <cmath>
#include <string>

namespace collapse_lab {

PairState PairState::from_weight(double weight) {
    if (!(weight >= 0.0 && weight <= 1.0)) {
        throw InvalidStateError("component weight must lie in [0, 1], got " + std::to_string(weight));
    }
    return {Complex{std::sqrt(weight), 0.0}, Complex{std::sqrt(1.0 - weight), 0.0}};
}

void require_normalized(const PairState& state) {
    const double n2 = state.norm_squared();
    if (!std::isfinite(n2)) {
        throw InvalidStateError("pair state has non-finite amplitudes");
    }
    if (std::abs(std::sqrt(n2) - 1.0) > kStateTolerance) {
        throw InvalidStateError("pair state is not normalized (norm^2 = " + std::to_string(n2) + ")");
    }
}

double sigma_expect(const PairState& state) {
    require_normalized(state);
    return state.weight0() - state.weight1();
}

double renormalize(PairState& state) {
    const double norm = std::sqrt(state.norm_squared());
    state.alpha /= norm;
    state.beta /= norm;
    return norm;
}

const char* to_string(Outcome outcome) noexcept {
    switch (outcome) {
        case Outcome::ket00: return "00";
        case Outcome::ket11: return "11";
        case Outcome::unresolved: break;
    }
    return "unresolved";
}

Outcome classify(const PairState& state, double threshold) noexcept {
    const double w0 = state.weight0();
    if (w0 >= 1.0 - threshold) return Outcome::ket00;
    if (w0 <= threshold) return Outcome::ket11;
    return Outcome::unresolved;
}

}  // namespace collapse_lab
