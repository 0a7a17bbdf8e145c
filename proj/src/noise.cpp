#include <collapse_lab/noise.hpp>

#include <collapse_lab/errors.hpp>

#include <algorithm>
#include <cmath>

namespace collapse_lab {

const char* to_string(NoiseKind kind) noexcept {
    switch (kind) {
        case NoiseKind::frozen: return "frozen";
        case NoiseKind::ou: return "ou";
        case NoiseKind::white: break;
    }
    return "white";
}

NoiseKind parse_noise_kind(const std::string& name) {
    if (name == "frozen") return NoiseKind::frozen;
    if (name == "ou") return NoiseKind::ou;
    if (name == "white") return NoiseKind::white;
    throw ConfigError("noise", "expected one of frozen|ou|white, got '" + name + "'");
}

void NoiseSpec::validate() const {
    if (kind == NoiseKind::ou && !(tau > 0.0)) throw ConfigError("tau", "must be > 0 for OU noise");
    if (!(g0 >= 0.0)) throw ConfigError("g0", "must be >= 0");
}

double sample_frozen(Philox4x32& rng, FrozenDistribution) {
    return 2.0 * rng.uniform01() - 1.0;
}

double sample_frozen_stratified(Philox4x32& rng, std::size_t index, std::size_t count) {
    const double width = 2.0 / static_cast<double>(count);
    return -1.0 + width * (static_cast<double>(index) + rng.uniform01());
}

double ou_step(double xi, const NoiseSpec& spec, double dW, double dt) {
    return xi - (xi / spec.tau) * dt + spec.diffusion_at(xi) * dW;
}

double sample_ou_stationary(Philox4x32& rng, NormalSampler& normal, const NoiseSpec& spec) {
    return std::sqrt(spec.stationary_variance()) * normal(rng);
}

double NoisePath::at(double t, double dt) const {
    const double pos = std::max(0.0, t / dt);
    const auto i = static_cast<std::size_t>(pos);
    if (i + 1 >= values.size()) return values.back();
    const double frac = pos - static_cast<double>(i);
    return values[i] + frac * (values[i + 1] - values[i]);
}

NoisePath generate_noise_path(const NoiseSpec& spec, std::size_t n_steps, double dt, std::uint64_t seed,
                              std::uint64_t stream) {
    spec.validate();
    NoisePath path;
    path.seed = seed;
    path.stream = stream;
    Philox4x32 rng(seed, stream);
    NormalSampler normal;
    const double sqrt_dt = std::sqrt(dt);
    switch (spec.kind) {
        case NoiseKind::frozen:
            path.values.assign(n_steps + 1, sample_frozen(rng, spec.frozen_dist));
            break;
        case NoiseKind::ou: {
            path.values.resize(n_steps + 1);
            double xi = sample_ou_stationary(rng, normal, spec);
            path.values[0] = xi;
            for (std::size_t n = 0; n < n_steps; ++n) {
                xi = ou_step(xi, spec, sqrt_dt * normal(rng), dt);
                path.values[n + 1] = xi;
            }
            break;
        }
        case NoiseKind::white:
            path.values.resize(n_steps);
            for (double& dw : path.values) dw = sqrt_dt * normal(rng);
            break;
    }
    return path;
}

}  // namespace collapse_lab
