#pragma once

#include <collapse_lab/rng.hpp>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace collapse_lab {

enum class NoiseKind { frozen, ou, white };

enum class FrozenDistribution { uniform_symmetric };

const char* to_string(NoiseKind kind) noexcept;
NoiseKind parse_noise_kind(const std::string& name);

/// Noise regime driving the reduction. Frozen noise is constant along a
/// trajectory and drawn afresh per trajectory; OU noise follows
/// d xi = -xi dt / tau + g(xi) dW; white noise is consumed as Wiener
/// increments by the white-noise stepper.
struct NoiseSpec {
    NoiseKind kind = NoiseKind::frozen;
    double tau = 1.0;
    double g0 = 0.816496580927726;  // sqrt(2/3): stationary variance 1/3, same as U[-1, 1]
    FrozenDistribution frozen_dist = FrozenDistribution::uniform_symmetric;
    /// Stratify frozen draws over the trajectory index (variance reduction).
    bool stratified = false;
    /// Optional state-dependent diffusion g(xi); constant g0 when empty.
    std::function<double(double)> diffusion;

    void validate() const;
    double diffusion_at(double xi) const { return diffusion ? diffusion(xi) : g0; }
    /// g0^2 tau / 2 for constant diffusion.
    double stationary_variance() const noexcept { return 0.5 * g0 * g0 * tau; }
};

/// Single draw uniform on [-1, 1].
double sample_frozen(Philox4x32& rng, FrozenDistribution dist = FrozenDistribution::uniform_symmetric);

/// Draw from stratum `index` of `count` equal-width strata of [-1, 1].
double sample_frozen_stratified(Philox4x32& rng, std::size_t index, std::size_t count);

/// One Euler-Maruyama step xi - (xi / tau) dt + g(xi) dW.
double ou_step(double xi, const NoiseSpec& spec, double dW, double dt);

/// Draw from N(0, g0^2 tau / 2).
double sample_ou_stationary(Philox4x32& rng, NormalSampler& normal, const NoiseSpec& spec);

/// Noise realization aligned to the integration grid: xi at each grid point
/// (n_steps + 1 values) for frozen and OU noise, one Wiener increment per step
/// (n_steps values) for white noise.
struct NoisePath {
    std::vector<double> values;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;

    /// Piecewise-linear xi(t) on the grid with spacing `dt`.
    double at(double t, double dt) const;
};

NoisePath generate_noise_path(const NoiseSpec& spec, std::size_t n_steps, double dt, std::uint64_t seed,
                              std::uint64_t stream);

}  // namespace collapse_lab
