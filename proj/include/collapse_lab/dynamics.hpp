#pragma once

#include <collapse_lab/pair_state.hpp>

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace collapse_lab {

/// Couplings and integration controls for the two-state reduction dynamics
///
///   d|psi> = (J<s> + G xi(t)) (s - <s>) |psi> dt,      s = Pauli-z, H = 0
///
/// and for its white-noise (CSL-type) counterpart with collapse rate lambda.
struct ModelParams {
    double coupling_j = 1.0;       ///< nonlinear drift strength J [1/time]
    double coupling_g = 1.0;       ///< stochastic coupling G [1/time]
    double dt = 1e-3;              ///< integration step [time]
    double collapse_rate = 1.0;    ///< lambda of the white-noise unraveling [1/time]
    bool hamiltonian_off = true;   ///< only H = 0 is supported
    double collapse_threshold = 1e-9;
    double max_norm_correction = 1e-3;

    /// J = G = lambda = `j`, dt = 1e-3 / j.
    static ModelParams born_consistent(double j = 1.0);

    /// Throws ConfigError naming the first invalid field.
    void validate() const;
};

namespace detail {

/// Real growth factors (ga, gb) with alpha' = ga alpha, beta' = gb beta before
/// renormalization.
struct StepFactors {
    double ga;
    double gb;
    double ito_norm = 1.0;  ///< norm a step of this size produces on its own
};

// H = 0 makes the generator diagonal and real, so every Runge-Kutta stage is
// the initial amplitudes times real factors. Tracking the stage multipliers
// (ma, mb) reproduces classical RK4 on the complex amplitudes while leaving
// their phases untouched.
inline StepFactors rk4_factors(double w0, double w1, double xi_start, double xi_mid, double xi_end,
                               const ModelParams& p) noexcept {
    const double h = p.dt;
    const double xis[4] = {xi_start, xi_mid, xi_mid, xi_end};
    const double advance[4] = {0.5 * h, 0.5 * h, h, 0.0};
    const double weight[4] = {1.0, 2.0, 2.0, 1.0};
    double ma = 1.0, mb = 1.0;
    double fa = 0.0, fb = 0.0;
    for (int stage = 0; stage < 4; ++stage) {
        const double a2 = w0 * ma * ma;
        const double b2 = w1 * mb * mb;
        const double sigma = (a2 - b2) / (a2 + b2);
        const double rate = p.coupling_j * sigma + p.coupling_g * xis[stage];
        const double ka = rate * (1.0 - sigma) * ma;
        const double kb = -rate * (1.0 + sigma) * mb;
        fa += weight[stage] * ka;
        fb += weight[stage] * kb;
        ma = 1.0 + advance[stage] * ka;
        mb = 1.0 + advance[stage] * kb;
    }
    return {1.0 + h / 6.0 * fa, 1.0 + h / 6.0 * fb};
}

inline StepFactors em_factors(double w0, double w1, double dW, const ModelParams& p) noexcept {
    const double sigma = (w0 - w1) / (w0 + w1);
    const double root = std::sqrt(p.collapse_rate);
    const double half_rate_dt = 0.5 * p.collapse_rate * p.dt;
    const double up = 1.0 - sigma;
    const double down = -1.0 - sigma;
    // lambda (1 - <s>^2)(dW^2 - dt) is the O(dt) norm change every EM step makes.
    const double ito2 = 1.0 + p.collapse_rate * (1.0 - sigma * sigma) * (dW * dW - p.dt);
    return {1.0 + root * up * dW - half_rate_dt * up * up, 1.0 + root * down * dW - half_rate_dt * down * down,
            std::sqrt(ito2 > 0.0 ? ito2 : 0.0)};
}

}  // namespace detail

struct StepResult {
    PairState state;
    /// |norm - 1| removed by the renormalization after the step. For the
    /// white-noise stepper the leading Ito contribution, which is present at
    /// any step size, is subtracted first.
    double norm_correction = 0.0;
};

/// Classical fourth-order Runge-Kutta step with the noise sampled at the start,
/// midpoint and end of the step, followed by renormalization. No validation.
StepResult rk4_step(const PairState& state, double xi_start, double xi_mid, double xi_end,
                    const ModelParams& params) noexcept;

/// Euler-Maruyama step of the norm-preserving unraveling
///   d|psi> = [sqrt(lambda)(s - <s>) dW - (lambda/2)(s - <s>)^2 dt] |psi>
/// followed by renormalization. No validation.
StepResult euler_maruyama_step(const PairState& state, double dW, const ModelParams& params) noexcept;

/// One step with xi held fixed over the step.
PairState step_deterministic(const PairState& state, double xi, const ModelParams& params);

/// One white-noise step; `dW` is a Wiener increment with variance params.dt.
PairState step_white(const PairState& state, double dW, const ModelParams& params);

struct Trajectory {
    std::vector<double> times;         ///< recording times in units of 1/J
    std::vector<PairState> states;
    std::vector<double> noise;         ///< xi (or dW for white noise) at each record
    Outcome outcome = Outcome::unresolved;
    double collapse_time = -1.0;       ///< tJ of the first threshold crossing, -1 if none
};

/// Step and record counts for an integration window; throws ConfigError when
/// t_max or record_every is not a whole multiple of dt.
struct TimeGrid {
    std::size_t n_steps = 0;
    std::size_t steps_per_record = 1;

    static TimeGrid make(double t_max, double record_every, double dt);
    std::size_t n_records() const noexcept { return n_steps / steps_per_record + 1; }
};

/// Integrates the correlated-noise dynamics for a given noise history xi(t)
/// (time in the same units as params.dt). Trajectories that cross the collapse
/// threshold are held at the absorbing basis state from then on.
Trajectory simulate_trajectory(const PairState& initial, const std::function<double(double)>& noise_path,
                               const ModelParams& params, double t_max, double record_every);

/// White-noise counterpart; `increments` holds one Wiener increment per step.
Trajectory simulate_white_trajectory(const PairState& initial, std::span<const double> increments,
                                     const ModelParams& params, double t_max, double record_every);

}  // namespace collapse_lab
