#include <collapse_lab/dynamics.hpp>

#include <collapse_lab/errors.hpp>

#include <algorithm>
#include <cmath>
#include <string>

namespace collapse_lab {

namespace {

void hold_absorbed(PairState& s, Outcome o) noexcept {
    if (o == Outcome::ket00) s = {Complex{1.0, 0.0}, Complex{0.0, 0.0}};
    if (o == Outcome::ket11) s = {Complex{0.0, 0.0}, Complex{1.0, 0.0}};
}

bool whole_multiple(double value, double unit, std::size_t& count) {
    const double ratio = value / unit;
    const double rounded = std::round(ratio);
    if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-6 * rounded) return false;
    count = static_cast<std::size_t>(rounded);
    return true;
}

[[noreturn]] void fail_step(std::size_t step, double t, double correction) {
    throw IntegrationError("norm correction " + std::to_string(correction) + " at step " + std::to_string(step) +
                               " (t = " + std::to_string(t) + ") exceeds the step-size stability bound",
                           step, t);
}

}  // namespace

ModelParams ModelParams::born_consistent(double j) {
    ModelParams p;
    p.coupling_j = j;
    p.coupling_g = j;
    p.collapse_rate = j;
    p.dt = 1e-3 / j;
    return p;
}

void ModelParams::validate() const {
    if (!(coupling_j > 0.0)) throw ConfigError("J", "must be > 0");
    if (!(coupling_g >= 0.0)) throw ConfigError("G", "must be >= 0");
    if (!(dt > 0.0)) throw ConfigError("dt", "must be > 0");
    if (!(collapse_rate >= 0.0)) throw ConfigError("lambda", "must be >= 0");
    if (!hamiltonian_off) throw ConfigError("hamiltonian_off", "only H = 0 is supported");
    if (!(collapse_threshold > 0.0 && collapse_threshold < 0.5)) {
        throw ConfigError("collapse_threshold", "must lie in (0, 0.5)");
    }
    if (!(max_norm_correction > 0.0)) throw ConfigError("max_norm_correction", "must be > 0");
}

StepResult rk4_step(const PairState& s, double xi_start, double xi_mid, double xi_end,
                    const ModelParams& p) noexcept {
    const double w0 = s.weight0();
    const double w1 = s.weight1();
    const auto f = detail::rk4_factors(w0, w1, xi_start, xi_mid, xi_end, p);
    const double norm = std::sqrt(f.ga * f.ga * w0 + f.gb * f.gb * w1);
    StepResult r;
    r.state = {s.alpha * (f.ga / norm), s.beta * (f.gb / norm)};
    r.norm_correction = std::abs(norm - 1.0);
    return r;
}

StepResult euler_maruyama_step(const PairState& s, double dW, const ModelParams& p) noexcept {
    const double w0 = s.weight0();
    const double w1 = s.weight1();
    const auto f = detail::em_factors(w0, w1, dW, p);
    const double norm = std::sqrt(f.ga * f.ga * w0 + f.gb * f.gb * w1);
    StepResult r;
    r.state = {s.alpha * (f.ga / norm), s.beta * (f.gb / norm)};
    r.norm_correction = std::abs(norm - f.ito_norm);
    return r;
}

PairState step_deterministic(const PairState& state, double xi, const ModelParams& params) {
    require_normalized(state);
    return rk4_step(state, xi, xi, xi, params).state;
}

PairState step_white(const PairState& state, double dW, const ModelParams& params) {
    require_normalized(state);
    return euler_maruyama_step(state, dW, params).state;
}

TimeGrid TimeGrid::make(double t_max, double record_every, double dt) {
    TimeGrid g;
    if (!(t_max > 0.0)) throw ConfigError("t_max", "must be > 0");
    if (!whole_multiple(t_max, dt, g.n_steps)) throw ConfigError("t_max", "must be a whole multiple of dt");
    if (!whole_multiple(record_every, dt, g.steps_per_record)) {
        throw ConfigError("record_every", "must be a whole multiple of dt");
    }
    if (g.n_steps % g.steps_per_record != 0) {
        throw ConfigError("record_every", "must divide t_max");
    }
    return g;
}

Trajectory simulate_trajectory(const PairState& initial, const std::function<double(double)>& noise_path,
                               const ModelParams& params, double t_max, double record_every) {
    params.validate();
    require_normalized(initial);
    const TimeGrid grid = TimeGrid::make(t_max, record_every, params.dt);
    const double h = params.dt;

    Trajectory traj;
    traj.times.reserve(grid.n_records());
    traj.states.reserve(grid.n_records());
    traj.noise.reserve(grid.n_records());

    PairState state = initial;
    Outcome outcome = classify(state, params.collapse_threshold);
    if (outcome != Outcome::unresolved) {
        hold_absorbed(state, outcome);
        traj.collapse_time = 0.0;
    }
    for (std::size_t n = 0;; ++n) {
        const double t = static_cast<double>(n) * h;
        if (n % grid.steps_per_record == 0) {
            traj.times.push_back(t * params.coupling_j);
            traj.states.push_back(state);
            traj.noise.push_back(noise_path(t));
        }
        if (n == grid.n_steps) break;
        if (outcome != Outcome::unresolved) continue;

        const StepResult r = rk4_step(state, noise_path(t), noise_path(t + 0.5 * h), noise_path(t + h), params);
        if (!(r.norm_correction <= params.max_norm_correction)) fail_step(n, t, r.norm_correction);
        state = r.state;
        outcome = classify(state, params.collapse_threshold);
        if (outcome != Outcome::unresolved) {
            hold_absorbed(state, outcome);
            traj.collapse_time = (t + h) * params.coupling_j;
        }
    }
    traj.outcome = outcome;
    return traj;
}

Trajectory simulate_white_trajectory(const PairState& initial, std::span<const double> increments,
                                     const ModelParams& params, double t_max, double record_every) {
    params.validate();
    require_normalized(initial);
    const TimeGrid grid = TimeGrid::make(t_max, record_every, params.dt);
    if (increments.size() < grid.n_steps) {
        throw ConfigError("increments", "need one Wiener increment per step");
    }
    const double h = params.dt;

    Trajectory traj;
    PairState state = initial;
    Outcome outcome = classify(state, params.collapse_threshold);
    if (outcome != Outcome::unresolved) {
        hold_absorbed(state, outcome);
        traj.collapse_time = 0.0;
    }
    for (std::size_t n = 0;; ++n) {
        const double t = static_cast<double>(n) * h;
        if (n % grid.steps_per_record == 0) {
            traj.times.push_back(t * params.coupling_j);
            traj.states.push_back(state);
            traj.noise.push_back(n < grid.n_steps ? increments[n] : 0.0);
        }
        if (n == grid.n_steps) break;
        if (outcome != Outcome::unresolved) continue;

        const StepResult r = euler_maruyama_step(state, increments[n], params);
        if (!(r.norm_correction <= params.max_norm_correction)) fail_step(n, t, r.norm_correction);
        state = r.state;
        outcome = classify(state, params.collapse_threshold);
        if (outcome != Outcome::unresolved) {
            hold_absorbed(state, outcome);
            traj.collapse_time = (t + h) * params.coupling_j;
        }
    }
    traj.outcome = outcome;
    return traj;
}

}  // namespace collapse_lab
