#include <collapse_lab/ensemble.hpp>

#include <collapse_lab/analysis.hpp>
#include <collapse_lab/errors.hpp>

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>

namespace collapse_lab {

namespace {

constexpr std::size_t kLeafSize = 64;

// In-place pairwise tree reduction of `count` rows of width `width` into row 0.
void reduce_rows(std::vector<MomentSums>& rows, std::size_t count, std::size_t width) {
    for (std::size_t stride = 1; stride < count; stride *= 2) {
        for (std::size_t i = 0; i + stride < count; i += 2 * stride) {
            MomentSums* dst = rows.data() + i * width;
            const MomentSums* src = rows.data() + (i + stride) * width;
            for (std::size_t r = 0; r < width; ++r) dst[r] += src[r];
        }
    }
}

template <std::size_t... I>
std::array<Philox4x32, sizeof...(I)> make_streams(std::uint64_t seed, std::size_t first, std::index_sequence<I...>) {
    return {Philox4x32(seed, first + I)...};
}

struct BlockResult {
    std::vector<MomentSums> sums;              // [record]
    std::vector<std::size_t> first_collapse00; // [record] histogram of first collapsed record
    std::vector<std::size_t> first_collapse11;
};

// Integrates trajectories in lockstep groups of kLanes. A single trajectory is
// a long chain of dependent divisions; interleaving independent lanes lets the
// CPU overlap them. Ensemble members start from real amplitudes and the
// generator is real and diagonal, so lanes carry real (alpha, beta) in
// structure-of-arrays form. Per-lane arithmetic matches rk4_step and
// euler_maruyama_step on such states bit for bit, and absorbed lanes are exact
// fixed points, so grouping does not change any result.
class TrajectoryKernel {
public:
    static constexpr std::size_t kLanes = 8;

    struct Lanes {
        std::array<double, kLanes> a;
        std::array<double, kLanes> b;
        PairState pair(std::size_t l) const { return {Complex{a[l], 0.0}, Complex{b[l], 0.0}}; }
    };

    TrajectoryKernel(const EnsembleConfig& cfg, const TimeGrid& grid)
        : cfg_(cfg), grid_(grid), initial_(PairState::from_weight(cfg.initial_alpha2)),
          sqrt_dt_(std::sqrt(cfg.model.dt)) {}

    // Integrates trajectories [first, first + count), adding their accumulands
    // to sums[record] in index order.
    void run(std::size_t first, std::size_t count, std::span<MomentSums> sums, BlockResult& counts) const {
        const ModelParams& p = cfg_.model;
        const NoiseSpec& noise = cfg_.noise;
        const std::size_t n_rec = grid_.n_records();

        auto rng = make_streams(cfg_.master_seed, first, std::make_index_sequence<kLanes>{});
        std::array<NormalSampler, kLanes> normal{};
        Lanes state;
        std::array<double, kLanes> xi{};
        std::array<bool, kLanes> active{};
        std::size_t n_active = 0;

        for (std::size_t l = 0; l < kLanes; ++l) {
            state.a[l] = initial_.alpha.real();
            state.b[l] = initial_.beta.real();
            if (l >= count) continue;
            switch (noise.kind) {
                case NoiseKind::frozen:
                    xi[l] = noise.stratified ? sample_frozen_stratified(rng[l], first + l, cfg_.n_traj)
                                             : sample_frozen(rng[l], noise.frozen_dist);
                    break;
                case NoiseKind::ou:
                    xi[l] = sample_ou_stationary(rng[l], normal[l], noise);
                    break;
                case NoiseKind::white:
                    break;
            }
            active[l] = true;
            ++n_active;
        }
        auto absorb = [&](std::size_t l, std::size_t rec) {
            const Outcome o = classify(state.pair(l), p.collapse_threshold);
            if (o == Outcome::unresolved) return;
            state.a[l] = o == Outcome::ket00 ? 1.0 : 0.0;
            state.b[l] = o == Outcome::ket00 ? 0.0 : 1.0;
            (o == Outcome::ket00 ? counts.first_collapse00 : counts.first_collapse11)[rec] += 1;
            active[l] = false;
            --n_active;
        };
        // Padding lanes are parked on a fixed point.
        for (std::size_t l = count; l < kLanes; ++l) {
            state.a[l] = 1.0;
            state.b[l] = 0.0;
        }
        for (std::size_t l = 0; l < count; ++l) absorb(l, 0);

        std::size_t step = 0;
        for (std::size_t rec = 0; rec < n_rec; ++rec) {
            for (std::size_t k = 0; rec > 0 && n_active > 0 && k < grid_.steps_per_record; ++k, ++step) {
                switch (noise.kind) {
                    case NoiseKind::frozen:
                        advance<NoiseKind::frozen>(state, xi, active, rng, normal, step, first);
                        break;
                    case NoiseKind::ou:
                        advance<NoiseKind::ou>(state, xi, active, rng, normal, step, first);
                        break;
                    case NoiseKind::white:
                        advance<NoiseKind::white>(state, xi, active, rng, normal, step, first);
                        break;
                }
                for (std::size_t l = 0; l < count; ++l) {
                    if (active[l]) absorb(l, rec);
                }
            }
            for (std::size_t l = 0; l < count; ++l) sums[rec] += MomentSums::of(state.pair(l));
        }
    }

private:
    template <NoiseKind Kind>
    void advance(Lanes& state, std::array<double, kLanes>& xi,
                 const std::array<bool, kLanes>& active, std::array<Philox4x32, kLanes>& rng,
                 std::array<NormalSampler, kLanes>& normal, std::size_t step, std::size_t first) const {
        const ModelParams& p = cfg_.model;
        std::array<double, kLanes> dw{};
        std::array<double, kLanes> xi_next{};
        if constexpr (Kind != NoiseKind::frozen) {
            for (std::size_t l = 0; l < kLanes; ++l) dw[l] = active[l] ? sqrt_dt_ * normal[l](rng[l]) : 0.0;
        }
        if constexpr (Kind == NoiseKind::ou) {
            for (std::size_t l = 0; l < kLanes; ++l) xi_next[l] = ou_step(xi[l], cfg_.noise, dw[l], p.dt);
        }
        std::array<double, kLanes> correction{};
        for (std::size_t l = 0; l < kLanes; ++l) {
            const double w0 = state.a[l] * state.a[l];
            const double w1 = state.b[l] * state.b[l];
            detail::StepFactors f;
            if constexpr (Kind == NoiseKind::frozen) {
                f = detail::rk4_factors(w0, w1, xi[l], xi[l], xi[l], p);
            } else if constexpr (Kind == NoiseKind::ou) {
                f = detail::rk4_factors(w0, w1, xi[l], 0.5 * (xi[l] + xi_next[l]), xi_next[l], p);
            } else {
                f = detail::em_factors(w0, w1, dw[l], p);
            }
            const double norm = std::sqrt(f.ga * f.ga * w0 + f.gb * f.gb * w1);
            correction[l] = std::abs(norm - f.ito_norm);
            state.a[l] *= f.ga / norm;
            state.b[l] *= f.gb / norm;
        }
        if constexpr (Kind == NoiseKind::ou) xi = xi_next;
        for (std::size_t l = 0; l < kLanes; ++l) {
            if (active[l] && !(correction[l] <= p.max_norm_correction)) {
                throw TrajectoryFailure("trajectory " + std::to_string(first + l) + " (master seed " +
                                            std::to_string(cfg_.master_seed) + ") failed at step " +
                                            std::to_string(step) + ": norm correction " +
                                            std::to_string(correction[l]) + " exceeds bound",
                                        first + l, cfg_.master_seed);
            }
        }
    }

    const EnsembleConfig& cfg_;
    const TimeGrid& grid_;
    PairState initial_;
    double sqrt_dt_;
};

}  // namespace

void EnsembleConfig::validate() const {
    if (n_traj < 1) throw ConfigError("n_traj", "must be >= 1");
    if (!(initial_alpha2 >= 0.0 && initial_alpha2 <= 1.0)) throw ConfigError("alpha0_sq", "must lie in [0, 1]");
    model.validate();
    noise.validate();
    if (!(record_every >= model.dt)) throw ConfigError("record_every", "must be >= dt");
    TimeGrid::make(t_max, record_every, model.dt);
}

DensityMatrix2 DensityMatrix2::pure(const PairState& s) {
    require_normalized(s);
    return {s.weight0(), s.weight1(), s.coherence()};
}

void DensityMatrix2::validate() const {
    if (!std::isfinite(rho00) || !std::isfinite(rho11) || !std::isfinite(rho01.real()) ||
        !std::isfinite(rho01.imag())) {
        throw InvalidDensityMatrixError("density matrix has non-finite entries");
    }
    if (std::abs(trace() - 1.0) > 1e-10) {
        throw InvalidDensityMatrixError("density matrix trace " + std::to_string(trace()) + " != 1");
    }
    if (rho00 < -1e-10 || rho11 < -1e-10 || std::norm(rho01) > rho00 * rho11 + 1e-10) {
        throw InvalidDensityMatrixError("density matrix is not positive semidefinite");
    }
}

MomentSums MomentSums::of(const PairState& state) noexcept {
    const Complex c = state.coherence();
    return {state.weight0(), c.real(), c.imag(), binary_entropy(state.weight0())};
}

MomentSums pairwise_sum(std::span<const MomentSums> values) {
    if (values.empty()) return {};
    if (values.size() == 1) return values[0];
    const std::size_t half = values.size() / 2;
    MomentSums left = pairwise_sum(values.first(half));
    left += pairwise_sum(values.subspan(half));
    return left;
}

MomentSeries::MomentSeries(std::vector<double> times, std::vector<std::size_t> block_sizes,
                           std::vector<MomentSums> block_sums, std::vector<OutcomeCounts> outcomes)
    : times_(std::move(times)), block_sizes_(std::move(block_sizes)), block_sums_(std::move(block_sums)),
      outcomes_(std::move(outcomes)) {
    const std::size_t n_rec = times_.size();
    if (block_sums_.size() != block_sizes_.size() * n_rec || outcomes_.size() != n_rec) {
        throw std::invalid_argument("MomentSeries: inconsistent dimensions");
    }
    for (std::size_t b : block_sizes_) n_traj_ += b;
    totals_.resize(n_rec);
    std::vector<MomentSums> column(block_sizes_.size());
    for (std::size_t r = 0; r < n_rec; ++r) {
        for (std::size_t b = 0; b < block_sizes_.size(); ++b) column[b] = block_sum(b, r);
        totals_[r] = pairwise_sum(column);
    }
}

std::size_t MomentSeries::record_index(double tJ) const {
    const auto it = std::lower_bound(times_.begin(), times_.end(), tJ - 1e-9 * std::max(1.0, std::abs(tJ)));
    if (it == times_.end() || std::abs(*it - tJ) > 1e-9 * std::max(1.0, std::abs(tJ))) {
        throw std::out_of_range("time " + std::to_string(tJ) + " is not on the recorded grid");
    }
    return static_cast<std::size_t>(it - times_.begin());
}

namespace {
RecordMoments to_means(const MomentSums& s, double n) {
    return {s.alpha2 / n, Complex{s.coherence_re / n, s.coherence_im / n}, s.entanglement / n};
}
}  // namespace

RecordMoments MomentSeries::at(std::size_t record) const {
    return to_means(totals_.at(record), static_cast<double>(n_traj_));
}

RecordMoments MomentSeries::leave_out(std::size_t record, std::size_t block) const {
    MomentSums s = totals_.at(record);
    s -= block_sum(block, record);
    return to_means(s, static_cast<double>(n_traj_ - block_sizes_.at(block)));
}

MomentSeries run_ensemble(const EnsembleConfig& config) {
    config.validate();
    const TimeGrid grid = TimeGrid::make(config.t_max, config.record_every, config.model.dt);
    const std::size_t n_rec = grid.n_records();
    const std::size_t n_blocks = std::min(kJackknifeBlocks, config.n_traj);

    std::vector<double> times(n_rec);
    for (std::size_t r = 0; r < n_rec; ++r) {
        times[r] = static_cast<double>(r * grid.steps_per_record) * config.model.dt * config.model.coupling_j;
    }
    auto block_begin = [&](std::size_t b) { return b * config.n_traj / n_blocks; };

    std::vector<BlockResult> blocks(n_blocks);
    const TrajectoryKernel kernel(config, grid);

    std::atomic<std::size_t> next{0};
    std::atomic<bool> stop{false};
    std::mutex error_mutex;
    std::exception_ptr error;
    std::size_t error_index = std::numeric_limits<std::size_t>::max();

    auto worker = [&] {
        std::vector<MomentSums> leaves;
        for (std::size_t b = next++; b < n_blocks && !stop; b = next++) {
            const std::size_t lo = block_begin(b);
            const std::size_t hi = block_begin(b + 1);
            const std::size_t n_leaves = (hi - lo + kLeafSize - 1) / kLeafSize;
            leaves.assign(n_leaves * n_rec, MomentSums{});
            BlockResult& out = blocks[b];
            out.first_collapse00.assign(n_rec, 0);
            out.first_collapse11.assign(n_rec, 0);
            std::size_t i = lo;
            try {
                while (i < hi && !stop) {
                    const std::size_t leaf = (i - lo) / kLeafSize;
                    const std::size_t leaf_end = std::min(hi, lo + (leaf + 1) * kLeafSize);
                    const std::size_t count = std::min(TrajectoryKernel::kLanes, leaf_end - i);
                    kernel.run(i, count, std::span(leaves).subspan(leaf * n_rec, n_rec), out);
                    i += count;
                }
            } catch (...) {
                const std::lock_guard lock(error_mutex);
                if (i < error_index) {
                    error_index = i;
                    error = std::current_exception();
                }
                stop = true;
                return;
            }
            reduce_rows(leaves, n_leaves, n_rec);
            out.sums.assign(leaves.begin(), leaves.begin() + static_cast<std::ptrdiff_t>(n_rec));
        }
    };

    unsigned n_workers = config.workers != 0 ? config.workers : std::max(1u, std::thread::hardware_concurrency());
    n_workers = static_cast<unsigned>(std::min<std::size_t>(n_workers, n_blocks));
    if (n_workers <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(n_workers);
        for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    }
    if (error) std::rethrow_exception(error);

    std::vector<std::size_t> sizes(n_blocks);
    std::vector<MomentSums> sums(n_blocks * n_rec);
    std::vector<OutcomeCounts> outcomes(n_rec);
    std::size_t c00 = 0;
    std::size_t c11 = 0;
    for (std::size_t r = 0; r < n_rec; ++r) {
        for (std::size_t b = 0; b < n_blocks; ++b) {
            c00 += blocks[b].first_collapse00[r];
            c11 += blocks[b].first_collapse11[r];
        }
        outcomes[r] = {c00, c11, config.n_traj - c00 - c11};
    }
    for (std::size_t b = 0; b < n_blocks; ++b) {
        sizes[b] = block_begin(b + 1) - block_begin(b);
        std::copy(blocks[b].sums.begin(), blocks[b].sums.end(), sums.begin() + static_cast<std::ptrdiff_t>(b * n_rec));
    }
    return MomentSeries(std::move(times), std::move(sizes), std::move(sums), std::move(outcomes));
}

MomentSeries summarize_snapshots(std::span<const std::vector<PairState>> snapshots, std::span<const double> times) {
    if (snapshots.empty() || snapshots.size() != times.size()) {
        throw std::invalid_argument("summarize_snapshots: need one snapshot per time");
    }
    const std::size_t n = snapshots.front().size();
    if (n == 0) throw std::invalid_argument("summarize_snapshots: empty snapshot");
    const std::size_t n_rec = snapshots.size();
    const std::size_t n_blocks = std::min(kJackknifeBlocks, n);
    std::vector<std::size_t> sizes(n_blocks);
    std::vector<MomentSums> sums(n_blocks * n_rec);
    std::vector<OutcomeCounts> outcomes(n_rec);
    for (std::size_t r = 0; r < n_rec; ++r) {
        const auto& snap = snapshots[r];
        if (snap.size() != n) throw std::invalid_argument("summarize_snapshots: ragged snapshots");
        std::vector<MomentSums> terms(n);
        for (std::size_t i = 0; i < n; ++i) {
            require_normalized(snap[i]);
            terms[i] = MomentSums::of(snap[i]);
            switch (classify(snap[i], ModelParams{}.collapse_threshold)) {
                case Outcome::ket00: ++outcomes[r].n00; break;
                case Outcome::ket11: ++outcomes[r].n11; break;
                case Outcome::unresolved: ++outcomes[r].unresolved; break;
            }
        }
        for (std::size_t b = 0; b < n_blocks; ++b) {
            const std::size_t lo = b * n / n_blocks;
            const std::size_t hi = (b + 1) * n / n_blocks;
            sizes[b] = hi - lo;
            sums[b * n_rec + r] = pairwise_sum(std::span(terms).subspan(lo, hi - lo));
        }
    }
    return MomentSeries({times.begin(), times.end()}, std::move(sizes), std::move(sums), std::move(outcomes));
}

DensityMatrix2 density_matrix_at_record(const MomentSeries& series, std::size_t record) {
    const RecordMoments m = series.at(record);
    DensityMatrix2 rho{m.alpha2, 1.0 - m.alpha2, m.coherence};
    rho.validate();
    return rho;
}

DensityMatrix2 density_matrix_at(const MomentSeries& series, double tJ) {
    return density_matrix_at_record(series, series.record_index(tJ));
}

}  // namespace collapse_lab
