#pragma once

#include <collapse_lab/dynamics.hpp>
#include <collapse_lab/noise.hpp>
#include <collapse_lab/pair_state.hpp>

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace collapse_lab {

struct EnsembleConfig {
    std::size_t n_traj = 100000;
    double initial_alpha2 = 0.75;
    ModelParams model;
    NoiseSpec noise;
    double t_max = 6.0;
    double record_every = 0.01;
    std::uint64_t master_seed = 1;
    /// Worker threads; 0 picks std::thread::hardware_concurrency(). Results do
    /// not depend on this value.
    unsigned workers = 0;

    void validate() const;
};

/// Ensemble density matrix in the {|00>, |11>} basis,
///
///   rho = (1/N) sum_j |psi_j><psi_j|,  rho01 = <00|rho|11> = E[alpha conj(beta)].
///
/// rho10 is the conjugate of rho01 and is not stored.
struct DensityMatrix2 {
    double rho00 = 1.0;
    double rho11 = 0.0;
    Complex rho01{0.0, 0.0};

    static DensityMatrix2 pure(const PairState& state);

    Complex rho10() const noexcept { return std::conj(rho01); }
    double trace() const noexcept { return rho00 + rho11; }
    double purity() const noexcept { return rho00 * rho00 + rho11 * rho11 + 2.0 * std::norm(rho01); }

    /// Throws InvalidDensityMatrixError on a trace or positivity violation.
    void validate() const;
};

/// Sums of the per-trajectory accumulands at one record.
struct MomentSums {
    double alpha2 = 0.0;
    double coherence_re = 0.0;
    double coherence_im = 0.0;
    double entanglement = 0.0;  ///< -|a|^2 ln|a|^2 - |b|^2 ln|b|^2, averaged before any nonlinearity

    MomentSums& operator+=(const MomentSums& o) noexcept {
        alpha2 += o.alpha2;
        coherence_re += o.coherence_re;
        coherence_im += o.coherence_im;
        entanglement += o.entanglement;
        return *this;
    }
    MomentSums& operator-=(const MomentSums& o) noexcept {
        alpha2 -= o.alpha2;
        coherence_re -= o.coherence_re;
        coherence_im -= o.coherence_im;
        entanglement -= o.entanglement;
        return *this;
    }
    MomentSums& operator*=(double f) noexcept {
        alpha2 *= f;
        coherence_re *= f;
        coherence_im *= f;
        entanglement *= f;
        return *this;
    }

    static MomentSums of(const PairState& state) noexcept;
};

/// Ensemble means at one record.
struct RecordMoments {
    double alpha2 = 0.0;       ///< E|alpha|^2
    Complex coherence{};       ///< E[alpha conj(beta)]
    double entanglement = 0.0; ///< E[S_ent]
};

struct OutcomeCounts {
    std::size_t n00 = 0;
    std::size_t n11 = 0;
    std::size_t unresolved = 0;
};

/// Moment time series of an ensemble run. Besides the means it keeps the sums
/// over contiguous trajectory-index blocks so nonlinear statistics can be given
/// jackknife errors.
class MomentSeries {
public:
    MomentSeries() = default;
    MomentSeries(std::vector<double> times, std::vector<std::size_t> block_sizes,
                 std::vector<MomentSums> block_sums, std::vector<OutcomeCounts> outcomes);

    std::size_t n_traj() const noexcept { return n_traj_; }
    std::size_t n_records() const noexcept { return times_.size(); }
    std::size_t n_blocks() const noexcept { return block_sizes_.size(); }
    std::span<const double> times() const noexcept { return times_; }
    const std::vector<OutcomeCounts>& outcomes() const noexcept { return outcomes_; }
    std::span<const std::size_t> block_sizes() const noexcept { return block_sizes_; }

    /// Index of the record at exactly `tJ` (to 1e-9 relative); throws
    /// std::out_of_range for off-grid times.
    std::size_t record_index(double tJ) const;

    RecordMoments at(std::size_t record) const;
    /// Means with block `block` removed.
    RecordMoments leave_out(std::size_t record, std::size_t block) const;

    const MomentSums& block_sum(std::size_t block, std::size_t record) const {
        return block_sums_[block * times_.size() + record];
    }

private:
    std::vector<double> times_;
    std::vector<std::size_t> block_sizes_;
    std::vector<MomentSums> block_sums_;  // [block][record]
    std::vector<MomentSums> totals_;      // [record]
    std::vector<OutcomeCounts> outcomes_;
    std::size_t n_traj_ = 0;
};

/// Number of jackknife blocks used for n trajectories.
inline constexpr std::size_t kJackknifeBlocks = 50;

MomentSeries run_ensemble(const EnsembleConfig& config);

/// Series over explicitly given snapshots: `snapshots[r]` holds the N states at
/// record r (all records must have the same N).
MomentSeries summarize_snapshots(std::span<const std::vector<PairState>> snapshots, std::span<const double> times);

DensityMatrix2 density_matrix_at(const MomentSeries& series, double tJ);
DensityMatrix2 density_matrix_at_record(const MomentSeries& series, std::size_t record);

/// Deterministic pairwise sum of a range of MomentSums.
MomentSums pairwise_sum(std::span<const MomentSums> values);

}  // namespace collapse_lab
