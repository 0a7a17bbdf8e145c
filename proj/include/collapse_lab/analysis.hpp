#pragma once

#include <collapse_lab/ensemble.hpp>
#include <collapse_lab/pair_state.hpp>

#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace collapse_lab {

/// Entropy observables at one recorded time, in nats (k_B = 1).
struct EntropyRecord {
    double t = 0.0;          ///< time in units of 1/J
    double s_td = 0.0;       ///< -Tr(rho ln rho) of the ensemble density matrix
    double s_ent_avg = 0.0;  ///< ensemble average of the reduced Von Neumann entropy
    double s_sum = 0.0;      ///< s_td + s_ent_avg
    double s_td_int = 0.0;   ///< entropy after projecting every member onto {|00>, |11>}
    double mean_alpha2 = 0.0;
    Complex coherence{};     ///< E[alpha conj(beta)]

    // Jackknife standard errors; zero when not estimated.
    double se_s_td = 0.0;
    double se_s_ent_avg = 0.0;
    double se_s_sum = 0.0;
    double se_s_td_int = 0.0;
    double se_mean_alpha2 = 0.0;
};

/// -p ln p - (1 - p) ln(1 - p) with 0 ln 0 = 0. No range check.
double binary_entropy(double p) noexcept;

/// Spectrum {x+, x-} of a 2x2 density matrix,
/// x+- = 1/2 +- (1/2) sqrt((rho00 - rho11)^2 + 4 |rho01|^2).
std::pair<double, double> eigenvalues(const DensityMatrix2& rho) noexcept;

/// Von Neumann entropy from the closed-form spectrum. Eigenvalues within 1e-10
/// of [0, 1] are clamped; anything further out is an InvalidDensityMatrixError.
double von_neumann_entropy(const DensityMatrix2& rho);

/// Reduced Von Neumann entropy of one pair: the binary entropy of |alpha|^2.
double entanglement_entropy(const PairState& state);

/// Average of entanglement_entropy over a snapshot of states.
double avg_entanglement(std::span<const PairState> states);

/// Average entanglement at a record, read from the pre-averaged accumuland.
double avg_entanglement(const MomentSeries& series, std::size_t record);

/// Entropy of the dephased matrix diag(p0, p1).
double interrupt_entropy(double p0, double p1);

std::vector<EntropyRecord> entropy_series(const MomentSeries& series);

// Jackknife over the trajectory blocks of a MomentSeries.

/// View handed to a jackknife statistic: ensemble means per record, either of
/// the full sample or with one block left out.
class MomentView {
public:
    MomentView(const MomentSeries& series, std::size_t left_out) : series_(series), left_out_(left_out) {}
    RecordMoments operator()(std::size_t record) const {
        return left_out_ == kFull ? series_.at(record) : series_.leave_out(record, left_out_);
    }
    static constexpr std::size_t kFull = static_cast<std::size_t>(-1);

private:
    const MomentSeries& series_;
    std::size_t left_out_;
};

struct JackknifeEstimate {
    double value = 0.0;  ///< statistic of the full sample
    double se = 0.0;
};

/// Delete-one-block jackknife:
///   se^2 = (B - 1)/B * sum_b (theta_(b) - mean theta_(.))^2.
template <class Statistic>
JackknifeEstimate jackknife(const MomentSeries& series, Statistic&& statistic) {
    JackknifeEstimate out;
    out.value = statistic(MomentView(series, MomentView::kFull));
    const std::size_t nb = series.n_blocks();
    if (nb < 2) return out;
    std::vector<double> theta(nb);
    double mean = 0.0;
    for (std::size_t b = 0; b < nb; ++b) {
        theta[b] = statistic(MomentView(series, b));
        mean += theta[b];
    }
    mean /= static_cast<double>(nb);
    double ss = 0.0;
    for (double t : theta) ss += (t - mean) * (t - mean);
    out.se = std::sqrt(ss * static_cast<double>(nb - 1) / static_cast<double>(nb));
    return out;
}

// Entropies of the means at one record, as functions of a MomentView.
double s_td_of(const RecordMoments& m);
double s_td_int_of(const RecordMoments& m);

enum class DecayShape { exponential };

struct DephasingParams {
    double gamma = 2.0;  ///< coherence decay rate [1/time]
    DecayShape decay_shape = DecayShape::exponential;
    void validate() const;
};

struct DephasingPoint {
    DensityMatrix2 rho;
    EntropyRecord record;
};

/// Pure dephasing of alpha|00 env0(t)> + beta|11 env1(t)> with environment
/// overlap exp(-gamma t): populations fixed, coherence decaying, individual
/// pairs never reduced.
std::vector<DephasingPoint> dephasing_reference(double alpha0_sq, const DephasingParams& params,
                                                std::span<const double> times);

}  // namespace collapse_lab

namespace collapse_lab {

// Statistical shape checks on a MomentSeries. `Stat` maps RecordMoments to a
// scalar (e.g. s_td_of).

using RecordStatistic = double (*)(const RecordMoments&);

double alpha2_of(const RecordMoments& m);
double s_ent_of(const RecordMoments& m);
double s_sum_of(const RecordMoments& m);

/// Largest decrease stat(t1) - stat(t2) over t1 < t2, with the jackknife
/// standard error of that difference.
struct DropWitness {
    std::size_t t1 = 0;
    std::size_t t2 = 0;
    double drop = 0.0;
    double se = 0.0;
    double z() const noexcept { return se > 0.0 ? drop / se : (drop > 0.0 ? HUGE_VAL : 0.0); }
};
DropWitness largest_drop(const MomentSeries& series, RecordStatistic stat);

/// Largest |stat(t) - stat(0)| with the jackknife SE of the difference.
struct Excursion {
    std::size_t record = 0;
    double deviation = 0.0;
    double se = 0.0;
    double z() const noexcept { return se > 0.0 ? deviation / se : (deviation > 0.0 ? HUGE_VAL : 0.0); }
};
Excursion largest_excursion(const MomentSeries& series, RecordStatistic stat);

/// Records where |stat(t) - reference| > k * se(t) + 1e-12; empty when the
/// statistic stays within the band everywhere.
std::vector<std::size_t> outside_band(const MomentSeries& series, RecordStatistic stat, double reference, double k);

/// Steps k -> k+1 where the statistic moves against `direction` (+1 for
/// non-decreasing, -1 for non-increasing) by more than
/// k_se * sqrt(se_k^2 + se_{k+1}^2) + 1e-12.
std::vector<std::size_t> monotonicity_violations(const MomentSeries& series, RecordStatistic stat, int direction,
                                                 double k_se);

}  // namespace collapse_lab
