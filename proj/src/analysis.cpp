#include <collapse_lab/analysis.hpp>

#include <collapse_lab/errors.hpp>

#include <algorithm>
#include <cmath>
#include <string>

namespace collapse_lab {

namespace {

constexpr double kSpectrumTolerance = 1e-10;

double xlogx(double x) noexcept { return x > 0.0 ? x * std::log(x) : 0.0; }

double clamp_probability(double x, const char* what) {
    if (!(x >= -kSpectrumTolerance && x <= 1.0 + kSpectrumTolerance)) {
        throw InvalidDensityMatrixError(std::string(what) + " " + std::to_string(x) + " outside [0, 1]");
    }
    return std::clamp(x, 0.0, 1.0);
}

}  // namespace

double binary_entropy(double p) noexcept { return -xlogx(p) - xlogx(1.0 - p); }

std::pair<double, double> eigenvalues(const DensityMatrix2& rho) noexcept {
    const double diff = rho.rho00 - rho.rho11;
    const double radius = 0.5 * std::sqrt(diff * diff + 4.0 * std::norm(rho.rho01));
    const double hi = 0.5 * rho.trace() + radius;
    // x- = det / x+ avoids the cancellation in trace/2 - radius near pure states.
    const double det = rho.rho00 * rho.rho11 - std::norm(rho.rho01);
    return {hi, hi > 0.0 ? det / hi : 0.5 * rho.trace() - radius};
}

double von_neumann_entropy(const DensityMatrix2& rho) {
    const auto [hi, lo] = eigenvalues(rho);
    const double xp = clamp_probability(hi, "eigenvalue");
    const double xm = clamp_probability(lo, "eigenvalue");
    return -xlogx(xp) - xlogx(xm);
}

double entanglement_entropy(const PairState& state) {
    require_normalized(state);
    return binary_entropy(std::clamp(state.weight0() / state.norm_squared(), 0.0, 1.0));
}

double avg_entanglement(std::span<const PairState> states) {
    if (states.empty()) throw std::invalid_argument("avg_entanglement: empty snapshot");
    std::vector<MomentSums> terms;
    terms.reserve(states.size());
    for (const PairState& s : states) {
        MomentSums m;
        m.entanglement = entanglement_entropy(s);
        terms.push_back(m);
    }
    return pairwise_sum(terms).entanglement / static_cast<double>(states.size());
}

double avg_entanglement(const MomentSeries& series, std::size_t record) { return series.at(record).entanglement; }

double interrupt_entropy(double p0, double p1) {
    if (std::abs(p0 + p1 - 1.0) > kSpectrumTolerance) {
        throw InvalidDensityMatrixError("populations sum to " + std::to_string(p0 + p1) + ", not 1");
    }
    const double a = clamp_probability(p0, "population");
    const double b = clamp_probability(p1, "population");
    return -xlogx(a) - xlogx(b);
}

double s_td_of(const RecordMoments& m) {
    return von_neumann_entropy(DensityMatrix2{m.alpha2, 1.0 - m.alpha2, m.coherence});
}

double s_td_int_of(const RecordMoments& m) { return interrupt_entropy(m.alpha2, 1.0 - m.alpha2); }

std::vector<EntropyRecord> entropy_series(const MomentSeries& series) {
    std::vector<EntropyRecord> out;
    out.reserve(series.n_records());
    const auto times = series.times();
    for (std::size_t r = 0; r < series.n_records(); ++r) {
        try {
            const RecordMoments m = series.at(r);
            EntropyRecord rec;
            rec.t = times[r];
            rec.mean_alpha2 = m.alpha2;
            rec.coherence = m.coherence;
            const auto td = jackknife(series, [r](const MomentView& v) { return s_td_of(v(r)); });
            const auto ent = jackknife(series, [r](const MomentView& v) { return v(r).entanglement; });
            const auto sum = jackknife(series, [r](const MomentView& v) {
                const RecordMoments x = v(r);
                return s_td_of(x) + x.entanglement;
            });
            const auto tdi = jackknife(series, [r](const MomentView& v) { return s_td_int_of(v(r)); });
            const auto pop = jackknife(series, [r](const MomentView& v) { return v(r).alpha2; });
            rec.s_td = td.value;
            rec.s_ent_avg = ent.value;
            rec.s_sum = rec.s_td + rec.s_ent_avg;
            rec.s_td_int = tdi.value;
            rec.se_s_td = td.se;
            rec.se_s_ent_avg = ent.se;
            rec.se_s_sum = sum.se;
            rec.se_s_td_int = tdi.se;
            rec.se_mean_alpha2 = pop.se;
            out.push_back(rec);
        } catch (const InvalidDensityMatrixError& e) {
            throw InvalidDensityMatrixError("record " + std::to_string(r) + " (tJ = " + std::to_string(times[r]) +
                                            "): " + e.what());
        }
    }
    return out;
}

void DephasingParams::validate() const {
    if (!(gamma >= 0.0)) throw ConfigError("gamma", "must be >= 0");
}

std::vector<DephasingPoint> dephasing_reference(double alpha0_sq, const DephasingParams& params,
                                                std::span<const double> times) {
    params.validate();
    if (!(alpha0_sq >= 0.0 && alpha0_sq <= 1.0)) throw ConfigError("alpha0_sq", "must lie in [0, 1]");
    const double entanglement = binary_entropy(alpha0_sq);
    const double amplitude = std::sqrt(alpha0_sq) * std::sqrt(1.0 - alpha0_sq);
    std::vector<DephasingPoint> out;
    out.reserve(times.size());
    for (double t : times) {
        DephasingPoint pt;
        pt.rho = {alpha0_sq, 1.0 - alpha0_sq, Complex{amplitude * std::exp(-params.gamma * t), 0.0}};
        EntropyRecord& rec = pt.record;
        rec.t = t;
        rec.s_td = von_neumann_entropy(pt.rho);
        rec.s_ent_avg = entanglement;
        rec.s_sum = rec.s_td + rec.s_ent_avg;
        rec.s_td_int = interrupt_entropy(pt.rho.rho00, pt.rho.rho11);
        rec.mean_alpha2 = alpha0_sq;
        rec.coherence = pt.rho.rho01;
        out.push_back(pt);
    }
    return out;
}

}  // namespace collapse_lab

namespace collapse_lab {

double alpha2_of(const RecordMoments& m) { return m.alpha2; }
double s_ent_of(const RecordMoments& m) { return m.entanglement; }
double s_sum_of(const RecordMoments& m) { return s_td_of(m) + m.entanglement; }

namespace {
constexpr double kAbsoluteFloor = 1e-12;

std::vector<JackknifeEstimate> per_record(const MomentSeries& series, RecordStatistic stat) {
    std::vector<JackknifeEstimate> out(series.n_records());
    for (std::size_t r = 0; r < out.size(); ++r) {
        out[r] = jackknife(series, [stat, r](const MomentView& v) { return stat(v(r)); });
    }
    return out;
}
}  // namespace

DropWitness largest_drop(const MomentSeries& series, RecordStatistic stat) {
    const auto est = per_record(series, stat);
    DropWitness best;
    std::size_t argmax = 0;
    for (std::size_t t2 = 1; t2 < est.size(); ++t2) {
        if (est[t2 - 1].value > est[argmax].value) argmax = t2 - 1;
        const double drop = est[argmax].value - est[t2].value;
        if (drop <= 0.0) continue;
        const auto diff = jackknife(series, [stat, a = argmax, t2](const MomentView& v) {
            return stat(v(a)) - stat(v(t2));
        });
        if (drop > best.drop) best = {argmax, t2, drop, diff.se};
    }
    return best;
}

Excursion largest_excursion(const MomentSeries& series, RecordStatistic stat) {
    const auto est = per_record(series, stat);
    std::size_t arg = 0;
    for (std::size_t r = 1; r < est.size(); ++r) {
        if (std::abs(est[r].value - est[0].value) > std::abs(est[arg].value - est[0].value)) arg = r;
    }
    const auto diff = jackknife(series, [stat, arg](const MomentView& v) { return stat(v(arg)) - stat(v(0)); });
    return {arg, std::abs(diff.value), diff.se};
}

std::vector<std::size_t> outside_band(const MomentSeries& series, RecordStatistic stat, double reference, double k) {
    std::vector<std::size_t> bad;
    const auto est = per_record(series, stat);
    for (std::size_t r = 0; r < est.size(); ++r) {
        if (std::abs(est[r].value - reference) > k * est[r].se + kAbsoluteFloor) bad.push_back(r);
    }
    return bad;
}

std::vector<std::size_t> monotonicity_violations(const MomentSeries& series, RecordStatistic stat, int direction,
                                                 double k_se) {
    std::vector<std::size_t> bad;
    const auto est = per_record(series, stat);
    for (std::size_t r = 0; r + 1 < est.size(); ++r) {
        const double change = direction * (est[r + 1].value - est[r].value);
        const double tol = k_se * std::hypot(est[r].se, est[r + 1].se) + kAbsoluteFloor;
        if (change < -tol) bad.push_back(r);
    }
    return bad;
}

}  // namespace collapse_lab
