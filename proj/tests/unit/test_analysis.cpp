#include <collapse_lab/analysis.hpp>
#include <collapse_lab/errors.hpp>
#include <collapse_lab/rng.hpp>

#include <doctest.h>
#include <oracles.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

using namespace collapse_lab;

namespace {

DensityMatrix2 random_density(Philox4x32& rng) {
    // Mixture of two random pure states with random weight.
    DensityMatrix2 rho{0.0, 0.0, {}};
    double left = 1.0;
    for (int k = 0; k < 2; ++k) {
        const double p = k == 0 ? rng.uniform01() : left;
        left -= p;
        const double w = rng.uniform01();
        const Complex c = std::polar(std::sqrt(w * (1.0 - w)), 6.283185307179586 * rng.uniform01());
        rho.rho00 += p * w;
        rho.rho11 += p * (1.0 - w);
        rho.rho01 += p * c;
    }
    return rho;
}

const std::vector<double> kTimes{0.0};

MomentSeries one_record(const std::vector<PairState>& states) {
    return summarize_snapshots(std::vector<std::vector<PairState>>{states}, kTimes);
}

}  // namespace

TEST_CASE("von Neumann entropy of simple matrices") {
    const PairState s{Complex{std::sqrt(0.75), 0.0}, Complex{0.5, 0.0}};
    CHECK(std::abs(von_neumann_entropy(DensityMatrix2::pure(s))) < 1e-15);
    CHECK(von_neumann_entropy(DensityMatrix2{1.0, 0.0, {}}) == 0.0);
    CHECK(von_neumann_entropy(DensityMatrix2{0.5, 0.5, {}}) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    CHECK(von_neumann_entropy(DensityMatrix2{0.75, 0.25, {}}) ==
          doctest::Approx(oracle::kEntropy34).epsilon(1e-15));
    CHECK(std::abs(von_neumann_entropy(DensityMatrix2{0.75, 0.25, {}}) - 0.562335) < 5e-7);
}

TEST_CASE("entanglement entropy of simple states") {
    CHECK(entanglement_entropy(PairState{}) == 0.0);
    const PairState bell{Complex{std::sqrt(0.5), 0.0}, Complex{std::sqrt(0.5), 0.0}};
    CHECK(entanglement_entropy(bell) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    const PairState s{Complex{std::sqrt(0.75), 0.0}, Complex{0.5, 0.0}};
    CHECK(entanglement_entropy(s) == doctest::Approx(oracle::kEntropy34).epsilon(1e-15));
    CHECK_THROWS_AS(entanglement_entropy(PairState{Complex{0.5, 0.0}, Complex{0.5, 0.0}}), InvalidStateError);
}

TEST_CASE("average entanglement") {
    const PairState s{Complex{std::sqrt(0.75), 0.0}, Complex{0.5, 0.0}};
    const std::vector<PairState> constant(64, s);
    CHECK(avg_entanglement(constant) == doctest::Approx(oracle::kEntropy34).epsilon(1e-14));
    CHECK(avg_entanglement(one_record(constant), 0) == doctest::Approx(oracle::kEntropy34).epsilon(1e-14));
    std::vector<PairState> split(64, PairState{});
    for (std::size_t i = 32; i < 64; ++i) split[i] = {Complex{0.0, 0.0}, Complex{1.0, 0.0}};
    CHECK(avg_entanglement(split) == 0.0);
    CHECK_THROWS_AS(avg_entanglement(std::vector<PairState>{}), std::invalid_argument);
}

TEST_CASE("interrupt entropy") {
    CHECK(interrupt_entropy(0.75, 0.25) == doctest::Approx(oracle::kEntropy34).epsilon(1e-15));
    CHECK(interrupt_entropy(1.0, 0.0) == 0.0);
    CHECK_THROWS_AS(interrupt_entropy(0.7, 0.4), InvalidDensityMatrixError);
}

TEST_CASE("closed-form entropy matches a direct eigensolver") {
    Philox4x32 rng(17, 0);
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const DensityMatrix2 rho = random_density(rng);
        const auto [e1, e2] = oracle::hermitian_eigen(rho.rho00, rho.rho11, rho.rho01);
        const double direct = oracle::entropy_of_spectrum(std::max(e1, 0.0), std::max(e2, 0.0));
        worst = std::max(worst, std::abs(von_neumann_entropy(rho) - direct));
    }
    MESSAGE("largest deviation " << worst);
    CHECK(worst < 1e-10);
}

TEST_CASE("dephasing never lowers the spectral entropy") {
    Philox4x32 rng(18, 0);
    for (int i = 0; i < 10000; ++i) {
        const DensityMatrix2 rho = random_density(rng);
        CHECK(interrupt_entropy(rho.rho00, rho.rho11) >= von_neumann_entropy(rho) - 1e-15);
    }
}

TEST_CASE("diagonal pure states: both entropy paths agree") {
    Philox4x32 rng(19, 0);
    for (int i = 0; i < 100; ++i) {
        const bool up = rng.uniform01() < 0.5;
        const double phase = 6.283185307179586 * rng.uniform01();
        const PairState s = up ? PairState{std::polar(1.0, phase), Complex{}} : PairState{Complex{}, std::polar(1.0, phase)};
        CHECK(std::abs(von_neumann_entropy(DensityMatrix2::pure(s)) - entanglement_entropy(s)) <= 1e-12);
    }
}

TEST_CASE("entropy clamps round-off and rejects invalid spectra") {
    CHECK(von_neumann_entropy(DensityMatrix2{1.0 + 1e-12, -1e-12, {}}) >= 0.0);
    CHECK_THROWS_AS(von_neumann_entropy(DensityMatrix2{1.2, -0.2, {}}), InvalidDensityMatrixError);
}

TEST_CASE("entropy records of simple ensembles") {
    const PairState s{Complex{std::sqrt(0.75), 0.0}, Complex{0.5, 0.0}};
    const auto pure = entropy_series(one_record(std::vector<PairState>(100, s)));
    CHECK(std::abs(pure[0].s_td) < 1e-7);
    CHECK(pure[0].s_ent_avg == doctest::Approx(oracle::kEntropy34).epsilon(1e-14));
    CHECK(pure[0].s_td_int == doctest::Approx(oracle::kEntropy34).epsilon(1e-14));
    CHECK(pure[0].s_sum == doctest::Approx(pure[0].s_td + pure[0].s_ent_avg));

    std::vector<PairState> split(100, PairState{});
    for (std::size_t i = 50; i < 100; ++i) split[i] = {Complex{0.0, 0.0}, Complex{1.0, 0.0}};
    const auto mixed = entropy_series(one_record(split));
    CHECK(mixed[0].s_td == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    CHECK(mixed[0].s_ent_avg == 0.0);
}

TEST_CASE("dephasing reference") {
    const std::vector<double> times{0.0, 0.5, 1.0, 5.0, 20.0};
    const auto none = dephasing_reference(0.75, DephasingParams{0.0}, times);
    for (const auto& p : none) {
        CHECK(std::abs(p.record.s_td) < 1e-7);
        CHECK(p.rho.purity() == doctest::Approx(1.0).epsilon(1e-14));
    }
    const auto decay = dephasing_reference(0.75, DephasingParams{2.0}, times);
    CHECK(decay.back().record.s_td == doctest::Approx(oracle::kEntropy34).epsilon(1e-12));
    for (std::size_t i = 1; i < decay.size(); ++i) CHECK(decay[i].record.s_td >= decay[i - 1].record.s_td);
    for (const auto& p : decay) {
        CHECK(p.record.s_td_int == doctest::Approx(oracle::kEntropy34).epsilon(1e-15));
        CHECK(p.record.s_ent_avg == doctest::Approx(oracle::kEntropy34).epsilon(1e-15));
        CHECK(p.rho.rho00 == 0.75);
    }
    CHECK_THROWS_AS(dephasing_reference(0.75, DephasingParams{-1.0}, times), ConfigError);
}

TEST_CASE("jackknife of a mean is the usual standard error") {
    // 50 blocks of 2 identical values each: block means 0, 1, 0, 1, ...
    std::vector<PairState> states;
    for (int b = 0; b < 50; ++b) {
        const PairState s = b % 2 == 0 ? PairState{} : PairState{Complex{0.0, 0.0}, Complex{1.0, 0.0}};
        states.push_back(s);
        states.push_back(s);
    }
    const MomentSeries series = one_record(states);
    const auto est = jackknife(series, [](const MomentView& v) { return v(0).alpha2; });
    // Delete-one jackknife of a mean equals sd(block means) / sqrt(B).
    const double sd = std::sqrt(0.25 * 50.0 / 49.0);
    CHECK(est.value == 0.5);
    CHECK(est.se == doctest::Approx(sd / std::sqrt(50.0)).epsilon(1e-12));
}

TEST_CASE("shape checks on a synthetic series") {
    // alpha2 rises then falls: one drop, no band violations for a wide band.
    std::vector<std::vector<PairState>> snaps;
    std::vector<double> times;
    for (int r = 0; r < 5; ++r) {
        const double w = r < 3 ? 0.5 + 0.1 * r : 0.7 - 0.15 * (r - 2);
        std::vector<PairState> snap;
        for (int i = 0; i < 100; ++i) snap.push_back(PairState::from_weight(std::clamp(w + 0.001 * (i % 7), 0.0, 1.0)));
        snaps.push_back(snap);
        times.push_back(r);
    }
    const MomentSeries s = summarize_snapshots(snaps, times);
    const DropWitness d = largest_drop(s, alpha2_of);
    CHECK(d.t1 == 2);
    CHECK(d.t2 == 4);
    CHECK(d.drop == doctest::Approx(0.3).epsilon(1e-9));
    CHECK(monotonicity_violations(s, alpha2_of, +1, 3.0) == std::vector<std::size_t>{2, 3});
    CHECK(monotonicity_violations(s, alpha2_of, -1, 3.0) == std::vector<std::size_t>{0, 1});
    CHECK(outside_band(s, alpha2_of, s.at(0).alpha2, 3.0).size() == 4);
    CHECK(largest_excursion(s, alpha2_of).record == 2);
}
