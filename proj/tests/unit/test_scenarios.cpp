#include <collapse_lab/errors.hpp>
#include <collapse_lab/scenarios.hpp>

#include <doctest.h>
#include <oracles.hpp>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

using namespace collapse_lab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("collapse_lab_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

ScenarioConfig small(const fs::path& dir) {
    ScenarioConfig c;
    c.n_traj = 500;
    c.t_max = 2.0;
    c.record_every = 0.05;
    c.k_samples = 5;
    c.workers = 1;
    c.out_dir = dir.string();
    c.run_id = "t";
    return c;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

std::vector<std::string> lines(const fs::path& p) {
    std::istringstream in(slurp(p));
    std::vector<std::string> out;
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

const Check* find_check(const ScenarioResult& r, const std::string& name) {
    for (const auto& c : r.checks) {
        if (c.name == name) return &c;
    }
    return nullptr;
}

}  // namespace

TEST_CASE("number formatting") {
    CHECK(format_number(0.5623351446188083) == "0.562335144619");
    CHECK(format_number(-0.0) == "0");
    CHECK(format_number(1e-20) == "1e-20");
    CHECK(format_number(6.0) == "6");
}

TEST_CASE("fig1 writes trajectories, averages and a manifest") {
    const fs::path dir = scratch("fig1");
    const ScenarioResult r = scenario_fig1(small(dir));
    REQUIRE(r.outputs.size() == 3);
    CHECK(r.outputs.back().filename() == "fig1_t.manifest.json");
    const auto traj = lines(dir / "fig1_t_trajectories.csv");
    CHECK(traj[0] == "# schema: collapse_lab.fig1_trajectories/1");
    CHECK(traj[1] == "# frozen xi: -1,-0.5,0,0.5,1");
    CHECK(traj[3].rfind("tJ,frozen_0,frozen_1,frozen_2,frozen_3,frozen_4,white_0", 0) == 0);
    CHECK(traj.size() == 4 + 41);
    const Check* fastest = find_check(r, "extreme_xi_fastest");
    REQUIRE(fastest != nullptr);
    CHECK(fastest->passed);
    const auto avg = lines(dir / "fig1_t_averages.csv");
    CHECK(avg[2] == "tJ,frozen_mean_alpha2,frozen_abs_coherence,frozen_se_mean_alpha2,white_mean_alpha2,"
                    "white_abs_coherence,white_se_mean_alpha2");
    CHECK(avg[3].rfind("0,0.75,0.433012701892,0,0.75,0.433012701892,0", 0) == 0);
}

TEST_CASE("fig2 entropy files share one grid and start from the pure state") {
    const fs::path dir = scratch("fig2");
    const ScenarioResult r = scenario_fig2(small(dir));
    const auto frozen = lines(dir / "fig2_t_frozen.csv");
    const auto white = lines(dir / "fig2_t_white.csv");
    CHECK(frozen[0] == std::string("# schema: ") + kEntropySchema);
    CHECK(frozen[1].rfind("# units: 1/J,nat", 0) == 0);
    CHECK(frozen[2].rfind("tJ,s_td,s_ent_avg,s_sum,s_td_int,mean_alpha2", 0) == 0);
    CHECK(frozen.size() == white.size());
    for (std::size_t i = 3; i < frozen.size(); ++i) {
        CHECK(frozen[i].substr(0, frozen[i].find(',')) == white[i].substr(0, white[i].find(',')));
    }
    // First row: tJ = 0, s_td of a pure ensemble (round-off only), then S_ent, S_sum, S_int, E|alpha|^2.
    std::istringstream row(frozen[3]);
    std::vector<double> v;
    for (std::string cell; std::getline(row, cell, ',');) v.push_back(std::stod(cell));
    CHECK(v[0] == 0.0);
    CHECK(std::abs(v[1]) < 1e-12);
    CHECK(v[2] == doctest::Approx(oracle::kEntropy34).epsilon(1e-11));
    CHECK(v[4] == doctest::Approx(oracle::kEntropy34).epsilon(1e-11));
    CHECK(v[5] == 0.75);
    const Check* bounds = find_check(r, "frozen_record_bounds");
    REQUIRE(bounds != nullptr);
    CHECK(bounds->passed);
}

TEST_CASE("replay from a manifest reproduces the data bytes") {
    const fs::path dir = scratch("replay");
    const ScenarioResult a = scenario_fig2(small(dir));
    const ScenarioResult b = replay_manifest(a.outputs.back(), dir.string(), "again");
    REQUIRE(a.outputs.size() == b.outputs.size());
    for (std::size_t i = 0; i + 1 < a.outputs.size(); ++i) CHECK(slurp(a.outputs[i]) == slurp(b.outputs[i]));
    CHECK_THROWS(replay_manifest(dir / "missing.json", dir.string(), "x"));
}

TEST_CASE("interrupt at t = 0 projects the initial pure state") {
    ScenarioConfig c = small(scratch("interrupt"));
    c.t_interrupt = 0.0;
    const ScenarioResult r = scenario_interrupt(c);
    CHECK(r.summary["s_td_post"].get<double>() == doctest::Approx(oracle::kEntropy34).epsilon(1e-14));
    CHECK(r.summary["s_td_pre"].get<double>() < 1e-7);
    CHECK(r.passed());
    c.t_interrupt = 0.123;
    CHECK_THROWS_AS(scenario_interrupt(c), ConfigError);
}

TEST_CASE("white-noise interrupt keeps the local entropy") {
    ScenarioConfig c = small(scratch("interrupt_white"));
    c.noise = NoiseKind::white;
    c.n_traj = 4000;
    c.t_interrupt = 1.0;
    const ScenarioResult r = scenario_interrupt(c);
    const double post = r.summary["s_td_post"].get<double>();
    const double se = r.summary["se_s_td_post"].get<double>();
    CHECK(std::abs(post - oracle::kEntropy34) <= 3.0 * se);
}

TEST_CASE("born with a basis-state start is exact") {
    ScenarioConfig c = small(scratch("born1"));
    c.alpha0_sq = 1.0;
    const ScenarioResult r = scenario_born(c);
    CHECK(r.summary["p00_hat"].get<double>() == 1.0);
    CHECK(r.summary["status"] == "pass");
    CHECK(fs::exists(fs::path(c.out_dir) / "born_t.json"));
}

TEST_CASE("born with white noise from the equal superposition") {
    ScenarioConfig c = small(scratch("born_white"));
    c.alpha0_sq = 0.5;
    c.noise = NoiseKind::white;
    c.n_traj = 10000;
    c.t_max = 6.0;
    c.born_tolerance = 0.015;
    const ScenarioResult r = scenario_born(c);
    CHECK(std::abs(r.summary["p00_hat"].get<double>() - 0.5) <= 0.015);
    const auto& h = r.summary["histogram"];
    CHECK(h["00"].get<std::size_t>() + h["11"].get<std::size_t>() + h["unresolved"].get<std::size_t>() == 10000);
}

TEST_CASE("born reports a warning when too many trajectories stay unresolved") {
    ScenarioConfig c = small(scratch("born_warn"));
    c.t_max = 0.1;
    c.born_tolerance = 1.0;
    const ScenarioResult r = scenario_born(c);
    CHECK(r.summary["status"] == "warning");
}

TEST_CASE("dephasing without decay stays pure") {
    ScenarioConfig c = small(scratch("dephasing"));
    c.gamma = 0.0;
    const ScenarioResult r = scenario_dephasing(c);
    const Check* pure = find_check(r, "no_decay_stays_pure");
    REQUIRE(pure != nullptr);
    CHECK(pure->passed);
    CHECK(find_check(r, "reference_populations_constant")->passed);
    const auto ref = lines(fs::path(c.out_dir) / "dephasing_t_reference.csv");
    CHECK(ref.size() == 3 + 41);
}

TEST_CASE("configuration errors name the field") {
    ScenarioConfig c = small(scratch("errors"));
    c.dt = 0.0;
    try {
        run_scenario("fig2", c);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.field() == "dt");
    }
    c.dt = 1e-3;
    c.gamma = -1.0;
    CHECK_THROWS_AS(scenario_dephasing(c), ConfigError);
    CHECK_THROWS_AS(run_scenario("fig3", small(scratch("errors"))), ConfigError);
}

TEST_CASE("config round-trips through JSON") {
    ScenarioConfig c;
    c.noise = NoiseKind::ou;
    c.tau = 2.5;
    c.seed = 99;
    const nlohmann::json j = c;
    const ScenarioConfig back = j.get<ScenarioConfig>();
    CHECK(back.noise == NoiseKind::ou);
    CHECK(back.tau == 2.5);
    CHECK(back.seed == 99);
}
