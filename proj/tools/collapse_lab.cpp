// collapse-lab: scenario runner for the two-qubit reduction simulator.

#include <collapse_lab/errors.hpp>
#include <collapse_lab/scenarios.hpp>

#include <CLI11.hpp>

#include <algorithm>
#include <iostream>
#include <map>
#include <string>

using namespace collapse_lab;

namespace {

struct Subcommand {
    CLI::App* app = nullptr;
    ScenarioConfig config;
    std::string noise = "frozen";
    CLI::Option* j = nullptr;
    CLI::Option* g = nullptr;
    CLI::Option* dt = nullptr;
    CLI::Option* lambda = nullptr;
    CLI::Option* gamma = nullptr;
};

// "--n-traj,--n_traj": config files may spell keys either way.
std::string names(const std::string& key) {
    std::string snake = key;
    std::replace(snake.begin(), snake.end(), '-', '_');
    return "--" + key + ",--" + snake;
}

void add_common(Subcommand& s) {
    auto& c = s.config;
    auto* app = s.app;
    app->add_option(names("n-traj"), c.n_traj, "number of trajectories")->capture_default_str();
    app->add_option(names("alpha0-sq"), c.alpha0_sq, "initial weight |alpha(0)|^2")->capture_default_str();
    app->add_option("--dt", c.dt, "integration step (default 1e-3/J)")->capture_default_str();
    app->add_option(names("t-max"), c.t_max, "integration window")->capture_default_str();
    app->add_option(names("record-every"), c.record_every, "recording interval")->capture_default_str();
    app->add_option("--noise", s.noise, "noise regime")
        ->check(CLI::IsMember({"frozen", "ou", "white"}))
        ->capture_default_str();
    app->add_option("--tau", c.tau, "OU correlation time")->capture_default_str();
    app->add_option("--g0", c.g0, "OU diffusion amplitude")->capture_default_str();
    app->add_option("--lambda", c.lambda, "white-noise collapse rate (default J)")->capture_default_str();
    app->add_option("--gamma", c.gamma, "dephasing rate (default 2 lambda)")->capture_default_str();
    app->add_option("--seed", c.seed, "master seed")->capture_default_str();
    app->add_option(names("out-dir"), c.out_dir, "output directory")->capture_default_str();
    app->add_option("--workers", c.workers, "worker threads (0 = all cores)")
        ->envname("COLLAPSE_LAB_WORKERS")
        ->capture_default_str();
    app->add_option(names("coupling-j"), c.coupling_j, "nonlinear coupling J")->capture_default_str();
    app->add_option(names("coupling-g"), c.coupling_g, "stochastic coupling G (default J)")->capture_default_str();
    app->add_option(names("k-samples"), c.k_samples, "sample trajectories per regime (fig1)")->capture_default_str();
    app->add_option(names("t-interrupt"), c.t_interrupt, "projection time (interrupt)")->capture_default_str();
    app->add_option(names("born-tolerance"), c.born_tolerance, "allowed |P(00) - alpha0^2| (born)")
        ->capture_default_str();
    app->add_flag("--stratified", c.stratified, "stratify frozen xi draws");
    app->add_option(names("run-id"), c.run_id, "file name suffix (default: UTC timestamp)");
    s.j = app->get_option("--coupling-j");
    s.g = app->get_option("--coupling-g");
    s.dt = app->get_option("--dt");
    s.lambda = app->get_option("--lambda");
    s.gamma = app->get_option("--gamma");
}

// Defaults that follow J (G = lambda = J, dt = 1e-3/J) and lambda (gamma = 2 lambda).
void resolve_defaults(Subcommand& s) {
    auto& c = s.config;
    c.noise = parse_noise_kind(s.noise);
    if (s.j->count() > 0) {
        if (s.g->count() == 0) c.coupling_g = c.coupling_j;
        if (s.lambda->count() == 0) c.lambda = c.coupling_j;
        if (s.dt->count() == 0) c.dt = 1e-3 / c.coupling_j;
    }
    if (s.gamma->count() == 0) c.gamma = 2.0 * c.lambda;
}

int report(const ScenarioResult& result) {
    for (const auto& p : result.outputs) std::cout << "wrote " << p.string() << '\n';
    for (const auto& c : result.checks) {
        std::cout << (c.passed ? "[PASS] " : "[FAIL] ") << c.name << ": " << c.detail << '\n';
    }
    return result.passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Monte Carlo simulator for objective state reduction of an entangled qubit pair"};
    app.set_version_flag("--version", std::string(collapse_lab::version()));
    app.set_config("--config", "", "INI/TOML config file with one [section] per subcommand");
    app.require_subcommand(1);
    app.allow_config_extras(CLI::config_extras_mode::error);

    const std::map<std::string, std::string> help{
        {"fig1", "sample trajectories and ensemble averages, frozen and white noise"},
        {"fig2", "entropy and entanglement time series, frozen and white noise"},
        {"interrupt", "entropies before and after a projective measurement at --t-interrupt"},
        {"born", "terminal outcome statistics against the Born rule"},
        {"dephasing", "pure-dephasing reference next to a matched white-noise run"},
    };
    std::map<std::string, Subcommand> subs;
    for (const auto& [name, text] : help) {
        Subcommand& s = subs[name];
        if (name == "born") s.config.t_max = 20.0;
        s.app = app.add_subcommand(name, text);
        add_common(s);
    }

    std::string manifest;
    std::string replay_dir = ".";
    std::string replay_id;
    auto* replay = app.add_subcommand("replay", "re-run the scenario recorded in a manifest");
    replay->add_option("manifest", manifest, "path to a .manifest.json")->required()->check(CLI::ExistingFile);
    replay->add_option("--out-dir", replay_dir, "output directory")->capture_default_str();
    replay->add_option("--run-id", replay_id, "file name suffix")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (replay->parsed()) return report(replay_manifest(manifest, replay_dir, replay_id));
        for (auto& [name, s] : subs) {
            if (!s.app->parsed()) continue;
            resolve_defaults(s);
            return report(run_scenario(name, s.config));
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error (" << e.field() << "): " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}
