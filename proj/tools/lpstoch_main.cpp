#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "lpstoch/config.hpp"
#include "lpstoch/verify.hpp"

namespace {

using namespace lpstoch;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;

/// Pulls --run.X / --system.X flags out of argv before CLI11 sees them.
std::vector<std::pair<std::string, std::string>> extract_dotted(std::vector<std::string>& args) {
    std::vector<std::pair<std::string, std::string>> dotted;
    std::vector<std::string> rest;
    for (size_t i = 0; i < args.size(); ++i) {
        const std::string& a = args[i];
        if (a.rfind("--run.", 0) == 0 || a.rfind("--system.", 0) == 0) {
            const auto eq = a.find('=');
            if (eq != std::string::npos) {
                dotted.emplace_back(a.substr(2, eq - 2), a.substr(eq + 1));
            } else if (i + 1 < args.size()) {
                dotted.emplace_back(a.substr(2), args[++i]);
            } else {
                throw std::invalid_argument("missing value for " + a);
            }
        } else {
            rest.push_back(a);
        }
    }
    args = std::move(rest);
    return dotted;
}

std::ostream& open_out(const RunConfig& cfg, std::ofstream& file) {
    if (cfg.out.empty()) return std::cout;
    file.open(cfg.out);
    if (!file) throw std::invalid_argument("cannot open output file: " + cfg.out);
    return file;
}

int cmd_simulate(const SystemPair& sys, const RunConfig& cfg) {
    const long N = std::lround(cfg.T / cfg.h);
    const DrivingPath path =
        make_time_brownian(cfg.seed, cfg.h, static_cast<int>(N), sys.red.k());
    StepperConfig step;
    step.scheme = scheme_from_string(cfg.scheme);
    std::ofstream file;
    std::ostream& os = open_out(cfg, file);
    if (cfg.form == "unreduced") {
        const UnreducedState s0 = embed_state(sys.red.conn, sys.s0, sys.g0);
        write_unreduced_csv(integrate_unreduced(sys.unred, s0, path, step), os);
    } else {
        write_reduced_csv(integrate_reduced(sys.red, sys.s0, path, step), os);
    }
    return kExitOk;
}

int cmd_compare(const SystemPair& sys, const RunConfig& cfg) {
    CompareConfig cc;
    cc.T = cfg.T;
    cc.h0 = cfg.h;
    cc.levels = cfg.levels;
    cc.paths = cfg.paths;
    cc.seed = cfg.seed;
    cc.step.scheme = scheme_from_string(cfg.scheme);
    const ConvergenceReport rep = compare_reduced_unreduced(sys, cc);
    rep.print_summary(std::cout);
    if (!cfg.out.empty()) {
        std::ofstream file(cfg.out);
        rep.write_csv(file);
    }
    if (rep.fitted_order >= 0.75) return kExitOk;
    std::cerr << "compare: fitted order " << rep.fitted_order
              << " below 0.75; refine h or check the system setup\n";
    return kExitNumeric;
}

int cmd_mc(const SystemPair& sys, const RunConfig& cfg) {
    if (cfg.trials < 100)
        std::cerr << "mc: warning: " << cfg.trials
                  << " trials is underpowered; stderr estimates will be noisy\n";
    EnsembleConfig ec;
    ec.T = cfg.T;
    ec.h = cfg.h;
    ec.trials = cfg.trials;
    ec.slices = cfg.slices;
    ec.seed = cfg.seed;
    ec.step.scheme = scheme_from_string(cfg.scheme);
    const EnsembleReport rep = monte_carlo(sys, ec);
    rep.print_summary(std::cout);
    if (!cfg.out.empty()) {
        std::ofstream file(cfg.out);
        rep.write_csv(file);
    }
    if (!sys.mc.criterion) {
        std::cout << "no acceptance criterion registered for " << sys.name
                  << "; report only\n";
        return kExitOk;
    }
    const auto [pass, msg] = sys.mc.criterion(rep);
    std::cout << (pass ? "PASS " : "FAIL ") << msg << '\n';
    return pass ? kExitOk : kExitNumeric;
}

int cmd_check(const SystemPair& sys, const RunConfig& cfg) {
    const auto checks = run_system_checks(sys, cfg.seed);
    std::cout << "checks for " << sys.name << ":\n";
    print_check_table(checks, std::cout);
    bool all = true;
    for (const auto& c : checks) all = all && c.pass;
    std::cout << (all ? "all checks passed" : "some checks FAILED") << '\n';
    return all ? kExitOk : kExitNumeric;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stochastic reduced/unreduced mechanics toolkit"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    RunConfig flags;  // flag values; merged over the config file
    app.add_option("--config", config_path, "TOML-style config file ([run], [system])");
    auto* oS = app.add_option("--system", flags.system, "system name");
    auto* oT = app.add_option("--T", flags.T, "time horizon");
    auto* oh = app.add_option("--h", flags.h, "step size");
    auto* oseed = app.add_option("--seed", flags.seed, "master seed");
    auto* otr = app.add_option("--trials", flags.trials, "Monte-Carlo trials");
    auto* osc = app.add_option("--scheme", flags.scheme, "euler_heun | midpoint");
    auto* oout = app.add_option("--out", flags.out, "output file (CSV)");
    auto* oform = app.add_option("--form", flags.form, "simulate: reduced | unreduced");
    auto* olev = app.add_option("--levels", flags.levels, "dyadic refinement levels");
    auto* opa = app.add_option("--paths", flags.paths, "coupled paths for compare");
    auto* osl = app.add_option("--slices", flags.slices, "report time slices");

    auto* sim = app.add_subcommand("simulate", "integrate one trajectory and write CSV");
    auto* cmp = app.add_subcommand("compare", "reduced vs unreduced convergence study");
    auto* mc = app.add_subcommand("mc", "Monte-Carlo ensemble of the registered observable");
    auto* chk = app.add_subcommand("check", "run the per-system verification suite");

    std::vector<std::string> args(argv + 1, argv + argc);
    std::vector<std::pair<std::string, std::string>> dotted;
    try {
        dotted = extract_dotted(args);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    try {
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }

    RunConfig cfg;
    try {
        if (!config_path.empty()) cfg = parse_config_file(config_path);
        for (const auto& [key, value] : dotted) apply_dotted(cfg, key, value);
        if (oS->count()) cfg.system = flags.system;
        if (oT->count()) cfg.T = flags.T;
        if (oh->count()) cfg.h = flags.h;
        if (oseed->count()) cfg.seed = flags.seed;
        if (otr->count()) cfg.trials = flags.trials;
        if (osc->count()) cfg.scheme = flags.scheme;
        if (oout->count()) cfg.out = flags.out;
        if (oform->count()) cfg.form = flags.form;
        if (olev->count()) cfg.levels = flags.levels;
        if (opa->count()) cfg.paths = flags.paths;
        if (osl->count()) cfg.slices = flags.slices;
        cfg.validate();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    try {
        const SystemPair sys = make_system(cfg.system, cfg.system_overrides);
        if (sim->parsed()) return cmd_simulate(sys, cfg);
        if (cmp->parsed()) return cmd_compare(sys, cfg);
        if (mc->parsed()) return cmd_mc(sys, cfg);
        if (chk->parsed()) return cmd_check(sys, cfg);
        std::cerr << "error: no command\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumeric;
    }
}
