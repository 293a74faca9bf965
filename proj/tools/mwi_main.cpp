// mwi - batch runner for the many-worlds branching scenarios.
//
// Usage: mwi <command> [flags] | mwi validate <file>
// Flags mirror the JSON config keys one-to-one; --config loads a JSON file
// whose values the flags override.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "mwi/cli.hpp"

namespace {

using mwi::cli::json;

struct FlagSet {
    // top-level keys
    std::string config_path;
    std::uint64_t seed = 0;
    unsigned streams = 1;
    std::string format;
    std::string out;
    std::string dump;
    // scalar params shared across commands; only flags the user actually
    // passed are merged into the config
    double p = 0.0, tol = 0.0, step_sigma = 0.0, threshold = 0.0, r0 = 0.0;
    double drift_sigma = 0.0, epsilon = 0.0, universe_age_s = 0.0, planck_time_s = 0.0;
    double branching_base = 0.0, log10_event_prob = 0.0, log10_attempts = 0.0;
    double log10_log10_branches = 0.0;
    std::uint64_t copies = 0, outcome = 0, trials = 0, dim = 0, samples = 0;
    std::uint64_t steps = 0, branches = 0, intermediates = 0;
    std::uint64_t initial_index = 0, final_index = 0, max_leaves = 0;
    bool reflecting = true;
    std::string mode, variant, state_path, state_text, steps_text;
    std::vector<double> amplitudes_re, amplitudes_im;
};

void add_common_flags(CLI::App* cmd, FlagSet& f) {
    cmd->add_option("--config", f.config_path, "JSON config file; flags override its values");
    cmd->add_option("--seed", f.seed, "RNG seed (required for stochastic commands)");
    cmd->add_option("--streams", f.streams, "independent sample streams (default 1)");
    cmd->add_option("--format", f.format, "report format: json|csv");
    cmd->add_option("--out", f.out, "write the report here instead of stdout");
    cmd->add_option("--dump", f.dump, "write the per-sample CSV dump here");
}

// merge a flag into cfg if the subcommand has it and the user passed it
template <typename T>
void merge(CLI::App* cmd, const char* flag, json& obj, const char* key, const T& val) {
    const CLI::Option* opt = cmd->get_option_no_throw(flag);
    if (opt && opt->count() > 0) obj[key] = val;
}

int fail_config(const std::vector<std::string>& violations) {
    for (const auto& v : violations) std::cerr << "config error: " << v << "\n";
    return mwi::cli::kExitConfig;
}

int run_command(CLI::App* cmd, const std::string& command, FlagSet& f) {
    json cfg = json::object();
    if (cmd->count("--config") > 0) {
        std::ifstream in(f.config_path);
        if (!in) {
            std::cerr << "config error: config: cannot open \"" << f.config_path << "\"\n";
            return mwi::cli::kExitConfig;
        }
        cfg = json::parse(in, nullptr, false);
        if (cfg.is_discarded()) return fail_config({"root: malformed JSON"});
        if (!cfg.is_object()) return fail_config({"root: config must be a JSON object"});
    }
    cfg["command"] = command;
    if (!cfg.contains("params") || !cfg["params"].is_object()) cfg["params"] = json::object();
    json& params = cfg["params"];

    merge(cmd, "--seed", cfg, "seed", f.seed);
    merge(cmd, "--streams", cfg, "streams", f.streams);
    merge(cmd, "--format", cfg, "format", f.format);
    merge(cmd, "--out", cfg, "out", f.out);
    merge(cmd, "--dump", cfg, "dump", f.dump);

    merge(cmd, "--p", params, "p", f.p);
    merge(cmd, "--tol", params, "tol", f.tol);
    merge(cmd, "--copies", params, "copies", f.copies);
    merge(cmd, "--outcome", params, "outcome", f.outcome);
    merge(cmd, "--trials", params, "trials", f.trials);
    merge(cmd, "--dim", params, "dim", f.dim);
    merge(cmd, "--samples", params, "samples", f.samples);
    if (command != "branch") merge(cmd, "--steps", params, "steps", f.steps);
    merge(cmd, "--branches", params, "branches", f.branches);
    merge(cmd, "--intermediates", params, "intermediates", f.intermediates);
    merge(cmd, "--initial_index", params, "initial_index", f.initial_index);
    merge(cmd, "--final_index", params, "final_index", f.final_index);
    merge(cmd, "--max_leaves", params, "max_leaves", f.max_leaves);
    merge(cmd, "--step_sigma", params, "step_sigma", f.step_sigma);
    merge(cmd, "--threshold", params, "threshold", f.threshold);
    merge(cmd, "--r0", params, "r0", f.r0);
    merge(cmd, "--drift_sigma", params, "drift_sigma", f.drift_sigma);
    merge(cmd, "--epsilon", params, "epsilon", f.epsilon);
    merge(cmd, "--universe_age_s", params, "universe_age_s", f.universe_age_s);
    merge(cmd, "--planck_time_s", params, "planck_time_s", f.planck_time_s);
    merge(cmd, "--branching_base", params, "branching_base", f.branching_base);
    merge(cmd, "--log10_event_prob", params, "log10_event_prob", f.log10_event_prob);
    merge(cmd, "--log10_attempts", params, "log10_attempts", f.log10_attempts);
    merge(cmd, "--log10_log10_branches", params, "log10_log10_branches", f.log10_log10_branches);
    merge(cmd, "--reflecting", params, "reflecting", f.reflecting);
    merge(cmd, "--mode", params, "mode", f.mode);
    merge(cmd, "--variant", params, "variant", f.variant);
    merge(cmd, "--state_path", params, "state_path", f.state_path);
    merge(cmd, "--amplitudes_re", params, "amplitudes_re", f.amplitudes_re);
    merge(cmd, "--amplitudes_im", params, "amplitudes_im", f.amplitudes_im);

    if (command == "schmidt" && cmd->count("--state") > 0) {
        json st = json::parse(f.state_text, nullptr, false);
        if (st.is_discarded()) return fail_config({"params.state: malformed JSON"});
        params["state"] = st;
    }
    if (command == "branch" && cmd->count("--steps") > 0) {
        json st = json::parse(f.steps_text, nullptr, false);
        if (st.is_discarded()) return fail_config({"params.steps: malformed JSON"});
        params["steps"] = st;
    }

    const auto violations = mwi::cli::validate_config(cfg);
    if (!violations.empty()) return fail_config(violations);

    mwi::cli::ScenarioConfig sc;
    sc.command = command;
    sc.params = params;
    if (cfg.contains("seed")) sc.seed = cfg["seed"].get<std::uint64_t>();
    if (cfg.contains("streams")) sc.streams = cfg["streams"].get<unsigned>();
    if (cfg.contains("format")) sc.format = cfg["format"].get<std::string>();
    if (cfg.contains("out")) sc.out = cfg["out"].get<std::string>();
    std::optional<std::string> dump_path;
    if (cfg.contains("dump")) dump_path = cfg["dump"].get<std::string>();
    sc.want_dump = dump_path.has_value();
    if (const char* env = std::getenv("MWI_MAX_LEAVES")) {
        char* end = nullptr;
        const unsigned long long cap = std::strtoull(env, &end, 10);
        if (end && *end == '\0' && cap >= 1) sc.max_leaves = static_cast<std::size_t>(cap);
    }

    try {
        const auto report = mwi::cli::build_report(sc);
        if (sc.out) {
            std::ofstream o(*sc.out);
            if (!o) {
                std::cerr << "error: cannot write \"" << *sc.out << "\"\n";
                return mwi::cli::kExitInternal;
            }
            o << report.body;
        } else {
            std::cout << report.body;
        }
        if (dump_path && !report.dump_csv.empty()) {
            std::ofstream o(*dump_path);
            if (!o) {
                std::cerr << "error: cannot write \"" << *dump_path << "\"\n";
                return mwi::cli::kExitInternal;
            }
            o << report.dump_csv;
        }
        return mwi::cli::kExitOk;
    } catch (const mwi::CapacityError& e) {
        std::cerr << "capacity error: " << e.what() << "\n";
        return mwi::cli::kExitNumeric;
    } catch (const mwi::NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return mwi::cli::kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return mwi::cli::kExitInternal;
    }
}

int run_validate(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        std::cout << "root: cannot open \"" << path << "\"\n";
        return mwi::cli::kExitConfig;
    }
    std::stringstream ss;
    ss << in.rdbuf();
    const auto violations = mwi::cli::validate_text(ss.str());
    for (const auto& v : violations) std::cout << v << "\n";
    return violations.empty() ? mwi::cli::kExitOk : mwi::cli::kExitConfig;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"many-worlds branching simulator and verification tool"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "print help for every command");

    FlagSet f;

    auto* schmidt = app.add_subcommand("schmidt", "Schmidt spectrum, rank, entanglement entropy");
    schmidt->add_option("--state", f.state_text, "state as inline JSON {d1,d2,re,im}");
    schmidt->add_option("--state_path", f.state_path, "path to a state JSON file");
    schmidt->add_option("--tol", f.tol, "factorization threshold on the second Schmidt weight");

    auto* branch = app.add_subcommand("branch", "grow a branch tree from split weights");
    branch->add_option("--steps", f.steps_text,
                       "split steps as inline JSON, e.g. [[0.5,0.5],[0.3,0.7]]");
    branch->add_option("--max_leaves", f.max_leaves, "leaf budget (default 2^20)");

    auto* fhgc = app.add_subcommand("fhg", "frequency-operator deviation: explicit/multinomial/closed");
    fhgc->add_option("--p", f.p, "binary outcome probability (sets amplitudes sqrt(p), sqrt(1-p))");
    fhgc->add_option("--amplitudes_re", f.amplitudes_re, "amplitude real parts");
    fhgc->add_option("--amplitudes_im", f.amplitudes_im, "amplitude imaginary parts");
    fhgc->add_option("--copies", f.copies, "number of identical copies N");
    fhgc->add_option("--outcome", f.outcome, "tracked outcome index k (default 0)");

    auto* graham = app.add_subcommand("graham", "Born vs count measure table over outcome classes");
    graham->add_option("--p", f.p, "first-outcome probability");
    graham->add_option("--trials", f.trials, "number of binary trials (<= 64)");

    auto* haar = app.add_subcommand("haar", "Haar-average fidelity (expectation 1/dim)");
    haar->add_option("--dim", f.dim, "Hilbert space dimension");
    haar->add_option("--samples", f.samples, "Monte Carlo samples");
    haar->add_option("--variant", f.variant, "fidelity (pair overlap) | graham (single |C_k|^2)");

    auto* zeno = app.add_subcommand("zeno", "polarizer chain or random measurement chain");
    zeno->add_option("--mode", f.mode, "polarizer | random");
    zeno->add_option("--intermediates", f.intermediates, "number of intermediate measurements K");
    zeno->add_option("--dim", f.dim, "Hilbert space dimension (random mode)");
    zeno->add_option("--samples", f.samples, "Monte Carlo samples (random mode)");
    zeno->add_option("--initial_index", f.initial_index, "|i> basis index (default 0)");
    zeno->add_option("--final_index", f.final_index, "|f> basis index (default dim-1)");

    auto* evolve = app.add_subcommand("evolve", "reflected random walk of complexity over branches");
    evolve->add_option("--steps", f.steps, "walk length t");
    evolve->add_option("--step_sigma", f.step_sigma, "Gaussian step size");
    evolve->add_option("--threshold", f.threshold, "anthropic selection threshold");
    evolve->add_option("--branches", f.branches, "number of independent branches B");
    evolve->add_option("--reflecting", f.reflecting, "zero complexity barrier on/off (default on)");

    auto* coin = app.add_subcommand("coincidence", "apparent-size ratio diffusion into the band |r-1|<eps");
    coin->add_option("--r0", f.r0, "initial ratio");
    coin->add_option("--drift_sigma", f.drift_sigma, "per-step standard deviation");
    coin->add_option("--steps", f.steps, "diffusion steps");
    coin->add_option("--epsilon", f.epsilon, "half width of the coincidence band");
    coin->add_option("--branches", f.branches, "number of branch trajectories");

    auto* bcount = app.add_subcommand("branch-count", "log10 magnitudes of the Everett branch count");
    bcount->add_option("--universe_age_s", f.universe_age_s, "age of the universe in seconds");
    bcount->add_option("--planck_time_s", f.planck_time_s, "Planck time in seconds");
    bcount->add_option("--branching_base", f.branching_base, "per-tick multiplicity (default 2)");

    auto* ledger = app.add_subcommand("ledger", "does branch multiplicity compensate the life deficit?");
    ledger->add_option("--log10_event_prob", f.log10_event_prob, "log10 of the per-attempt probability");
    ledger->add_option("--log10_attempts", f.log10_attempts, "log10 of the number of attempts");
    ledger->add_option("--log10_log10_branches", f.log10_log10_branches, "log10 log10 of the branch count");

    auto* validate = app.add_subcommand("validate", "check a config file; prints violations");
    std::string validate_path;
    validate->add_option("file", validate_path, "config JSON file")->required();

    for (CLI::App* cmd : {schmidt, branch, fhgc, graham, haar, zeno, evolve, coin, bcount, ledger})
        add_common_flags(cmd, f);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help() << "\n";
        return mwi::cli::kExitConfig;
    }

    if (validate->parsed()) return run_validate(validate_path);
    for (CLI::App* cmd : {schmidt, branch, fhgc, graham, haar, zeno, evolve, coin, bcount, ledger})
        if (cmd->parsed()) return run_command(cmd, cmd->get_name(), f);
    std::cerr << app.help() << "\n";
    return mwi::cli::kExitConfig;
}
