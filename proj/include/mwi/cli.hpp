// Batch front-end: scenario config validation, dispatch, and deterministic
// report rendering. The binary in tools/ is a thin wrapper around this.
#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mwi/anthropic.hpp"
#include "mwi/branching.hpp"
#include "mwi/errors.hpp"
#include "mwi/fhg.hpp"
#include "mwi/json_io.hpp"
#include "mwi/schmidt.hpp"
#include "mwi/version.hpp"

namespace mwi::cli {

using nlohmann::json;

// Exit codes of the mwi tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;

inline const std::vector<std::string>& known_commands() {
    static const std::vector<std::string> cmds = {
        "schmidt", "branch",      "fhg",    "graham", "haar",
        "zeno",    "evolve",      "coincidence", "branch-count", "ledger"};
    return cmds;
}

// Commands that draw random numbers must carry a seed. `zeno` is stochastic
// only in random mode.
inline bool command_is_stochastic(const std::string& command, const json& params) {
    if (command == "haar" || command == "evolve" || command == "coincidence") return true;
    if (command == "zeno")
        return !(params.is_object() && params.contains("mode") && params["mode"] == "polarizer");
    return false;
}

// 17 significant digits, C locale, the bit-stable text form used in CSV.
inline std::string format_real(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

// --- validation ---------------------------------------------------------------

namespace detail {

inline bool get_number(const json& obj, const char* key, double& out) {
    if (!obj.contains(key) || !obj[key].is_number()) return false;
    out = obj[key].get<double>();
    return true;
}

struct Checker {
    const json& params;
    std::vector<std::string>& v;

    bool require_number(const char* key, const char* constraint = nullptr) {
        if (!params.contains(key)) {
            v.push_back(std::string("params.") + key + ": missing");
            return false;
        }
        if (!params[key].is_number()) {
            v.push_back(std::string("params.") + key + ": must be a number");
            return false;
        }
        (void)constraint;
        return true;
    }

    bool require_integer_min(const char* key, long long min_value) {
        if (!require_number(key)) return false;
        if (!params[key].is_number_integer() && !params[key].is_number_unsigned()) {
            v.push_back(std::string("params.") + key + ": must be an integer");
            return false;
        }
        const long long val = params[key].get<long long>();
        if (val < min_value) {
            v.push_back(std::string("params.") + key + ": must be >= " + std::to_string(min_value));
            return false;
        }
        return true;
    }

    bool check_range(const char* key, double lo, double hi) {
        if (!require_number(key)) return false;
        const double x = params[key].get<double>();
        if (!(x >= lo && x <= hi)) {
            v.push_back(std::string("params.") + key + ": must be in [" + format_real(lo) + ", " +
                        format_real(hi) + "]");
            return false;
        }
        return true;
    }

    bool check_positive(const char* key) {
        if (!require_number(key)) return false;
        if (!(params[key].get<double>() > 0.0)) {
            v.push_back(std::string("params.") + key + ": must be > 0");
            return false;
        }
        return true;
    }
};

inline void validate_state_object(const json& st, const std::string& path,
                                  std::vector<std::string>& v) {
    if (!st.is_object()) {
        v.push_back(path + ": must be an object {d1, d2, re, im}");
        return;
    }
    for (const char* key : {"d1", "d2"})
        if (!st.contains(key) || !st[key].is_number_integer() || st[key].get<long long>() < 1)
            v.push_back(path + "." + key + ": must be an integer >= 1");
    for (const char* key : {"re", "im"})
        if (!st.contains(key) || !st[key].is_array())
            v.push_back(path + "." + key + ": must be an array of numbers");
    if (!v.empty()) return;
    const auto d1 = st["d1"].get<std::size_t>();
    const auto d2 = st["d2"].get<std::size_t>();
    if (st["re"].size() != d1 * d2 || st["im"].size() != d1 * d2)
        v.push_back(path + ": re/im length must equal d1*d2");
}

inline void validate_params(const std::string& command, const json& params,
                            std::vector<std::string>& v) {
    Checker c{params, v};
    if (command == "schmidt") {
        const bool has_state = params.contains("state");
        const bool has_path = params.contains("state_path");
        if (has_state == has_path) {
            v.push_back("params: exactly one of state, state_path is required");
        } else if (has_state) {
            validate_state_object(params["state"], "params.state", v);
        } else if (!params["state_path"].is_string()) {
            v.push_back("params.state_path: must be a string path");
        }
        if (params.contains("tol") && !(params["tol"].is_number() && params["tol"].get<double>() > 0.0))
            v.push_back("params.tol: must be > 0");
    } else if (command == "branch") {
        if (!params.contains("steps") || !params["steps"].is_array() || params["steps"].empty()) {
            v.push_back("params.steps: must be a non-empty array of weight arrays");
            return;
        }
        for (std::size_t i = 0; i < params["steps"].size(); ++i) {
            const auto& w = params["steps"][i];
            const std::string path = "params.steps[" + std::to_string(i) + "]";
            if (!w.is_array() || w.empty()) {
                v.push_back(path + ": must be a non-empty array of weights");
                continue;
            }
            double sum = 0.0;
            bool ok = true;
            for (const auto& x : w) {
                if (!x.is_number() || x.get<double>() < 0.0) {
                    v.push_back(path + ": weights must be nonnegative numbers");
                    ok = false;
                    break;
                }
                sum += x.get<double>();
            }
            if (ok && std::abs(sum - 1.0) > 1e-9)
                v.push_back(path + ": weights must sum to 1 within 1e-9");
        }
        if (params.contains("max_leaves") &&
            (!params["max_leaves"].is_number_integer() || params["max_leaves"].get<long long>() < 1))
            v.push_back("params.max_leaves: must be an integer >= 1");
    } else if (command == "fhg") {
        const bool has_p = params.contains("p");
        const bool has_amp = params.contains("amplitudes_re") || params.contains("amplitudes_im");
        if (has_p == has_amp) {
            v.push_back("params: exactly one of p, amplitudes_re/amplitudes_im is required");
        } else if (has_p) {
            c.check_range("p", 0.0, 1.0);
        } else {
            if (!params.contains("amplitudes_re") || !params["amplitudes_re"].is_array() ||
                !params.contains("amplitudes_im") || !params["amplitudes_im"].is_array() ||
                params["amplitudes_re"].size() != params["amplitudes_im"].size() ||
                params["amplitudes_re"].empty()) {
                v.push_back("params.amplitudes_re: re/im must be equal-length non-empty arrays");
            } else {
                double s = 0.0;
                for (std::size_t i = 0; i < params["amplitudes_re"].size(); ++i) {
                    const double re = params["amplitudes_re"][i].get<double>();
                    const double im = params["amplitudes_im"][i].get<double>();
                    s += re * re + im * im;
                }
                if (std::abs(s - 1.0) > 1e-10)
                    v.push_back(
                        "params.amplitudes_re: amplitudes must be normalized (sum |C_i|^2 = 1 "
                        "within 1e-10)");
            }
        }
        c.require_integer_min("copies", 1);
        if (params.contains("outcome")) {
            if (!params["outcome"].is_number_integer() || params["outcome"].get<long long>() < 0)
                v.push_back("params.outcome: must be an integer >= 0");
            else if (has_p && !has_amp && params["outcome"].get<long long>() > 1)
                v.push_back("params.outcome: must be 0 or 1 for the binary p form");
            else if (has_amp && params.contains("amplitudes_re") &&
                     params["amplitudes_re"].is_array() &&
                     params["outcome"].get<unsigned long long>() >= params["amplitudes_re"].size())
                v.push_back("params.outcome: must be < the number of amplitudes");
        }
    } else if (command == "graham") {
        c.check_range("p", 0.0, 1.0);
        if (c.require_integer_min("trials", 1) && params["trials"].get<long long>() > 64)
            v.push_back("params.trials: must be <= 64");
    } else if (command == "haar") {
        c.require_integer_min("dim", 1);
        c.require_integer_min("samples", 2);
        if (params.contains("variant") &&
            !(params["variant"].is_string() &&
              (params["variant"] == "fidelity" || params["variant"] == "graham")))
            v.push_back("params.variant: must be \"fidelity\" or \"graham\"");
    } else if (command == "zeno") {
        if (!params.contains("mode") || !params["mode"].is_string() ||
            (params["mode"] != "polarizer" && params["mode"] != "random")) {
            v.push_back("params.mode: must be \"polarizer\" or \"random\"");
            return;
        }
        c.require_integer_min("intermediates", 0);
        if (params["mode"] == "random") {
            c.require_integer_min("dim", 2);
            c.require_integer_min("samples", 2);
            long long dim = params.contains("dim") && params["dim"].is_number_integer()
                                ? params["dim"].get<long long>()
                                : -1;
            for (const char* key : {"initial_index", "final_index"})
                if (params.contains(key)) {
                    if (!params[key].is_number_integer() || params[key].get<long long>() < 0)
                        v.push_back(std::string("params.") + key + ": must be an integer >= 0");
                    else if (dim > 0 && params[key].get<long long>() >= dim)
                        v.push_back(std::string("params.") + key + ": must be < dim");
                }
        }
    } else if (command == "evolve") {
        c.require_integer_min("steps", 1);
        c.check_positive("step_sigma");
        if (c.require_number("threshold") && params["threshold"].get<double>() < 0.0)
            v.push_back("params.threshold: must be >= 0");
        c.require_integer_min("branches", 1);
        if (params.contains("reflecting") && !params["reflecting"].is_boolean())
            v.push_back("params.reflecting: must be a boolean");
    } else if (command == "coincidence") {
        c.require_number("r0");
        c.check_positive("drift_sigma");
        c.require_integer_min("steps", 1);
        c.check_positive("epsilon");
        c.require_integer_min("branches", 1);
    } else if (command == "branch-count") {
        c.check_positive("universe_age_s");
        c.check_positive("planck_time_s");
        if (params.contains("universe_age_s") && params.contains("planck_time_s") &&
            params["universe_age_s"].is_number() && params["planck_time_s"].is_number() &&
            params["universe_age_s"].get<double>() < params["planck_time_s"].get<double>())
            v.push_back("params.universe_age_s: must be >= params.planck_time_s");
        if (params.contains("branching_base") &&
            !(params["branching_base"].is_number() && params["branching_base"].get<double>() > 1.0))
            v.push_back("params.branching_base: must be > 1");
    } else if (command == "ledger") {
        c.require_number("log10_event_prob");
        c.require_number("log10_attempts");
        c.require_number("log10_log10_branches");
    }
}

} // namespace detail

// Empty result iff the config is runnable; each violation names the JSON
// path and the constraint it breaks.
inline std::vector<std::string> validate_config(const json& cfg) {
    std::vector<std::string> v;
    if (!cfg.is_object()) {
        v.push_back("root: config must be a JSON object");
        return v;
    }
    if (!cfg.contains("command") || !cfg["command"].is_string()) {
        v.push_back("command: missing or not a string");
        return v;
    }
    const std::string command = cfg["command"].get<std::string>();
    bool known = false;
    for (const auto& c : known_commands()) known = known || (c == command);
    if (!known) {
        v.push_back("command: unrecognized command \"" + command + "\"");
        return v;
    }

    const json params = cfg.contains("params") ? cfg["params"] : json::object();
    if (!params.is_object()) {
        v.push_back("params: must be an object");
        return v;
    }

    if (cfg.contains("seed") &&
        !(cfg["seed"].is_number_unsigned() ||
          (cfg["seed"].is_number_integer() && cfg["seed"].get<long long>() >= 0)))
        v.push_back("seed: must be a nonnegative integer");
    if (command_is_stochastic(command, params) && !cfg.contains("seed"))
        v.push_back("seed: required for stochastic command \"" + command + "\"");
    if (cfg.contains("streams") &&
        (!cfg["streams"].is_number_integer() || cfg["streams"].get<long long>() < 1))
        v.push_back("streams: must be an integer >= 1");
    if (cfg.contains("format") &&
        !(cfg["format"].is_string() && (cfg["format"] == "json" || cfg["format"] == "csv")))
        v.push_back("format: must be \"json\" or \"csv\"");
    if (cfg.contains("out") && !cfg["out"].is_string())
        v.push_back("out: must be a string path");
    if (cfg.contains("dump") && !cfg["dump"].is_string())
        v.push_back("dump: must be a string path");

    detail::validate_params(command, params, v);
    return v;
}

inline std::vector<std::string> validate_text(const std::string& text) {
    json cfg = json::parse(text, nullptr, false);
    if (cfg.is_discarded()) return {"root: malformed JSON"};
    return validate_config(cfg);
}

// --- dispatch -------------------------------------------------------------------

// A rendered report plus the optional secondary CSV dump.
struct Report {
    std::string body;     // JSON or CSV text, ends with a newline
    std::string dump_csv; // empty when the command produced no dump
};

struct ScenarioConfig {
    std::string command;
    json params = json::object();
    std::optional<std::uint64_t> seed;
    unsigned streams = 1;
    std::string format = "json"; // "json" | "csv"
    std::optional<std::string> out;
    bool want_dump = false;
    std::size_t max_leaves = branching::kDefaultMaxLeaves;
};

namespace detail {

inline double num(const json& params, const char* key, double fallback) {
    return params.contains(key) ? params[key].get<double>() : fallback;
}

inline std::uint64_t unum(const json& params, const char* key, std::uint64_t fallback) {
    return params.contains(key) ? params[key].get<std::uint64_t>() : fallback;
}

inline std::string csv_key_value(const json& result) {
    std::string csv = "key,value\n";
    for (auto it = result.begin(); it != result.end(); ++it) {
        csv += it.key();
        csv += ',';
        if (it.value().is_number())
            csv += format_real(it.value().get<double>());
        else if (it.value().is_boolean())
            csv += it.value().get<bool>() ? "true" : "false";
        else if (it.value().is_string())
            csv += it.value().get<std::string>();
        else
            csv += it.value().dump();
        csv += '\n';
    }
    return csv;
}

inline std::string csv_preamble(const std::string& command, const json& params,
                                const std::optional<std::uint64_t>& seed, unsigned streams) {
    std::string head = "# command=" + command + "\n";
    head += "# params=" + params.dump() + "\n";
    if (seed) head += "# seed=" + std::to_string(*seed) + "\n";
    head += "# streams=" + std::to_string(streams) + "\n";
    head += std::string("# tool_version=") + kVersion + "\n";
    return head;
}

struct Dispatched {
    json result;             // result object for the JSON report
    json resolved_params;    // params with defaults filled in
    std::string table_csv;   // table form when the command has a natural one
    std::string dump_csv;    // optional secondary dump
};

inline Dispatched dispatch_schmidt(const ScenarioConfig& cfg) {
    Dispatched d;
    json state_json;
    if (cfg.params.contains("state")) {
        state_json = cfg.params["state"];
    } else {
        std::ifstream in(cfg.params["state_path"].get<std::string>());
        if (!in) throw ContractViolation("schmidt: cannot open state_path");
        state_json = json::parse(in, nullptr, false);
        if (state_json.is_discarded()) throw ContractViolation("schmidt: state file is not JSON");
    }
    const auto state = io::state_from_json(state_json);
    const double tol = num(cfg.params, "tol", schmidt::kRankThreshold);

    const auto dec = schmidt::schmidt_decompose(state);
    d.result["lambdas"] = dec.lambdas;
    d.result["rank"] = dec.rank;
    d.result["entropy"] = schmidt::spectrum_entropy(dec.lambdas);
    d.result["is_factorized"] = dec.lambdas.size() < 2 || dec.lambdas[1] <= tol;
    d.result["d1"] = state.d1();
    d.result["d2"] = state.d2();

    d.resolved_params = cfg.params;
    d.resolved_params["tol"] = tol;

    std::string csv = "n,lambda\n";
    for (std::size_t i = 0; i < dec.lambdas.size(); ++i)
        csv += std::to_string(i) + "," + format_real(dec.lambdas[i]) + "\n";
    d.table_csv = csv;
    return d;
}

inline Dispatched dispatch_branch(const ScenarioConfig& cfg) {
    Dispatched d;
    std::size_t max_leaves = cfg.max_leaves;
    if (cfg.params.contains("max_leaves"))
        max_leaves = cfg.params["max_leaves"].get<std::size_t>();

    branching::BranchTree tree(max_leaves);
    for (const auto& step : cfg.params["steps"]) {
        const auto weights = step.get<std::vector<double>>();
        for (auto leaf : tree.leaves()) tree.branch_step(leaf, weights);
    }

    KahanSum total;
    for (auto leaf : tree.leaves()) total.add(tree.node(leaf).weight);
    d.result["leaves"] = tree.leaf_count();
    d.result["nodes"] = tree.size();
    d.result["total_weight"] = total.value();
    d.result["leaf_entropy"] = tree.node(tree.root()).rescaled_entropy;
    d.result["tree"] = io::tree_to_json(tree);

    d.resolved_params = cfg.params;
    d.resolved_params["max_leaves"] = max_leaves;

    std::string csv = "id,parent,label,lam,log_weight,S_i\n";
    for (branching::NodeId id = 0; id < tree.size(); ++id) {
        const auto& n = tree.node(id);
        csv += std::to_string(n.id) + ",";
        csv += n.parent ? std::to_string(*n.parent) : std::string();
        csv += ",";
        csv += n.parent ? std::to_string(n.label) : std::string();
        csv += "," + format_real(n.lam) + "," + format_real(n.log_weight) + "," +
               format_real(n.rel_entropy) + "\n";
    }
    d.table_csv = csv;
    return d;
}

inline Dispatched dispatch_fhg(const ScenarioConfig& cfg) {
    Dispatched d;
    std::vector<fhg::Complex> amps;
    std::size_t outcome = static_cast<std::size_t>(unum(cfg.params, "outcome", 0));
    if (cfg.params.contains("p")) {
        const double p = cfg.params["p"].get<double>();
        amps = {fhg::Complex(std::sqrt(p), 0.0), fhg::Complex(std::sqrt(1.0 - p), 0.0)};
    } else {
        const auto re = cfg.params["amplitudes_re"].get<std::vector<double>>();
        const auto im = cfg.params["amplitudes_im"].get<std::vector<double>>();
        amps.resize(re.size());
        for (std::size_t i = 0; i < re.size(); ++i) amps[i] = fhg::Complex(re[i], im[i]);
    }
    const std::uint64_t copies = unum(cfg.params, "copies", 1);
    const fhg::FrequencySpec spec(amps, copies, outcome);

    const double strings =
        std::pow(static_cast<double>(amps.size()), static_cast<double>(copies));
    if (strings <= static_cast<double>(fhg::kMaxOutcomeStrings))
        d.result["explicit"] = fhg::freq_deviation_explicit(spec);
    else
        d.result["explicit"] = nullptr;
    d.result["multinomial"] = fhg::freq_deviation_multinomial(spec);
    d.result["closed"] = fhg::freq_deviation_closed(spec.p_k(), copies);
    d.result["p_k"] = spec.p_k();
    d.result["N"] = copies;

    d.resolved_params = cfg.params;
    d.resolved_params["copies"] = copies;
    d.resolved_params["outcome"] = outcome;
    d.table_csv = csv_key_value(d.result);
    return d;
}

inline Dispatched dispatch_graham(const ScenarioConfig& cfg) {
    Dispatched d;
    const double p = cfg.params["p"].get<double>();
    const unsigned trials = static_cast<unsigned>(cfg.params["trials"].get<std::uint64_t>());
    const auto rows = fhg::graham_table(p, trials);

    json jrows = json::array();
    std::string csv = "m,branch_count,count_mass,born_mass\n";
    for (const auto& r : rows) {
        json jr;
        jr["m"] = r.m;
        jr["branch_count"] = r.branch_count;
        jr["count_mass"] = r.count_mass;
        jr["born_mass"] = r.born_mass;
        jrows.push_back(jr);
        csv += std::to_string(r.m) + "," + std::to_string(r.branch_count) + "," +
               format_real(r.count_mass) + "," + format_real(r.born_mass) + "\n";
    }
    d.result["rows"] = jrows;
    d.resolved_params = cfg.params;
    d.table_csv = csv;
    return d;
}

inline Dispatched dispatch_haar(const ScenarioConfig& cfg) {
    Dispatched d;
    const std::size_t dim = static_cast<std::size_t>(cfg.params["dim"].get<std::uint64_t>());
    const std::uint64_t samples = cfg.params["samples"].get<std::uint64_t>();
    const std::string variant =
        cfg.params.contains("variant") ? cfg.params["variant"].get<std::string>() : "fidelity";

    std::vector<double> per_sample;
    if (variant == "graham") {
        d.result["mean"] = fhg::graham_average_check(dim, samples, *cfg.seed, cfg.streams);
        d.result["std_error"] = nullptr;
    } else {
        const auto r = anthropic::haar_fidelity_mean(dim, samples, *cfg.seed, cfg.streams,
                                                     cfg.want_dump ? &per_sample : nullptr);
        d.result["mean"] = r.mean;
        d.result["std_error"] = r.std_error;
    }
    d.result["dim"] = dim;
    d.result["samples"] = samples;
    d.result["variant"] = variant;

    d.resolved_params = cfg.params;
    d.resolved_params["variant"] = variant;
    d.table_csv = csv_key_value(d.result);
    if (cfg.want_dump && !per_sample.empty()) {
        std::string dump = "sample,fidelity\n";
        for (std::size_t i = 0; i < per_sample.size(); ++i)
            dump += std::to_string(i) + "," + format_real(per_sample[i]) + "\n";
        d.dump_csv = dump;
    }
    return d;
}

inline Dispatched dispatch_zeno(const ScenarioConfig& cfg) {
    Dispatched d;
    const std::string mode = cfg.params["mode"].get<std::string>();
    const unsigned k = static_cast<unsigned>(unum(cfg.params, "intermediates", 0));
    d.resolved_params = cfg.params;
    d.resolved_params["intermediates"] = k;

    if (mode == "polarizer") {
        d.result["transmission_closed"] = anthropic::zeno_polarizer_chain(k);
        d.result["transmission_simulated"] = anthropic::zeno_polarizer_chain_simulated(k);
        d.result["intermediates"] = k;
        if (cfg.want_dump) {
            std::string dump = "k,transmission_closed,transmission_simulated\n";
            for (unsigned i = 0; i <= k; ++i)
                dump += std::to_string(i) + "," +
                        format_real(anthropic::zeno_polarizer_chain(i)) + "," +
                        format_real(anthropic::zeno_polarizer_chain_simulated(i)) + "\n";
            d.dump_csv = dump;
        }
    } else {
        anthropic::ZenoChainConfig zc;
        zc.mode = anthropic::ZenoMode::random;
        zc.dim = static_cast<std::size_t>(cfg.params["dim"].get<std::uint64_t>());
        zc.intermediates = k;
        zc.samples = cfg.params["samples"].get<std::uint64_t>();
        zc.seed = *cfg.seed;
        zc.initial_index = static_cast<std::size_t>(unum(cfg.params, "initial_index", 0));
        zc.final_index = cfg.params.contains("final_index")
                             ? static_cast<std::size_t>(cfg.params["final_index"].get<std::uint64_t>())
                             : std::size_t(-1);
        std::vector<double> per_sample;
        const auto r =
            anthropic::zeno_random_chain(zc, cfg.streams, cfg.want_dump ? &per_sample : nullptr);
        d.result["mean_transition"] = r.mean;
        d.result["std_error"] = r.std_error;
        d.result["dim"] = zc.dim;
        d.result["intermediates"] = k;
        d.result["samples"] = zc.samples;
        d.resolved_params["initial_index"] = zc.initial_index;
        d.resolved_params["final_index"] =
            (zc.final_index == std::size_t(-1)) ? zc.dim - 1 : zc.final_index;
        if (cfg.want_dump) {
            std::string dump = "sample,transition\n";
            for (std::size_t i = 0; i < per_sample.size(); ++i)
                dump += std::to_string(i) + "," + format_real(per_sample[i]) + "\n";
            d.dump_csv = dump;
        }
    }
    d.table_csv = csv_key_value(d.result);
    return d;
}

inline Dispatched dispatch_evolve(const ScenarioConfig& cfg) {
    Dispatched d;
    anthropic::EvolutionConfig ec;
    ec.steps = cfg.params["steps"].get<std::uint64_t>();
    ec.step_sigma = cfg.params["step_sigma"].get<double>();
    ec.threshold = cfg.params["threshold"].get<double>();
    ec.branches = cfg.params["branches"].get<std::uint64_t>();
    ec.seed = *cfg.seed;
    ec.reflecting =
        cfg.params.contains("reflecting") ? cfg.params["reflecting"].get<bool>() : true;

    std::vector<double> finals;
    const auto r =
        anthropic::evolve_complexity(ec, cfg.streams, cfg.want_dump ? &finals : nullptr);
    d.result["mean_final"] = r.mean_final;
    d.result["frac_above_threshold"] = r.frac_above_threshold;
    d.result["conditional_mean"] = r.conditional_mean;

    d.resolved_params = cfg.params;
    d.resolved_params["reflecting"] = ec.reflecting;
    d.table_csv = csv_key_value(d.result);
    if (cfg.want_dump) {
        std::string dump = "branch,final\n";
        for (std::size_t i = 0; i < finals.size(); ++i)
            dump += std::to_string(i) + "," + format_real(finals[i]) + "\n";
        d.dump_csv = dump;
    }
    return d;
}

inline Dispatched dispatch_coincidence(const ScenarioConfig& cfg) {
    Dispatched d;
    anthropic::CoincidenceConfig cc;
    cc.r0 = cfg.params["r0"].get<double>();
    cc.drift_sigma = cfg.params["drift_sigma"].get<double>();
    cc.steps = cfg.params["steps"].get<std::uint64_t>();
    cc.epsilon = cfg.params["epsilon"].get<double>();
    cc.branches = cfg.params["branches"].get<std::uint64_t>();
    cc.seed = *cfg.seed;

    std::vector<double> finals;
    const auto r =
        anthropic::coincidence_scan(cc, cfg.streams, cfg.want_dump ? &finals : nullptr);
    d.result["frac_in_band"] = r.frac_in_band;
    d.result["analytic_frac"] = r.analytic_frac;

    d.resolved_params = cfg.params;
    d.table_csv = csv_key_value(d.result);
    if (cfg.want_dump) {
        std::string dump = "branch,r_final\n";
        for (std::size_t i = 0; i < finals.size(); ++i)
            dump += std::to_string(i) + "," + format_real(finals[i]) + "\n";
        d.dump_csv = dump;
    }
    return d;
}

inline Dispatched dispatch_branch_count(const ScenarioConfig& cfg) {
    Dispatched d;
    anthropic::BranchCountConfig bc;
    bc.universe_age_s = cfg.params["universe_age_s"].get<double>();
    bc.planck_time_s = cfg.params["planck_time_s"].get<double>();
    bc.branching_base = num(cfg.params, "branching_base", 2.0);
    const auto r = anthropic::branch_count_estimate(bc);
    d.result["log10_N"] = r.log10_n;
    d.result["log10_log10_N"] = r.log10_log10_n;
    d.resolved_params = cfg.params;
    d.resolved_params["branching_base"] = bc.branching_base;
    d.table_csv = csv_key_value(d.result);
    return d;
}

inline Dispatched dispatch_ledger(const ScenarioConfig& cfg) {
    Dispatched d;
    anthropic::LifeLedger ledger;
    ledger.log10_event_prob = cfg.params["log10_event_prob"].get<double>();
    ledger.log10_attempts = cfg.params["log10_attempts"].get<double>();
    ledger.log10_log10_branches = cfg.params["log10_log10_branches"].get<double>();
    const auto r = anthropic::life_ledger_verdict(ledger);
    d.result["log10_expected_per_world"] = r.log10_expected_per_world;
    d.result["surplus"] = r.surplus;
    d.result["verdict"] = r.compensated ? "compensated" : "not compensated";
    d.resolved_params = cfg.params;
    d.table_csv = csv_key_value(d.result);
    return d;
}

} // namespace detail

// Compute the scenario and render the report text. Assumes the config has
// already passed validate_config.
inline Report build_report(const ScenarioConfig& cfg) {
    detail::Dispatched d;
    if (cfg.command == "schmidt")
        d = detail::dispatch_schmidt(cfg);
    else if (cfg.command == "branch")
        d = detail::dispatch_branch(cfg);
    else if (cfg.command == "fhg")
        d = detail::dispatch_fhg(cfg);
    else if (cfg.command == "graham")
        d = detail::dispatch_graham(cfg);
    else if (cfg.command == "haar")
        d = detail::dispatch_haar(cfg);
    else if (cfg.command == "zeno")
        d = detail::dispatch_zeno(cfg);
    else if (cfg.command == "evolve")
        d = detail::dispatch_evolve(cfg);
    else if (cfg.command == "coincidence")
        d = detail::dispatch_coincidence(cfg);
    else if (cfg.command == "branch-count")
        d = detail::dispatch_branch_count(cfg);
    else if (cfg.command == "ledger")
        d = detail::dispatch_ledger(cfg);
    else
        throw ContractViolation("unrecognized command: " + cfg.command);

    Report rep;
    rep.dump_csv = d.dump_csv;
    if (cfg.format == "csv") {
        rep.body = detail::csv_preamble(cfg.command, d.resolved_params, cfg.seed, cfg.streams) +
                   d.table_csv;
    } else {
        json report;
        report["command"] = cfg.command;
        report["params"] = d.resolved_params;
        if (cfg.seed) report["seed"] = *cfg.seed;
        report["streams"] = cfg.streams;
        report["tool_version"] = kVersion;
        report["result"] = d.result;
        rep.body = report.dump(2) + "\n";
    }
    return rep;
}

} // namespace mwi::cli
