#include "cartan_lab/cli.hpp"

#include "internal.hpp"

#include "cartan_lab/error.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cstdio>
#include <ctime>
#include <iostream>
#include <memory>

#include "CLI11.hpp"

#ifndef CARTAN_LAB_VERSION
#define CARTAN_LAB_VERSION "0.0.0"
#endif

namespace cartan_lab::cli {

namespace fs = std::filesystem;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitInvalid = 2;

struct LoadedConfig {
    std::string kind;
    Params params;
    std::optional<std::string> out;
    std::optional<std::uint64_t> seed;
    fs::path file;
};

std::uint64_t parse_seed(const std::string& s) {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
        if (!s.empty() && s.front() == '-') throw std::invalid_argument("negative");
        v = std::stoull(s, &used);
    } catch (const std::logic_error&) {
        used = 0;
    }
    if (used == 0 || used != s.size()) throw InvalidInput("seed must be a nonnegative integer, got '" + s + "'");
    return v;
}

bool is_path_value(const OptionSpec& o, const std::string& v) {
    if (!o.path || v.empty() || v.front() == '{') return false;
    if (o.name == "map") return v.ends_with(".json");
    if (o.name == "centers") return v != "set";
    return true;
}

const OptionSpec* find_option(const CommandSpec& spec, const std::string& key) {
    for (const auto& o : spec.options)
        if (o.name == key) return &o;
    return nullptr;
}

// Flat key = value file; keys may sit at the top or under [experiment].
LoadedConfig load_config(const fs::path& file, const std::string& expected_kind = {}) {
    if (!fs::exists(file)) throw InvalidInput("config file '" + file.string() + "' does not exist");
    boost::property_tree::ptree tree;
    try {
        boost::property_tree::ini_parser::read_ini(file.string(), tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw InvalidInput("config '" + file.string() + "': " + e.what());
    }
    LoadedConfig cfg;
    cfg.file = file;
    std::vector<std::pair<std::string, std::string>> entries;
    for (const auto& [key, node] : tree) {
        if (node.empty()) {
            entries.emplace_back(key, node.data());
        } else if (key == "experiment") {
            for (const auto& [k, v] : node) {
                if (!v.empty()) throw InvalidInput("config: nested value under [experiment]." + k);
                entries.emplace_back(k, v.data());
            }
        } else {
            throw InvalidInput("config '" + file.string() + "': unknown section [" + key + "]");
        }
    }
    for (auto& [k, v] : entries) {
        if (k == "kind") cfg.kind = v;
        else if (k == "out") cfg.out = v;
        else if (k == "seed") cfg.seed = parse_seed(v);
        else cfg.params[k] = v;
    }
    if (cfg.kind.empty()) cfg.kind = expected_kind;
    if (cfg.kind.empty()) throw InvalidInput("config '" + file.string() + "': missing 'kind'");
    if (!expected_kind.empty() && cfg.kind != expected_kind)
        throw InvalidInput("config '" + file.string() + "' is for '" + cfg.kind + "', not '" + expected_kind + "'");
    const auto* spec = find_command(cfg.kind);
    if (!spec) throw InvalidInput("config '" + file.string() + "': unknown kind '" + cfg.kind + "'");
    const fs::path base = file.parent_path();
    for (auto& [k, v] : cfg.params) {
        const auto* o = find_option(*spec, k);
        if (!o) throw InvalidInput("config '" + file.string() + "': unknown key '" + k + "' for " + cfg.kind);
        if (is_path_value(*o, v) && fs::path(v).is_relative()) v = (base / v).lexically_normal().string();
    }
    return cfg;
}

// Defaults, then required-option check. Unknown keys are rejected.
Params complete(const CommandSpec& spec, Params given) {
    for (const auto& [k, v] : given)
        if (!find_option(spec, k)) throw InvalidInput(spec.name + ": unknown option '" + k + "'");
    for (const auto& o : spec.options) {
        if (given.count(o.name)) continue;
        if (o.fallback) given[o.name] = *o.fallback;
        else if (o.required) throw InvalidInput(spec.name + ": missing required option --" + o.name);
    }
    return given;
}

// "--out x.json" names the report itself; anything else is a directory.
struct Layout {
    fs::path dir;
    std::string report;
    std::string manifest;
    std::string prefix;
};

Layout layout_for(const std::string& out, const std::string& command) {
    Layout l;
    const fs::path p(out);
    if (p.extension() == ".json") {
        l.dir = p.parent_path();
        l.report = p.filename().string();
        l.prefix = p.stem().string() + ".";
        l.manifest = l.prefix + "manifest.json";
    } else {
        l.dir = p;
        l.report = command + ".json";
        l.manifest = "manifest.json";
    }
    return l;
}

std::string utc_now() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

json timings_json(const std::vector<std::pair<std::string, double>>& timings) {
    json a = json::array();
    for (const auto& [op, s] : timings) a.push_back({{"operation", op}, {"seconds", s}});
    return a;
}

json params_json(const Params& p) {
    json j = json::object();
    for (const auto& [k, v] : p) j[k] = v;
    return j;
}

struct ChildResult {
    std::string status;  // pass | fail | error
    Outcome outcome;
    std::string error;
};

// Runs one command and writes its report, curves and manifest. Exceptions propagate
// after an error manifest has been written.
ChildResult execute(const CommandSpec& spec, const Params& params, std::uint64_t seed, const std::string& out,
                    const std::optional<fs::path>& config_file, bool quiet = false) {
    const auto layout = layout_for(out, spec.name);
    const auto t0 = std::chrono::steady_clock::now();
    const std::string started = utc_now();
    Context ctx(spec.name, params, seed);

    json manifest;
    manifest["tool"] = "cartan-lab";
    manifest["version"] = CARTAN_LAB_VERSION;
    manifest["command"] = spec.name;
    manifest["config_file"] = config_file ? json(config_file->string()) : json(nullptr);
    manifest["config"] = params_json(params);
    manifest["seed"] = seed;
    manifest["started_at"] = started;

    ChildResult res;
    try {
        res.outcome = spec.execute(ctx);
    } catch (const std::exception& e) {
        manifest["wall_clock_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        manifest["timings"] = timings_json(ctx.timings());
        manifest["status"] = "error";
        manifest["error"] = e.what();
        manifest["outputs"] = json::array();
        io::write_json(layout.dir / layout.manifest, manifest);
        throw;
    }
    auto& o = res.outcome;
    res.status = o.failures.empty() ? "pass" : "fail";

    json outputs = json::array();
    for (const auto& c : o.curves) {
        const std::string name = layout.prefix + c.file;
        io::write_text_atomic(layout.dir / name, io::to_csv(c.header, c.rows));
        outputs.push_back(name);
    }
    for (const auto& [file, body] : o.extra_json) {
        const std::string name = layout.prefix + file;
        json j = body;
        j["manifest"] = layout.manifest;
        io::write_json(layout.dir / name, j);
        outputs.push_back(name);
    }

    json report;
    report["command"] = spec.name;
    report["manifest"] = layout.manifest;
    report["seed"] = seed;
    report["status"] = res.status;
    report["failures"] = o.failures;
    report["warnings"] = o.warnings;
    for (auto& [k, v] : o.report.items()) report[k] = v;
    io::write_json(layout.dir / layout.report, report);
    outputs.push_back(layout.report);

    manifest["wall_clock_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    manifest["timings"] = timings_json(ctx.timings());
    manifest["status"] = res.status;
    manifest["failures"] = o.failures;
    manifest["outputs"] = outputs;
    io::write_json(layout.dir / layout.manifest, manifest);

    if (!quiet) {
        std::cout << spec.name << ": " << res.status << " -> " << (layout.dir / layout.report).string() << "\n";
        for (const auto& w : o.warnings) std::cerr << "warning: " << w << "\n";
        for (const auto& f : o.failures) std::cerr << "violation: " << f << "\n";
    }
    return res;
}

int run_single(const CommandSpec& spec, Params flags, const std::optional<std::string>& config,
               std::optional<std::string> out, std::optional<std::uint64_t> seed) {
    Params merged;
    std::optional<fs::path> cfg_file;
    if (config) {
        auto cfg = load_config(*config, spec.name);
        merged = cfg.params;
        cfg_file = cfg.file;
        if (!out) out = cfg.out;
        if (!seed) seed = cfg.seed;
    }
    for (auto& [k, v] : flags) merged[k] = v;
    const auto params = complete(spec, merged);
    const auto res = execute(spec, params, seed.value_or(0), out.value_or("out"), cfg_file);
    return res.status == "pass" ? kExitPass : kExitFail;
}

struct BatchEntry {
    LoadedConfig cfg;
    Params params;
    std::string role;  // run | calibration | validation
};

int run_batch(const std::vector<std::string>& configs, const std::vector<std::string>& calibration,
              const std::vector<std::string>& validation, const std::optional<std::string>& only,
              const std::string& out, std::optional<std::uint64_t> seed) {
    std::vector<BatchEntry> entries;
    auto add = [&](const std::vector<std::string>& files, const std::string& role) {
        for (const auto& f : files) {
            BatchEntry e{load_config(f), {}, role};
            if (only && e.cfg.kind != *only) continue;
            e.params = complete(*find_command(e.cfg.kind), e.cfg.params);
            entries.push_back(std::move(e));
        }
    };
    add(configs, "run");
    add(calibration, "calibration");
    add(validation, "validation");
    if (entries.empty()) throw InvalidInput("batch: no configs left to run");

    std::optional<std::string> protocol_kind;
    for (const auto& e : entries) {
        if (e.role == "run") continue;
        if (e.cfg.kind != "remez" && e.cfg.kind != "mcol1")
            throw InvalidInput("batch: calibration/validation configs must be remez or mcol1");
        if (protocol_kind && *protocol_kind != e.cfg.kind)
            throw InvalidInput("batch: calibration/validation configs mix remez and mcol1");
        protocol_kind = e.cfg.kind;
    }
    const bool has_cal = !calibration.empty(), has_val = !validation.empty();
    if (protocol_kind && !(has_cal && has_val))
        throw InvalidInput("batch: the fit-and-validate protocol needs both --calibration and --validation");

    const auto t0 = std::chrono::steady_clock::now();
    const std::string started = utc_now();
    const fs::path root(out);
    std::vector<RemezExperiment> cal, val;
    json children = json::array();
    json child_manifests = json::array();
    std::vector<std::string> failures;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto& e = entries[i];
        char idx[16];
        std::snprintf(idx, sizeof idx, "%03zu", i);
        const std::string dir = std::string(idx) + "-" + e.cfg.file.stem().string();
        const auto& spec = *find_command(e.cfg.kind);
        json child{{"config", e.cfg.file.string()}, {"kind", e.cfg.kind}, {"role", e.role}, {"dir", dir}};
        try {
            auto res = execute(spec, e.params, seed.value_or(e.cfg.seed.value_or(0)), (root / dir).string(), e.cfg.file,
                               true);
            child["status"] = res.status;
            if (res.status != "pass") failures.push_back(dir + ": " + std::to_string(res.outcome.failures.size()) + " violation(s)");
            auto& bucket = e.role == "calibration" ? cal : val;
            if (e.role != "run") bucket.insert(bucket.end(), res.outcome.experiments.begin(), res.outcome.experiments.end());
        } catch (const std::exception& ex) {
            child["status"] = "error";
            child["error"] = ex.what();
            failures.push_back(dir + ": " + ex.what());
        }
        children.push_back(child);
        child_manifests.push_back(dir + "/manifest.json");
    }

    json protocol = nullptr;
    if (protocol_kind) {
        protocol = json::object();
        protocol["kind"] = *protocol_kind;
        protocol["calibration_experiments"] = cal.size();
        protocol["validation_experiments"] = val.size();
        try {
            const auto fit = fit_constant_c(cal);
            protocol["calibration_fit"] = io::to_json(fit);
            std::size_t ok = 0;
            json verdicts = json::array();
            for (const auto& e : val) {
                const bool h = remez_holds(e, fit.c_hat);
                ok += h;
                verdicts.push_back(h);
            }
            const double rate = val.empty() ? 0.0 : static_cast<double>(ok) / static_cast<double>(val.size());
            protocol["c_hat"] = fit.c_hat;
            protocol["validation_holds"] = verdicts;
            protocol["validation_pass_rate"] = rate;
            if (!(fit.c_hat > 0.0)) failures.push_back("protocol: calibrated c_hat is not positive");
            if (val.empty() || ok != val.size())
                failures.push_back("protocol: inequality holds on " + std::to_string(ok) + " of " +
                                   std::to_string(val.size()) + " validation experiments");
            try {
                const auto vfit = fit_constant_c(val);
                const double rel = std::abs(vfit.c_hat - fit.c_hat) / fit.c_hat;
                protocol["validation_fit"] = io::to_json(vfit);
                protocol["relative_change"] = rel;
                if (!(rel <= 0.2)) failures.push_back("protocol: c_hat moved by " + io::format_double(rel) + " between batches");
            } catch (const Error& ex) {
                protocol["validation_fit"] = nullptr;
                protocol["validation_fit_error"] = ex.what();
            }
        } catch (const Error& ex) {
            failures.push_back(std::string("protocol: calibration fit failed: ") + ex.what());
        }
    }

    const std::string status = failures.empty() ? "pass" : "fail";
    json report;
    report["command"] = "batch";
    report["manifest"] = "manifest.json";
    report["status"] = status;
    report["failures"] = failures;
    report["children"] = children;
    report["protocol"] = protocol;
    io::write_json(root / "batch.json", report);

    json manifest;
    manifest["tool"] = "cartan-lab";
    manifest["version"] = CARTAN_LAB_VERSION;
    manifest["command"] = "batch";
    json cfgs = json::array();
    for (const auto& e : entries) cfgs.push_back({{"file", e.cfg.file.string()}, {"kind", e.cfg.kind}, {"role", e.role}, {"config", params_json(e.params)}});
    manifest["configs"] = cfgs;
    manifest["filter"] = only ? json(*only) : json(nullptr);
    manifest["started_at"] = started;
    manifest["wall_clock_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    manifest["child_manifests"] = child_manifests;
    manifest["status"] = status;
    manifest["failures"] = failures;
    manifest["outputs"] = json::array({"batch.json"});
    io::write_json(root / "manifest.json", manifest);

    std::cout << "batch: " << status << " (" << entries.size() << " runs) -> " << (root / "batch.json").string() << "\n";
    for (const auto& f : failures) std::cerr << "violation: " << f << "\n";
    return failures.empty() ? kExitPass : kExitFail;
}

struct SubState {
    const CommandSpec* spec = nullptr;
    CLI::App* app = nullptr;
    Params values;
    std::string config, out, seed;
};

} // namespace

int main(const std::vector<std::string>& args) {
    CLI::App app{"cartan-lab: experiments on logarithmic potentials and subharmonic functions over sampled fractal sets"};
    app.set_version_flag("--version", std::string(CARTAN_LAB_VERSION));
    app.require_subcommand(1);

    std::vector<std::unique_ptr<SubState>> subs;
    for (const auto& spec : commands()) {
        auto s = std::make_unique<SubState>();
        s->spec = &spec;
        s->app = app.add_subcommand(spec.name, spec.help);
        for (const auto& o : spec.options) {
            std::string help = o.help;
            if (o.fallback) help += " [default: " + *o.fallback + "]";
            if (o.required) help += " (required unless set in --config)";
            s->app->add_option("--" + o.name, s->values[o.name], help);
        }
        s->app->add_option("--config", s->config, "key = value config file");
        s->app->add_option("--out", s->out, "output directory, or a .json report path [default: out]");
        s->app->add_option("--seed", s->seed, "seed for every random choice [default: 0]");
        subs.push_back(std::move(s));
    }

    std::string run_config, run_out, run_seed;
    auto* run = app.add_subcommand("run", "run the experiment described by a config file");
    run->add_option("--config", run_config, "key = value config file with a 'kind' key")->required();
    run->add_option("--out", run_out, "output directory (overrides the config)");
    run->add_option("--seed", run_seed, "seed (overrides the config)");

    std::vector<std::string> b_configs, b_cal, b_val;
    std::string b_only, b_out = "out", b_seed;
    auto* batch = app.add_subcommand("batch", "run several configs; remez/mcol1 calibration and validation batches fit c");
    batch->add_option("--config", b_configs, "config files to run");
    batch->add_option("--calibration", b_cal, "configs whose experiments calibrate c");
    batch->add_option("--validation", b_val, "configs whose experiments validate the calibrated c");
    batch->add_option("--only", b_only, "run only configs of this kind");
    batch->add_option("--out", b_out, "output directory [default: out]");
    batch->add_option("--seed", b_seed, "seed override for every child");

    std::vector<std::string> argv_rev(args.rbegin(), args.rend());
    try {
        app.parse(argv_rev);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInvalid;
    }

    auto opt = [](const std::string& s) { return s.empty() ? std::optional<std::string>{} : std::optional<std::string>{s}; };
    try {
        if (*run) {
            auto cfg = load_config(run_config);
            std::optional<std::uint64_t> seed;
            if (!run_seed.empty()) seed = parse_seed(run_seed);
            return run_single(*find_command(cfg.kind), {}, run_config, opt(run_out), seed);
        }
        if (*batch) {
            std::optional<std::uint64_t> seed;
            if (!b_seed.empty()) seed = parse_seed(b_seed);
            return run_batch(b_configs, b_cal, b_val, opt(b_only), b_out, seed);
        }
        for (auto& s : subs) {
            if (!*s->app) continue;
            Params flags;
            for (const auto& o : s->spec->options)
                if (s->app->count("--" + o.name) > 0) flags[o.name] = s->values[o.name];
            std::optional<std::uint64_t> seed;
            if (!s->seed.empty()) seed = parse_seed(s->seed);
            return run_single(*s->spec, flags, opt(s->config), opt(s->out), seed);
        }
    } catch (const InvalidInput& e) {
        std::cerr << "cartan-lab: invalid input: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "cartan-lab: malformed JSON input: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const std::exception& e) {
        std::cerr << "cartan-lab: error: " << e.what() << "\n";
        return kExitFail;
    }
    return kExitInvalid;
}

int main(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return main(args);
}

} // namespace cartan_lab::cli
