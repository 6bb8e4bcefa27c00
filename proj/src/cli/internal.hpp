#pragma once

#include "cartan_lab/io.hpp"

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace cartan_lab::cli {

using io::json;
using Params = std::map<std::string, std::string>;

struct OptionSpec {
    std::string name;
    std::string help;
    std::optional<std::string> fallback = std::nullopt;
    bool required = false;
    // File inputs; relative values in a config file resolve against its directory.
    bool path = false;
};

struct CsvCurve {
    std::string file;
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

struct Outcome {
    json report = json::object();
    std::vector<CsvCurve> curves;
    std::vector<std::pair<std::string, json>> extra_json;
    std::vector<std::string> failures;
    std::vector<std::string> warnings;
    std::vector<RemezExperiment> experiments;
};

class Context {
public:
    Context(std::string command, Params params, std::uint64_t seed)
        : command_(std::move(command)), params_(std::move(params)), seed_(seed) {}

    const std::string& command() const { return command_; }
    const Params& params() const { return params_; }
    std::uint64_t seed() const { return seed_; }

    bool has(const std::string& key) const;
    std::string str(const std::string& key) const;
    double real(const std::string& key) const;
    long integer(const std::string& key) const;
    std::size_t count(const std::string& key) const;
    bool flag(const std::string& key) const;
    Point point(const std::string& key) const;
    // Comma-separated reals ("inf" allowed), or start:stop:step.
    std::vector<double> list(const std::string& key) const;
    // Inline JSON when the value starts with '{', otherwise a file path.
    json json_input(const std::string& key) const;

    DSet set(const std::string& key = "set") const;
    Function function(const std::string& key = "function") const;
    // A .json file, inline JSON, or a gallery name.
    HolomorphicMapSample map(const std::string& key = "map") const;

    template <class F>
    auto timed(const std::string& op, F&& f) {
        const auto t0 = std::chrono::steady_clock::now();
        auto result = f();
        timings_.emplace_back(op, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
        return result;
    }

    const std::vector<std::pair<std::string, double>>& timings() const { return timings_; }

private:
    std::string command_;
    Params params_;
    std::uint64_t seed_;
    std::vector<std::pair<std::string, double>> timings_;
};

struct CommandSpec {
    std::string name;
    std::string help;
    std::vector<OptionSpec> options;
    std::function<Outcome(Context&)> execute;
};

const std::vector<CommandSpec>& commands();
const CommandSpec* find_command(const std::string& name);

// Parsing helpers shared with the config loader.
std::vector<double> parse_reals(const std::string& text, const std::string& what);

} // namespace cartan_lab::cli
