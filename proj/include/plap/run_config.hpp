#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "plap/continuation.hpp"
#include "plap/grid.hpp"
#include "plap/plap_core.hpp"
#include "plap/problem.hpp"

namespace plap {

inline const std::vector<std::string>& known_commands() {
    static const std::vector<std::string> cmds = {"solve-u0", "solve-sublinear", "solve-supercritical", "eigen",
                                                  "constants", "sweep-lambda", "verify"};
    return cmds;
}

/// Flat key=value run description. Keys carry a block prefix (grid.n,
/// problem.p, solver.tol, output.directory, sweep.lambdas); a bare key is
/// accepted when it is the suffix of exactly one known key.
struct RunConfig {
    std::string command;

    int dim = 1;
    double x_lo = 0.0, x_hi = 1.0;
    double y_lo = 0.0, y_hi = 1.0;
    Index n = 255;
    std::optional<Index> ny;

    double p = 2.0;
    double alpha = 0.5;
    std::optional<double> lambda;  // per-command default when unset
    double a = 0.0, b = 0.0;
    std::optional<double> r1, r2;  // default (p-1)/2, or p for supercritical commands
    double q = 3.0;
    std::optional<double> u0_sup;  // skip the u0 solve in `constants`
    std::optional<double> cp_hat;  // skip gradient calibration

    CoreConfig core;
    EpsSchedule sched;
    int probes = 5;
    std::uint64_t seed = 42;

    std::string out_dir = "out";
    bool write_csv = true;
    bool write_json = true;

    std::vector<double> sweep_lambdas = {1e-1, 1e-2, 1e-3, 1e-4};
    std::string verify_input;  // defaults to out_dir

    /// Resolved key -> raw value for every explicitly set key, for echoing.
    std::map<std::string, std::string> explicit_keys;

    bool supercritical_command() const;
    ProblemSpec problem() const;
    GridPtr<double> grid() const;
    /// Throws Error(InvalidArgument / HypothesisViolation) naming the violated invariant.
    void validate() const;
};

/// Resolves a possibly unprefixed key; throws ParseError when it is unknown
/// or ambiguous.
std::string resolve_key(const std::string& key);

void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);

/// Parses `key = value` lines ('#' and ';' start comments), then applies
/// overrides of the form key=value in order, then validates.
RunConfig parse_config(std::istream& is, const std::string& source, const std::vector<std::string>& overrides = {});
RunConfig parse_config_file(const std::string& path, const std::vector<std::string>& overrides = {});
RunConfig parse_overrides(const std::vector<std::string>& overrides);

}  // namespace plap
