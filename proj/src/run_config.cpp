#include "plap/run_config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include "plap/error.hpp"

namespace plap {

namespace {

using Setter = std::function<void(RunConfig&, const std::string&)>;

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& v) {
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) throw Error(ErrorKind::ParseError, "not a number: '" + v + "'");
    return out;
}

long long to_integer(const std::string& v) {
    long long out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) throw Error(ErrorKind::ParseError, "not an integer: '" + v + "'");
    return out;
}

bool to_bool(const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw Error(ErrorKind::ParseError, "not a boolean: '" + v + "'");
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"command", [](RunConfig& c, const std::string& v) { c.command = v; }},
        {"grid.dim", [](RunConfig& c, const std::string& v) { c.dim = static_cast<int>(to_integer(v)); }},
        {"grid.x_lo", [](RunConfig& c, const std::string& v) { c.x_lo = to_double(v); }},
        {"grid.x_hi", [](RunConfig& c, const std::string& v) { c.x_hi = to_double(v); }},
        {"grid.y_lo", [](RunConfig& c, const std::string& v) { c.y_lo = to_double(v); }},
        {"grid.y_hi", [](RunConfig& c, const std::string& v) { c.y_hi = to_double(v); }},
        {"grid.n", [](RunConfig& c, const std::string& v) { c.n = to_integer(v); }},
        {"grid.ny", [](RunConfig& c, const std::string& v) { c.ny = to_integer(v); }},
        {"problem.p", [](RunConfig& c, const std::string& v) { c.p = to_double(v); }},
        {"problem.alpha", [](RunConfig& c, const std::string& v) { c.alpha = to_double(v); }},
        {"problem.lambda", [](RunConfig& c, const std::string& v) { c.lambda = to_double(v); }},
        {"problem.a", [](RunConfig& c, const std::string& v) { c.a = to_double(v); }},
        {"problem.b", [](RunConfig& c, const std::string& v) { c.b = to_double(v); }},
        {"problem.r1", [](RunConfig& c, const std::string& v) { c.r1 = to_double(v); }},
        {"problem.r2", [](RunConfig& c, const std::string& v) { c.r2 = to_double(v); }},
        {"problem.q", [](RunConfig& c, const std::string& v) { c.q = to_double(v); }},
        {"problem.u0_sup", [](RunConfig& c, const std::string& v) { c.u0_sup = to_double(v); }},
        {"problem.cp_hat", [](RunConfig& c, const std::string& v) { c.cp_hat = to_double(v); }},
        {"solver.tol", [](RunConfig& c, const std::string& v) { c.core.tol = to_double(v); }},
        {"solver.max_iter", [](RunConfig& c, const std::string& v) { c.core.max_iter = static_cast<int>(to_integer(v)); }},
        {"solver.delta_reg", [](RunConfig& c, const std::string& v) { c.core.delta_reg = to_double(v); }},
        {"solver.eps0", [](RunConfig& c, const std::string& v) { c.sched.eps0 = to_double(v); }},
        {"solver.factor", [](RunConfig& c, const std::string& v) { c.sched.factor = to_double(v); }},
        {"solver.floor", [](RunConfig& c, const std::string& v) { c.sched.floor = to_double(v); }},
        {"solver.transfer", [](RunConfig& c, const std::string& v) { c.sched.transfer = to_bool(v); }},
        {"solver.probes", [](RunConfig& c, const std::string& v) { c.probes = static_cast<int>(to_integer(v)); }},
        {"solver.seed", [](RunConfig& c, const std::string& v) {
             const long long s = to_integer(v);
             if (s < 0) throw Error(ErrorKind::ParseError, "seed must be >= 0");
             c.seed = static_cast<std::uint64_t>(s);
         }},
        {"output.directory", [](RunConfig& c, const std::string& v) { c.out_dir = v; }},
        {"output.formats", [](RunConfig& c, const std::string& v) {
             c.write_csv = c.write_json = false;
             for (const auto& f : split_list(v)) {
                 if (f == "csv") c.write_csv = true;
                 else if (f == "json") c.write_json = true;
                 else throw Error(ErrorKind::ParseError, "unknown output format '" + f + "'");
             }
         }},
        {"sweep.lambdas", [](RunConfig& c, const std::string& v) {
             c.sweep_lambdas.clear();
             for (const auto& item : split_list(v)) c.sweep_lambdas.push_back(to_double(item));
         }},
        {"verify.input", [](RunConfig& c, const std::string& v) { c.verify_input = v; }},
    };
    return table;
}

bool is_suffix(const std::string& full, const std::string& key) {
    return full.size() > key.size() && full.compare(full.size() - key.size(), key.size(), key) == 0 &&
           full[full.size() - key.size() - 1] == '.';
}

void apply_assignment(RunConfig& cfg, const std::string& text, const std::string& where) {
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw Error(ErrorKind::ParseError, where + ": expected key=value, got '" + text + "'");
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    try {
        apply_setting(cfg, key, value);
    } catch (const Error& e) {
        throw Error(e.kind(), where + ": " + e.what());
    }
}

}  // namespace

std::string resolve_key(const std::string& key) {
    const auto& table = setters();
    if (table.count(key)) return key;
    std::string match;
    for (const auto& [full, _] : table) {
        if (!is_suffix(full, key)) continue;
        if (!match.empty()) throw Error(ErrorKind::ParseError, "ambiguous key '" + key + "' (" + match + ", " + full + ")");
        match = full;
    }
    if (match.empty()) throw Error(ErrorKind::ParseError, "unknown key '" + key + "'");
    return match;
}

void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value) {
    const std::string full = resolve_key(key);
    if (value.empty()) throw Error(ErrorKind::ParseError, "empty value for '" + full + "'");
    setters().at(full)(cfg, value);
    cfg.explicit_keys[full] = value;
}

bool RunConfig::supercritical_command() const {
    return command == "solve-supercritical" || command == "constants" || command == "sweep-lambda";
}

ProblemSpec RunConfig::problem() const {
    ProblemSpec s;
    s.p = p;
    s.alpha = alpha;
    s.lambda = lambda.value_or(1.0);
    const double r_default = supercritical_command() ? p : 0.5 * (p - 1.0);
    s.convection = ConvectionSpec{a, b, r1.value_or(r_default), r2.value_or(r_default)};
    return s;
}

GridPtr<double> RunConfig::grid() const {
    if (dim == 1) return build_interval<double>(x_lo, x_hi, n);
    return build_rectangle<double>({x_lo, x_hi}, {y_lo, y_hi}, n, ny.value_or(n));
}

void RunConfig::validate() const {
    if (command.empty()) throw Error(ErrorKind::InvalidArgument, "missing command");
    const auto& cmds = known_commands();
    if (std::find(cmds.begin(), cmds.end(), command) == cmds.end()) {
        throw Error(ErrorKind::InvalidArgument, "unknown command '" + command + "'");
    }
    if (dim != 1 && dim != 2) throw Error(ErrorKind::InvalidDomain, "grid.dim must be 1 or 2");
    grid();
    problem().validate();
    core.validate();
    sched.validate();
    if (!(q >= 1.0)) throw Error(ErrorKind::InvalidArgument, "problem.q must be >= 1");
    if (u0_sup && !(*u0_sup > 0.0)) throw Error(ErrorKind::InvalidArgument, "problem.u0_sup must be > 0");
    if (cp_hat && !(*cp_hat > 0.0)) throw Error(ErrorKind::InvalidArgument, "problem.cp_hat must be > 0");
    if (probes < 3) throw Error(ErrorKind::InvalidArgument, "solver.probes must be >= 3");
    if (command == "solve-sublinear" && !problem().sublinear()) {
        throw Error(ErrorKind::HypothesisViolation, "solve-sublinear needs r1, r2 < p-1");
    }
    if (command == "solve-supercritical" && !problem().supercritical()) {
        throw Error(ErrorKind::HypothesisViolation, "solve-supercritical needs r1, r2 > p-1");
    }
    if (command == "sweep-lambda") {
        for (std::size_t k = 0; k < sweep_lambdas.size(); ++k) {
            if (!(sweep_lambdas[k] > 0.0)) throw Error(ErrorKind::InvalidArgument, "sweep.lambdas must be > 0");
            if (k > 0 && !(sweep_lambdas[k] < sweep_lambdas[k - 1])) {
                throw Error(ErrorKind::InvalidArgument, "sweep.lambdas must be strictly descending");
            }
        }
    }
}

RunConfig parse_config(std::istream& is, const std::string& source, const std::vector<std::string>& overrides) {
    RunConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        apply_assignment(cfg, line, source + ":" + std::to_string(lineno));
    }
    for (const auto& o : overrides) apply_assignment(cfg, o, "--set " + o);
    cfg.validate();
    return cfg;
}

RunConfig parse_config_file(const std::string& path, const std::vector<std::string>& overrides) {
    std::ifstream is(path);
    if (!is) throw Error(ErrorKind::ParseError, "cannot open config file '" + path + "'");
    return parse_config(is, path, overrides);
}

RunConfig parse_overrides(const std::vector<std::string>& overrides) {
    std::istringstream empty;
    return parse_config(empty, "<flags>", overrides);
}

}  // namespace plap
