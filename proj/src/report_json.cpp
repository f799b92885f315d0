#include "plap/report_json.hpp"

#include <cmath>

namespace plap {

Json json_number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json to_json(const SolveReport& r) {
    Json j;
    j["converged"] = r.converged;
    j["iterations"] = r.iterations;
    j["final_residual_sup"] = json_number(r.final_residual_sup);
    j["energy"] = json_number(r.energy);
    j["sup_norm"] = json_number(r.sup_norm);
    j["grad_sup_norm"] = json_number(r.grad_sup_norm);
    Json extras = Json::object();
    for (const auto& [k, v] : r.extras) extras[k] = json_number(v);
    j["extras"] = extras;
    return j;
}

Json to_json(const ProblemSpec& s) {
    return Json{{"p", s.p},
                {"alpha", s.alpha},
                {"lambda", s.lambda},
                {"a", s.convection.a},
                {"b", s.convection.b},
                {"r1", s.convection.r1},
                {"r2", s.convection.r2}};
}

ProblemSpec problem_from_json(const Json& j) {
    ProblemSpec s;
    s.p = j.at("p").get<double>();
    s.alpha = j.at("alpha").get<double>();
    s.lambda = j.at("lambda").get<double>();
    s.convection.a = j.at("a").get<double>();
    s.convection.b = j.at("b").get<double>();
    s.convection.r1 = j.at("r1").get<double>();
    s.convection.r2 = j.at("r2").get<double>();
    return s;
}

Json to_json(const ConstantsReport& r) {
    Json j;
    j["A"] = json_number(r.A);
    j["A_star"] = json_number(r.A_star);
    j["lambda"] = json_number(r.lambda);
    j["M_lo"] = json_number(r.M_lo);
    j["M_hi"] = json_number(r.M_hi);
    j["M_hi_sharp"] = json_number(r.M_hi_sharp);
    j["M_grad_lo"] = json_number(r.M_grad_lo);
    j["feasible"] = r.feasible;
    j["integrability_holds"] = r.integrability_holds;
    const ConstantsInput& in = r.input;
    j["input"] = Json{{"p", in.p},
                      {"alpha", in.alpha},
                      {"a", in.a},
                      {"b", in.b},
                      {"r1", in.r1},
                      {"r2", in.r2},
                      {"u0_sup", in.u0_sup},
                      {"q", in.q},
                      {"dimension", in.dimension},
                      {"Cp_hat", in.Cp_hat ? json_number(*in.Cp_hat) : Json(nullptr)},
                      {"theta_unused", json_number(in.theta)}};
    Json terms = Json::object();
    for (const auto& t : r.terms) terms[t.label] = json_number(t.value);
    j["terms"] = terms;
    return j;
}

Json to_json(const GradientCalibration& c) {
    Json probes = Json::array();
    for (std::size_t k = 0; k < c.ratios.size(); ++k) {
        probes.push_back(Json{{"probe", c.probe_labels[k]}, {"ratio", json_number(c.ratios[k])}});
    }
    return Json{{"C_hat", json_number(c.Cp_hat)},
                {"p_factor", json_number(c.p_factor)},
                {"safety_factor", 2.0},
                {"seed", c.seed},
                {"probes", probes}};
}

Json to_json(const CheckResult& c) {
    Json details = Json::object();
    for (const auto& [k, v] : c.details) details[k] = json_number(v);
    return Json{{"name", c.name},
                {"passed", c.passed},
                {"worst_margin", json_number(c.worst_margin)},
                {"worst_node", c.worst_node},
                {"details", details}};
}

Json to_json(const std::vector<CheckResult>& checks) {
    Json arr = Json::array();
    for (const auto& c : checks) arr.push_back(to_json(c));
    return arr;
}

Json to_json(const std::vector<StageRecord>& stages) {
    Json arr = Json::array();
    for (const auto& s : stages) {
        arr.push_back(Json{{"eps", s.eps},
                           {"iterations", s.iterations},
                           {"residual_sup", json_number(s.residual_sup)},
                           {"sup_norm", json_number(s.sup_norm)},
                           {"grad_sup_norm", json_number(s.grad_sup_norm)}});
    }
    return arr;
}

Json to_json(const Membership& m) {
    return Json{{"member", m.member},
                {"lower_margin", json_number(m.lower_margin)},
                {"upper_margin", json_number(m.upper_margin)},
                {"gradient_margin", json_number(m.gradient_margin)}};
}

Json to_json(const SweepRow& r) {
    Json j{{"lambda", r.lambda},
           {"M", json_number(r.M)},
           {"sup_u", json_number(r.sup_u)},
           {"sup_grad", json_number(r.sup_grad)},
           {"iterations", r.iterations},
           {"in_set", r.in_set},
           {"residual_sup", json_number(r.residual_sup)}};
    j["error"] = r.error.empty() ? Json(nullptr) : Json(r.error);
    return j;
}

Json to_json(const RunConfig& cfg) {
    Json j;
    j["command"] = cfg.command;
    j["grid"] = Json{{"dim", cfg.dim},
                     {"x_lo", cfg.x_lo},
                     {"x_hi", cfg.x_hi},
                     {"y_lo", cfg.y_lo},
                     {"y_hi", cfg.y_hi},
                     {"n", cfg.n},
                     {"ny", cfg.ny.value_or(cfg.n)}};
    j["solver"] = Json{{"tol", cfg.core.tol},
                       {"max_iter", cfg.core.max_iter},
                       {"delta_reg", cfg.core.delta_reg},
                       {"eps0", cfg.sched.eps0},
                       {"factor", cfg.sched.factor},
                       {"floor", cfg.sched.floor},
                       {"transfer", cfg.sched.transfer},
                       {"probes", cfg.probes},
                       {"seed", cfg.seed}};
    Json expl = Json::object();
    for (const auto& [k, v] : cfg.explicit_keys) expl[k] = v;
    j["explicit_keys"] = expl;
    return j;
}

}  // namespace plap
