// SPDX-License-Identifier: MIT
#pragma once

#include "passagekit/montecarlo.hpp"
#include "passagekit/oracles.hpp"
#include "passagekit/passage.hpp"
#include "passagekit/saddle.hpp"

#include <json.hpp>

#include <string>

namespace passagekit {

inline constexpr const char* kSchemaVersion = "1.0.0";

/// Numeric JSON field under the output contract: finite numbers stay
/// numbers; +inf becomes "overflow", -inf "underflow" (log scales), NaN is a
/// bug and surfaces as "nan" rather than silently corrupting the document.
inline nlohmann::json json_num(double v) {
    if (std::isfinite(v)) return v;
    if (v == kInf) return "overflow";
    if (v == -kInf) return "underflow";
    return "nan";
}

inline nlohmann::json to_json(const ExponentValues& e) {
    return {{"u", json_num(e.u)},           {"psi", json_num(e.psi)},
            {"psi_star", json_num(e.psi_star)}, {"psi_prime", json_num(e.psi_prime)},
            {"sigma2", json_num(e.sigma2)}, {"H", json_num(e.H)}};
}

inline nlohmann::json to_json(const SaddlePoint& sp) {
    return {{"t", json_num(sp.t)},       {"x", json_num(sp.x)},
            {"x_t", json_num(sp.x_t)},   {"rho", json_num(sp.rho)},
            {"exps", to_json(sp.exps)},  {"s_t", json_num(sp.s_t)},
            {"tH", json_num(sp.tH)},     {"x_rho", json_num(sp.x_rho)},
            {"pre_asymptotic", sp.pre_asymptotic()}};
}

inline nlohmann::json to_json(const RegimeReport& r) {
    nlohmann::json labels = nlohmann::json::array();
    for (const RegimeLabel l : r.labels) labels.push_back(to_string(l));
    return {{"labels", labels},
            {"tH", json_num(r.tH)},
            {"x_rho", json_num(r.x_rho)},
            {"c_t", json_num(r.c_t)},
            {"b_t", json_num(r.b_t)},
            {"sc00_ratio", json_num(r.sc00_ratio)},
            {"non_lattice", r.non_lattice}};
}

inline nlohmann::json to_json(const PassageEstimate& e) {
    nlohmann::json warnings = nlohmann::json::array();
    for (const Warning w : e.warnings) warnings.push_back(to_string(w));
    nlohmann::json j = {{"value", json_num(e.value)},
                        {"log_value", json_num(e.log_value)},
                        {"warnings", warnings}};
    if (e.delta) j["delta"] = json_num(*e.delta);
    return j;
}

inline nlohmann::json to_json(const StableLimitEstimate& e) {
    return {{"y_t", json_num(e.y_t)},
            {"c_t", json_num(e.c_t)},
            {"hJ_scaled", json_num(e.hJ_scaled)},
            {"hC_scaled", json_num(e.hC_scaled)},
            {"alpha", json_num(e.alpha)}};
}

inline nlohmann::json to_json(const McSummary& s) {
    nlohmann::json est = nlohmann::json::object();
    for (const auto& [key, e] : s.estimates)
        est[key] = {{"value", json_num(e.value)}, {"se", json_num(e.se)}};
    return {{"n", s.n},
            {"n_crossed_by_t", s.n_crossed_by_t},
            {"n_crossed_in_window", s.n_crossed_in_window},
            {"n_creep", s.n_creep},
            {"n_jump", s.n_jump},
            {"n_discarded", s.n_discarded},
            {"estimates", est},
            {"approximate_creep_flag", s.approximate_creep_flag},
            {"seed", s.seed},
            {"eps", json_num(s.eps)}};
}

inline nlohmann::json to_json(const HReport& r) {
    nlohmann::json samples = nlohmann::json::array();
    for (const auto& [z, v] : r.integrand_samples)
        samples.push_back({json_num(z), json_num(v)});
    return {{"verdict", r.verdict == HVerdict::Pass ? "Pass" : "Fail"},
            {"t0_used", json_num(r.t0_used)},
            {"decay_exponent_estimate", json_num(r.decay_exponent_estimate)},
            {"sufficient_decay_exponent", json_num(r.sufficient_decay_exponent)},
            {"integrand_samples", samples}};
}

inline nlohmann::json to_json(const NormingPair& np) {
    return {{"c_t", json_num(np.c_t)},
            {"b_t", json_num(np.b_t)},
            {"no_solution", np.no_solution}};
}

/// Top-level run document shared by every CLI command.
inline nlohmann::json make_run_output(std::string command, nlohmann::json inputs) {
    return {{"schema_version", kSchemaVersion},
            {"command", std::move(command)},
            {"inputs", std::move(inputs)},
            {"diagnostics", nlohmann::json::object()},
            {"results", nlohmann::json::object()},
            {"warnings", nlohmann::json::array()}};
}

} // namespace passagekit
