// SPDX-License-Identifier: MIT
#pragma once

#include "passagekit/levy_model.hpp"

#include <cctype>
#include <cstdio>
#include <map>
#include <stdexcept>
#include <string>

namespace passagekit {

/// Raised on malformed model strings; carries the offending position.
class parse_error : public std::invalid_argument {
public:
    parse_error(const std::string& what, size_t position)
        : std::invalid_argument(what + " (at position " + std::to_string(position) + ")"),
          pos(position) {}
    size_t pos;
};

namespace detail {

inline std::string format_param(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace detail

/// Parse `name[:key=val[,key=val]*]` into a validated model. Names:
/// stable, stable_half, gamma, cpexp. Keys: alpha, s, a, theta, rate, eta, b.
/// `stable_half` is the alias stable:alpha=0.5,s=sqrt(2) and accepts only b.
inline SubordinatorSpec parse_model(const std::string& text) {
    const size_t colon = text.find(':');
    const std::string name = text.substr(0, colon);

    std::map<std::string, double> kv;
    if (colon != std::string::npos) {
        size_t pos = colon + 1;
        while (pos < text.size()) {
            const size_t eq = text.find('=', pos);
            if (eq == std::string::npos)
                throw parse_error("expected key=value", pos);
            const std::string key = text.substr(pos, eq - pos);
            if (key.empty()) throw parse_error("expected key before '='", pos);
            size_t comma = text.find(',', eq + 1);
            if (comma == std::string::npos) comma = text.size();
            const std::string val = text.substr(eq + 1, comma - eq - 1);
            if (val.empty()) throw parse_error("expected value after '='", eq + 1);
            try {
                size_t used = 0;
                const double v = std::stod(val, &used);
                if (used != val.size())
                    throw parse_error("trailing characters in number '" + val + "'",
                                      eq + 1 + used);
                if (!kv.emplace(key, v).second)
                    throw parse_error("duplicate key '" + key + "'", pos);
            } catch (const std::invalid_argument&) {
                throw parse_error("expected a number, got '" + val + "'", eq + 1);
            }
            pos = comma + (comma < text.size() ? 1 : 0);
            if (comma == text.size()) break;
            if (pos >= text.size()) throw parse_error("trailing comma", comma);
        }
    }

    auto take = [&](const char* key, double fallback) {
        auto it = kv.find(key);
        if (it == kv.end()) return fallback;
        const double v = it->second;
        kv.erase(it);
        return v;
    };
    auto reject_leftovers = [&]() {
        if (!kv.empty())
            throw parse_error("unknown key '" + kv.begin()->first + "' for model '" +
                                  name + "'",
                              0);
    };

    if (name == "stable") {
        const double alpha = take("alpha", 0.5);
        const double s = take("s", 1.0);
        const double b = take("b", 0.0);
        reject_leftovers();
        return make_stable(alpha, s, b);
    }
    if (name == "stable_half") {
        const double b = take("b", 0.0);
        reject_leftovers();
        return make_stable_half(b);
    }
    if (name == "gamma") {
        const double a = take("a", 1.0);
        const double theta = take("theta", 1.0);
        const double b = take("b", 0.0);
        reject_leftovers();
        return make_gamma(a, theta, b);
    }
    if (name == "cpexp") {
        const double rate = take("rate", 1.0);
        const double eta = take("eta", 1.0);
        const double b = take("b", 0.0);
        reject_leftovers();
        return make_cpexp(rate, eta, b);
    }
    throw parse_error("unknown model '" + name +
                          "' (expected stable, stable_half, gamma, cpexp)",
                      0);
}

/// Canonical rendering; parse(render(m)) reproduces m exactly.
inline std::string render_model(const SubordinatorSpec& m) {
    using detail::format_param;
    switch (m.kind) {
    case ModelKind::Stable:
        return "stable:alpha=" + format_param(m.alpha) + ",s=" + format_param(m.s) +
               ",b=" + format_param(m.drift_b);
    case ModelKind::Gamma:
        return "gamma:a=" + format_param(m.a) + ",theta=" + format_param(m.theta) +
               ",b=" + format_param(m.drift_b);
    case ModelKind::CompoundPoissonExp:
        return "cpexp:rate=" + format_param(m.rate) + ",eta=" + format_param(m.eta) +
               ",b=" + format_param(m.drift_b);
    }
    return "";
}

} // namespace passagekit
