// SPDX-License-Identifier: MIT
//
// passagekit command line: saddle-point first-passage estimates for
// subordinators, their exact oracles, and reproducible Monte Carlo
// cross-checks. JSON on stdout for single evaluations, CSV for sweeps,
// logs on stderr.
//
// Exit codes: 0 success, 2 domain/parse error, 3 convergence failure,
// 4 suite failure.
#include "passagekit/acceptance.hpp"
#include "passagekit/model_parse.hpp"
#include "passagekit/montecarlo.hpp"
#include "passagekit/oracles.hpp"
#include "passagekit/passage.hpp"
#include "passagekit/report.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace pk = passagekit;
using nlohmann::json;

namespace {

struct CommonArgs {
    std::string model_text;
    std::string config_path;
    uint64_t seed = 0;
    bool seed_set = false;
};

uint64_t default_seed() {
    if (const char* env = std::getenv("PASSAGEKIT_SEED"))
        return std::strtoull(env, nullptr, 10);
    return 0;
}

/// Resolve --model through the optional alias table in the config file.
pk::SubordinatorSpec resolve_model(const CommonArgs& args) {
    std::string text = args.model_text;
    if (!args.config_path.empty()) {
        std::ifstream in(args.config_path);
        if (!in) throw std::invalid_argument("config file not readable: " + args.config_path);
        json cfg = json::parse(in);
        if (cfg.contains("aliases") && cfg["aliases"].contains(text))
            text = cfg["aliases"][text].get<std::string>();
    }
    return pk::parse_model(text);
}

void emit(const json& doc) { std::cout << doc.dump(2) << "\n"; }

json warnings_json(const pk::PassageEstimate& e) {
    json w = json::array();
    for (const pk::Warning x : e.warnings) w.push_back(pk::to_string(x));
    return w;
}

/// Atomic CSV write: the target file appears only complete.
void write_atomic(const std::string& path, const std::string& contents) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::invalid_argument("cannot open output file: " + tmp);
        out << contents;
        if (!out.good()) throw std::runtime_error("write failed: " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw std::runtime_error("atomic rename failed: " + path);
}

std::string fmt(double v) {
    if (!std::isfinite(v)) return v > 0 ? "overflow" : "underflow";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// ---------------------------------------------------------------------------
// saddle / density / passage
// ---------------------------------------------------------------------------

int cmd_saddle(const CommonArgs& args, double t, double x) {
    const pk::SubordinatorSpec m = resolve_model(args);
    const pk::SaddlePoint sp = pk::solve_rho(m, t, x);
    json doc = pk::make_run_output(
        "saddle", {{"model", pk::render_model(m)}, {"t", t}, {"x", x}});
    doc["diagnostics"]["saddle"] = pk::to_json(sp);
    doc["diagnostics"]["regime"] = pk::to_json(pk::classify_regime(m, t, x));
    doc["results"]["norming"] = pk::to_json(pk::norming_pair(m, t));
    if (sp.x_rho >= 1.0)
        doc["results"]["lambda_diagnostic"] = {
            {"lambda_bar", pk::json_num(pk::lambda_diagnostic(m, t, x).lambda_bar)},
            {"tH", pk::json_num(sp.tH)}};
    if (sp.pre_asymptotic()) doc["warnings"].push_back("pre-asymptotic");
    emit(doc);
    return 0;
}

int cmd_density(const CommonArgs& args, double t, double x,
                std::optional<double> z, bool with_oracle) {
    const pk::SubordinatorSpec m = resolve_model(args);
    const double zz = z.value_or(x);
    const pk::SaddlePoint sp = pk::solve_rho(m, t, x);
    const pk::ScaledValue f = pk::density_estimate(sp, zz);
    json doc = pk::make_run_output(
        "density",
        {{"model", pk::render_model(m)}, {"t", t}, {"x", x}, {"z", zz}});
    doc["diagnostics"]["saddle"] = pk::to_json(sp);
    doc["results"]["density"] = {{"value", pk::json_num(f.value)},
                                 {"log_value", pk::json_num(f.log_value)}};
    if (with_oracle) {
        const pk::ScaledValue ex = pk::exact_density(m, t, zz);
        doc["results"]["exact_density"] = {{"value", pk::json_num(ex.value)},
                                           {"log_value", pk::json_num(ex.log_value)}};
    }
    if (f.underflow) doc["warnings"].push_back("underflow");
    if (sp.pre_asymptotic()) doc["warnings"].push_back("pre-asymptotic");
    emit(doc);
    return 0;
}

int cmd_passage(const CommonArgs& args, double t, double x, double delta,
                double delta0) {
    const pk::SubordinatorSpec m = resolve_model(args);
    json doc = pk::make_run_output("passage", {{"model", pk::render_model(m)},
                                               {"t", t},
                                               {"x", x},
                                               {"delta", delta},
                                               {"delta0", delta0}});
    const pk::PassageEstimate hj = pk::hJ_density(m, t, x);
    const pk::PassageEstimate hji = pk::hJ_interval(m, t, x, delta, delta0);
    const pk::PassageEstimate hci = pk::hC_interval(m, t, x, delta, delta0);
    doc["diagnostics"]["saddle"] = pk::to_json(hj.sp);
    doc["diagnostics"]["regime"] = pk::to_json(pk::classify_regime(m, t, x));
    doc["results"]["hJ_density"] = pk::to_json(hj);
    doc["results"]["hJ_interval"] = pk::to_json(hji);
    doc["results"]["hC_interval"] = pk::to_json(hci);
    if (x > m.drift_b * t)
        doc["results"]["hC_density"] = pk::to_json(pk::hC_density(m, t, x));
    doc["results"]["creep_conditional"] =
        pk::json_num(pk::creep_conditional(m, t, x));
    if (m.kind == pk::ModelKind::Stable)
        doc["results"]["stable_limit"] = pk::to_json(pk::stable_limit(m, t, x, delta));
    json warn = json::array();
    for (const auto* e : {&hj, &hji, &hci})
        for (const auto& w : warnings_json(*e))
            if (std::find(warn.begin(), warn.end(), w) == warn.end())
                warn.push_back(w);
    doc["warnings"] = warn;
    emit(doc);
    return 0;
}

// ---------------------------------------------------------------------------
// oracle
// ---------------------------------------------------------------------------

int cmd_oracle(const CommonArgs& args, const std::string& quantity, double t,
               double x, double lambda, double delta, double y,
               std::vector<double> t0s) {
    const pk::SubordinatorSpec m = resolve_model(args);
    json doc = pk::make_run_output(
        "oracle", {{"model", pk::render_model(m)}, {"quantity", quantity}});
    auto& res = doc["results"];
    if (quantity == "exact_density") {
        doc["inputs"]["t"] = t;
        doc["inputs"]["x"] = x;
        const pk::ScaledValue v = pk::exact_density(m, t, x);
        res["exact_density"] = {{"value", pk::json_num(v.value)},
                                {"log_value", pk::json_num(v.log_value)}};
    } else if (quantity == "convolve_hJ") {
        doc["inputs"]["t"] = t;
        doc["inputs"]["x"] = x;
        res["convolve_hJ"] = pk::json_num(pk::convolve_hJ(m, t, x));
    } else if (quantity == "invert_g") {
        doc["inputs"]["t"] = t;
        doc["inputs"]["x"] = x;
        const double lam = (lambda > 0.0) ? lambda : pk::solve_rho(m, t, x).rho;
        doc["inputs"]["lambda"] = lam;
        const pk::InvertGResult r = pk::invert_g(m, t, x, lam);
        res["g_value"] = pk::json_num(r.g_value);
        res["hJ_value"] = {{"value", pk::json_num(r.hJ.value)},
                           {"log_value", pk::json_num(r.hJ.log_value)}};
        res["grid"] = {{"lambda", pk::json_num(r.grid.lambda)},
                       {"z_max", pk::json_num(r.grid.z_max)},
                       {"panel_width", pk::json_num(r.grid.panel_width)},
                       {"rel_tol", pk::json_num(r.grid.rel_tol)}};
    } else if (quantity == "potential") {
        doc["inputs"]["delta"] = pk::json_num(delta);
        doc["inputs"]["y"] = y;
        res["u_delta"] = pk::json_num(pk::potential_density(m, delta, y));
    } else if (quantity == "hypothesis_h") {
        const pk::HReport r = t0s.empty() ? pk::hypothesis_H_check(m)
                                          : pk::hypothesis_H_check(m, t0s);
        res["hypothesis_h"] = pk::to_json(r);
    } else {
        throw std::invalid_argument("unknown oracle quantity: " + quantity);
    }
    emit(doc);
    return 0;
}

// ---------------------------------------------------------------------------
// mc
// ---------------------------------------------------------------------------

int cmd_mc(const CommonArgs& args, const std::string& kind, double t, double x,
           double delta, const pk::McConfig& cfg, std::vector<double> probes) {
    const pk::SubordinatorSpec m = resolve_model(args);
    json doc = pk::make_run_output("mc", {{"model", pk::render_model(m)},
                                          {"kind", kind},
                                          {"n", cfg.n},
                                          {"seed", cfg.seed},
                                          {"eps", cfg.eps}});
    if (kind == "marginal") {
        doc["inputs"]["t"] = t;
        doc["results"]["mc"] = pk::to_json(pk::sample_marginal(m, t, cfg, probes));
    } else if (kind == "passage") {
        doc["inputs"]["t"] = t;
        doc["inputs"]["x"] = x;
        doc["inputs"]["delta"] = delta;
        doc["results"]["mc"] = pk::to_json(pk::simulate_passage(m, x, t, delta, cfg));
    } else if (kind == "tilt") {
        doc["inputs"]["t"] = t;
        doc["inputs"]["x"] = x;
        doc["results"]["mc"] = pk::to_json(pk::tilted_moment_check(m, t, x, cfg));
    } else {
        throw std::invalid_argument("unknown mc kind: " + kind);
    }
    emit(doc);
    return 0;
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

struct Axis {
    char var = 't';
    std::vector<double> values;
};

/// Parse `t=a..b:logN` / `x=a..b:linN`.
Axis parse_axis(const std::string& text) {
    Axis ax;
    const size_t eq = text.find('=');
    const size_t dots = text.find("..");
    const size_t colon = text.find(':');
    if (eq == std::string::npos || dots == std::string::npos ||
        colon == std::string::npos || !(eq < dots && dots < colon))
        throw std::invalid_argument("axis must look like t=a..b:logN or x=a..b:linN");
    const std::string var = text.substr(0, eq);
    if (var != "t" && var != "x")
        throw std::invalid_argument("axis variable must be t or x");
    ax.var = var[0];
    const double lo = std::stod(text.substr(eq + 1, dots - eq - 1));
    const double hi = std::stod(text.substr(dots + 2, colon - dots - 2));
    const std::string tail = text.substr(colon + 1);
    bool log_scale = false;
    size_t num_at = 0;
    if (tail.rfind("log", 0) == 0) {
        log_scale = true;
        num_at = 3;
    } else if (tail.rfind("lin", 0) == 0) {
        num_at = 3;
    } else {
        throw std::invalid_argument("axis scale must be logN or linN");
    }
    const int n = std::stoi(tail.substr(num_at));
    if (n < 2) throw std::invalid_argument("axis needs at least 2 points");
    if (!(lo > 0.0) || !(hi > lo))
        throw std::invalid_argument("axis endpoints must satisfy 0 < a < b");
    for (int i = 0; i < n; ++i) {
        const double f = static_cast<double>(i) / (n - 1);
        ax.values.push_back(log_scale ? lo * std::pow(hi / lo, f)
                                      : lo + (hi - lo) * f);
    }
    return ax;
}

int cmd_sweep(const CommonArgs& args, const std::string& axis_text,
              std::optional<double> fixed_t, std::optional<double> fixed_x,
              std::optional<double> fixed_xt, double delta,
              const std::string& quantities_csv, bool with_oracle,
              const std::string& out_path) {
    const pk::SubordinatorSpec m = resolve_model(args);
    const Axis ax = parse_axis(axis_text);

    std::vector<std::string> quantities;
    {
        std::stringstream ss(quantities_csv);
        std::string item;
        while (std::getline(ss, item, ',')) quantities.push_back(item);
    }
    const std::vector<std::string> known = {"density",     "hJ_density",
                                            "hJ_interval", "hC_interval",
                                            "hC_density",  "creep_conditional"};
    for (const auto& q : quantities)
        if (std::find(known.begin(), known.end(), q) == known.end())
            throw std::invalid_argument("unknown sweep quantity: " + q);

    std::ostringstream csv;
    csv << ax.var << ",rho,tH";
    for (const auto& q : quantities) {
        csv << "," << q;
        if (with_oracle && (q == "density" || q == "hJ_density"))
            csv << "," << q << "_oracle," << q << "_ratio";
    }
    csv << "\n";

    for (const double v : ax.values) {
        double t, x;
        if (ax.var == 't') {
            t = v;
            if (fixed_xt)
                x = *fixed_xt * t;
            else if (fixed_x)
                x = *fixed_x;
            else
                throw std::invalid_argument("t-sweep needs --x or --xt");
        } else {
            x = v;
            if (!fixed_t) throw std::invalid_argument("x-sweep needs --t");
            t = *fixed_t;
        }
        const pk::SaddlePoint sp = pk::solve_rho(m, t, x);
        csv << fmt(v) << "," << fmt(sp.rho) << "," << fmt(sp.tH);
        for (const auto& q : quantities) {
            double est = 0.0;
            if (q == "density")
                est = pk::density_estimate(sp, x).value;
            else if (q == "hJ_density")
                est = pk::hJ_density(m, t, x).value;
            else if (q == "hJ_interval")
                est = pk::hJ_interval(m, t, x, delta).value;
            else if (q == "hC_interval")
                est = pk::hC_interval(m, t, x, delta).value;
            else if (q == "hC_density")
                est = pk::hC_density(m, t, x).value;
            else
                est = pk::creep_conditional(m, t, x);
            csv << "," << fmt(est);
            if (with_oracle && q == "density") {
                const double oracle = pk::exact_density(m, t, x).value;
                csv << "," << fmt(oracle) << "," << fmt(est / oracle);
            } else if (with_oracle && q == "hJ_density") {
                const double oracle = pk::convolve_hJ(m, t, x);
                csv << "," << fmt(oracle) << "," << fmt(est / oracle);
            }
        }
        csv << "\n";
    }

    if (out_path.empty())
        std::cout << csv.str();
    else
        write_atomic(out_path, csv.str());
    return 0;
}

// ---------------------------------------------------------------------------
// check
// ---------------------------------------------------------------------------

int cmd_check(const CommonArgs& args, const std::string& suite) {
    const pk::SubordinatorSpec m = resolve_model(args);
    json doc = pk::make_run_output(
        "check", {{"model", pk::render_model(m)}, {"suite", suite}});
    auto& res = doc["results"];
    bool pass = true;

    auto log_grid = [](double lo, double hi, int n) {
        std::vector<double> g(n);
        for (int i = 0; i < n; ++i)
            g[i] = std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * i / (n - 1.0));
        return g;
    };

    if (suite == "lemma2") {
        int violations = 0;
        for (double u : log_grid(1e-3, 1e3, 60)) {
            const double H = pk::big_h(m, u);
            const double Q = pk::q_pi(m, 1.0 / u);
            const double s2 = pk::sigma2(m, u);
            const double ratio = pk::tail(m, 1.0 / u) / pk::k_pi(m, 1.0 / u);
            if (!(H <= Q * (1.0 + 1e-12))) ++violations;
            if (!(H >= Q / (2.0 * std::exp(1.0)) * (1.0 - 1e-12))) ++violations;
            if (!(u * u * s2 <= 2.0 * H * (1.0 + 1e-12))) ++violations;
            if (!(u * u * s2 / H >= std::exp(-1.0) / (1.0 + ratio) * (1.0 - 1e-12)))
                ++violations;
        }
        res["violations"] = violations;
        pass = violations == 0;
    } else if (suite == "moments") {
        double worst = 0.0;
        for (double x : {0.3, 1.0, 7.0})
            for (int k : {1, 2, 3}) {
                const double closed = pk::truncated_moment(m, k, x);
                const double quad = pk::truncated_moment_quad(m, k, x);
                worst = std::max(worst, std::fabs(quad / closed - 1.0));
            }
        for (double x : {0.5, 2.0}) pk::ratio_suite(m, x); // throws on mismatch
        res["worst_rel_err"] = pk::json_num(worst);
        pass = worst <= 1e-9;
    } else if (suite == "hypH") {
        const pk::HReport r = pk::hypothesis_H_check(m);
        const bool expect_fail = m.kind == pk::ModelKind::CompoundPoissonExp;
        res["hypothesis_h"] = pk::to_json(r);
        res["expected_fail"] = expect_fail;
        pass = (r.verdict == pk::HVerdict::Fail) == expect_fail;
    } else if (suite == "sc") {
        auto report_dir = [&](bool toward_zero) {
            double worst_sc = 0.0, worst_sc00 = 0.0;
            for (double y : log_grid(toward_zero ? 1e-6 : 1.0, toward_zero ? 1.0 : 1e6, 25)) {
                worst_sc = std::max(worst_sc, pk::tail(m, y) / pk::k_pi(m, y));
                const double m1 = pk::truncated_moment(m, 1, y);
                const double m2 = pk::truncated_moment(m, 2, y);
                if (m2 > 0.0)
                    worst_sc00 =
                        std::max(worst_sc00, y * (m.drift_b + m1) / m2);
            }
            return json{{"sc_max", pk::json_num(worst_sc)},
                        {"sc00_max", pk::json_num(worst_sc00)}};
        };
        res["toward_zero"] = report_dir(true);
        res["toward_infinity"] = report_dir(false);
        pass = true; // numeric report only, never a hard boolean
    } else if (suite == "determinism") {
        pk::McConfig mc;
        mc.n = 50000;
        mc.seed = args.seed;
        auto doc_for = [&](int workers) {
            pk::McConfig c = mc;
            c.workers = workers;
            return pk::to_json(pk::simulate_passage(m, 1.0, 1.0, 1.0, c)).dump();
        };
        const std::string w1 = doc_for(1);
        pass = w1 == doc_for(4) && w1 == doc_for(8);
        res["byte_identical"] = pass;
    } else {
        throw std::invalid_argument("unknown suite: " + suite);
    }

    doc["results"]["pass"] = pass;
    emit(doc);
    return pass ? 0 : 4;
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

int cmd_verify(uint64_t seed, int workers, uint64_t mc_n) {
    pk::AcceptanceOptions opt;
    opt.seed = seed;
    opt.workers = workers;
    opt.mc_n = mc_n;
    const auto results = pk::run_acceptance(opt);
    json doc = pk::make_run_output(
        "verify", {{"seed", seed}, {"workers", workers}, {"mc_n", mc_n}});
    json arr = json::array();
    bool all = true;
    for (const auto& r : results) {
        arr.push_back({{"id", r.id},
                       {"name", r.name},
                       {"pass", r.pass},
                       {"detail", r.detail},
                       {"seconds", r.seconds}});
        all = all && r.pass;
        std::fprintf(stderr, "[%s] %02d %s\n", r.pass ? "PASS" : "FAIL", r.id,
                     r.name.c_str());
    }
    doc["results"]["criteria"] = arr;
    doc["results"]["pass"] = all;
    emit(doc);
    return all ? 0 : 4;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"saddle-point first-passage estimates for subordinators"};
    app.require_subcommand(1);

    CommonArgs common;
    common.seed = default_seed();

    double t = 1.0, x = 1.0, delta = 1.0, delta0 = 10.0, lambda = 0.0, y = 1.0;
    std::optional<double> z, fixed_t, fixed_x, fixed_xt;
    std::string quantity, kind = "passage", suite, axis_text, out_path;
    std::string quantities_csv = "density,hJ_density";
    bool with_oracle = false;
    double delta_inf = 0.0; // potential: 0 means +inf
    std::vector<double> probes, t0s;
    pk::McConfig mc;
    mc.seed = common.seed;
    int verify_workers = 4;
    uint64_t verify_mc_n = 1000000;

    auto add_model = [&](CLI::App* sub) {
        sub->add_option("--model", common.model_text, "model spec string")->required();
        sub->add_option("--config", common.config_path, "JSON config with model aliases");
    };

    auto* c_saddle = app.add_subcommand("saddle", "solve the tilt equation and classify");
    add_model(c_saddle);
    c_saddle->add_option("--t", t)->required();
    c_saddle->add_option("--x", x)->required();

    auto* c_density = app.add_subcommand("density", "local density estimate");
    add_model(c_density);
    c_density->add_option("--t", t)->required();
    c_density->add_option("--x", x, "anchor level")->required();
    c_density->add_option("--z", z, "evaluation point (defaults to x)");
    c_density->add_flag("--oracle", with_oracle, "also evaluate the exact density");

    auto* c_passage = app.add_subcommand("passage", "first-passage estimates");
    add_model(c_passage);
    c_passage->add_option("--t", t)->required();
    c_passage->add_option("--x", x)->required();
    c_passage->add_option("--delta", delta)->required();
    c_passage->add_option("--delta0", delta0, "interval length cap");

    auto* c_oracle = app.add_subcommand("oracle", "exact reference computations");
    add_model(c_oracle);
    c_oracle
        ->add_option("--quantity", quantity,
                     "exact_density | convolve_hJ | invert_g | potential | hypothesis_h")
        ->required();
    c_oracle->add_option("--t", t);
    c_oracle->add_option("--x", x);
    c_oracle->add_option("--lambda", lambda, "tilt (invert_g; defaults to rho)");
    c_oracle->add_option("--delta", delta_inf, "window (potential; 0 means infinity)");
    c_oracle->add_option("--y", y, "evaluation point (potential)");
    c_oracle->add_option("--t0", t0s, "hypothesis-H candidates");

    auto* c_mc = app.add_subcommand("mc", "Monte Carlo runs");
    add_model(c_mc);
    c_mc->add_option("--kind", kind, "marginal | passage | tilt");
    c_mc->add_option("--t", t);
    c_mc->add_option("--x", x);
    c_mc->add_option("--delta", delta);
    c_mc->add_option("--n", mc.n);
    c_mc->add_option("--seed", mc.seed);
    c_mc->add_option("--eps", mc.eps);
    c_mc->add_option("--step-cap", mc.step_cap);
    c_mc->add_option("--workers", mc.workers);
    c_mc->add_option("--probe", probes, "empirical CDF probe points (marginal)");

    auto* c_sweep = app.add_subcommand("sweep", "CSV sweeps along t or x");
    add_model(c_sweep);
    c_sweep->add_option("--axis", axis_text, "t=a..b:logN or x=a..b:linN")->required();
    c_sweep->add_option("--t", fixed_t, "fixed t (x-sweeps)");
    c_sweep->add_option("--x", fixed_x, "fixed x (t-sweeps)");
    c_sweep->add_option("--xt", fixed_xt, "fixed x/t (t-sweeps)");
    c_sweep->add_option("--delta", delta);
    c_sweep->add_option("--quantities", quantities_csv, "comma list of estimate columns");
    c_sweep->add_flag("--oracle", with_oracle, "add oracle and ratio columns");
    c_sweep->add_option("--out", out_path, "output CSV path (stdout if omitted)");

    auto* c_check = app.add_subcommand("check", "named verification suites");
    add_model(c_check);
    c_check
        ->add_option("--suite", suite, "lemma2 | moments | hypH | sc | determinism")
        ->required();
    c_check->add_option("--seed", common.seed);

    auto* c_verify = app.add_subcommand("verify", "run the acceptance battery");
    c_verify->add_option("--seed", common.seed);
    c_verify->add_option("--workers", verify_workers);
    c_verify->add_option("--mc-n", verify_mc_n);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        app.exit(e);
        return 2;
    }

    try {
        if (c_saddle->parsed()) return cmd_saddle(common, t, x);
        if (c_density->parsed()) return cmd_density(common, t, x, z, with_oracle);
        if (c_passage->parsed()) return cmd_passage(common, t, x, delta, delta0);
        if (c_oracle->parsed())
            return cmd_oracle(common, quantity, t, x, lambda,
                              delta_inf > 0.0 ? delta_inf : pk::kInf, y, t0s);
        if (c_mc->parsed()) return cmd_mc(common, kind, t, x, delta, mc, probes);
        if (c_sweep->parsed())
            return cmd_sweep(common, axis_text, fixed_t, fixed_x, fixed_xt, delta,
                             quantities_csv, with_oracle, out_path);
        if (c_check->parsed()) return cmd_check(common, suite);
        if (c_verify->parsed())
            return cmd_verify(common.seed, verify_workers, verify_mc_n);
    } catch (const pk::convergence_failure& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const pk::step_cap_exceeded& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
