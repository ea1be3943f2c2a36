// SPDX-License-Identifier: MIT
#include <catch2/catch_amalgamated.hpp>

#include "passagekit/model_parse.hpp"

#include <json.hpp>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace passagekit;
using Catch::Approx;
using nlohmann::json;

#ifndef PASSAGEKIT_CLI_PATH
#error "PASSAGEKIT_CLI_PATH must be defined by the build"
#endif
#ifndef PASSAGEKIT_SCHEMA_PATH
#error "PASSAGEKIT_SCHEMA_PATH must be defined by the build"
#endif

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
};

RunResult run_cli(const std::string& args, const std::string& env = "") {
    const std::string cmd =
        env + " " + std::string(PASSAGEKIT_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult r;
    std::array<char, 4096> buf;
    size_t got;
    while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0)
        r.out.append(buf.data(), got);
    const int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

size_t column(const std::vector<std::vector<std::string>>& rows, const std::string& name) {
    for (size_t i = 0; i < rows.at(0).size(); ++i)
        if (rows[0][i] == name) return i;
    FAIL("column not found: " << name);
    return 0;
}

// Minimal structural validator for the shipped schema subset
// (type/required/properties).
void validate_schema(const json& doc, const json& schema) {
    if (schema.contains("type")) {
        const std::string ty = schema["type"].get<std::string>();
        if (ty == "object") REQUIRE(doc.is_object());
        if (ty == "array") REQUIRE(doc.is_array());
        if (ty == "string") REQUIRE(doc.is_string());
        if (ty == "number") REQUIRE(doc.is_number());
    }
    if (schema.contains("required"))
        for (const auto& key : schema["required"])
            REQUIRE(doc.contains(key.get<std::string>()));
    if (schema.contains("properties"))
        for (const auto& [key, sub] : schema["properties"].items())
            if (doc.contains(key)) validate_schema(doc.at(key), sub);
}

// The finite-or-string contract: nlohmann serializes non-finite doubles as
// null, so a document without nulls has every numeric field finite.
void check_no_null(const json& doc) {
    REQUIRE_FALSE(doc.is_null());
    if (doc.is_object())
        for (const auto& [k, v] : doc.items()) check_no_null(v);
    if (doc.is_array())
        for (const auto& v : doc) check_no_null(v);
}

json load_schema() {
    std::ifstream in(PASSAGEKIT_SCHEMA_PATH);
    REQUIRE(in.good());
    return json::parse(in);
}

} // namespace

TEST_CASE("model grammar", "[cli]") {
    const SubordinatorSpec g = parse_model("gamma:a=1,theta=1");
    CHECK(g.kind == ModelKind::Gamma);
    CHECK(g.drift_b == 0.0);

    const SubordinatorSpec c = parse_model("cpexp:rate=1,eta=1,b=0.5");
    CHECK(c.kind == ModelKind::CompoundPoissonExp);
    CHECK(c.drift_b == 0.5);

    const SubordinatorSpec h = parse_model("stable_half");
    CHECK(h.alpha == 0.5);
    CHECK(h.s == Approx(std::sqrt(2.0)));

    CHECK_THROWS_AS(parse_model("stable:alpha=1.5"), std::invalid_argument);
    CHECK_THROWS_AS(parse_model("gamma:bogus=1"), parse_error);
    CHECK_THROWS_AS(parse_model("gamma:a=xyz"), parse_error);
    CHECK_THROWS_AS(parse_model("gamma:a=1,"), parse_error);
    CHECK_THROWS_AS(parse_model("nosuch"), parse_error);
    CHECK_THROWS_AS(parse_model("stable_half:alpha=0.4"), parse_error);

    // parse -> render -> parse is idempotent
    for (const char* text :
         {"gamma:a=2.5,theta=0.25,b=0.125", "stable:alpha=0.7,s=1.3",
          "cpexp:rate=3,eta=0.5,b=1", "stable_half:b=0.25"}) {
        const SubordinatorSpec m1 = parse_model(text);
        const SubordinatorSpec m2 = parse_model(render_model(m1));
        CHECK(render_model(m1) == render_model(m2));
    }
}

TEST_CASE("passage command output", "[cli]") {
    const RunResult r =
        run_cli("passage --model stable_half --t 2 --x 1 --delta 0.5");
    REQUIRE(r.exit_code == 0);
    const json doc = json::parse(r.out);
    CHECK(doc["results"]["hJ_interval"]["value"].get<double>() ==
          Approx(0.0341288).epsilon(1e-5));
    CHECK(doc["diagnostics"]["saddle"]["tH"].get<double>() == Approx(2.0));
    const auto& warn = doc["warnings"];
    CHECK(std::find(warn.begin(), warn.end(), json("pre-asymptotic")) != warn.end());

    validate_schema(doc, load_schema());
    check_no_null(doc);
}

TEST_CASE("exit code contract", "[cli]") {
    CHECK(run_cli("saddle --model gamma:a=1,theta=1 --t 10 --x 15").exit_code == 2);
    CHECK(run_cli("saddle --model stable:alpha=1.5 --t 1 --x 1").exit_code == 2);
    CHECK(run_cli("saddle --model gamma:a=1,thota=1 --t 1 --x 0.5").exit_code == 2);
    CHECK(run_cli("oracle --model cpexp:rate=1,eta=1 --quantity invert_g --t 2 --x 1")
              .exit_code == 2);
    CHECK(run_cli("nosuchcommand").exit_code == 2);
    CHECK(run_cli("saddle --model gamma:a=1,theta=1 --t 4 --x 2").exit_code == 0);
}

TEST_CASE("check suites", "[cli]") {
    const RunResult h = run_cli("check --suite hypH --model cpexp:rate=1,eta=1");
    CHECK(h.exit_code == 0); // expected fail is annotated, not an error
    const json hj = json::parse(h.out);
    CHECK(hj["results"]["hypothesis_h"]["verdict"] == "Fail");
    CHECK(hj["results"]["expected_fail"] == true);
    CHECK(hj["results"]["pass"] == true);

    const RunResult l = run_cli("check --suite lemma2 --model stable:alpha=0.3,s=2");
    CHECK(l.exit_code == 0);
    CHECK(json::parse(l.out)["results"]["violations"] == 0);

    const RunResult s = run_cli("check --suite sc --model stable_half");
    CHECK(s.exit_code == 0);
    const json sj = json::parse(s.out);
    // stable tail-to-K ratio is exactly (2 - alpha)/alpha = 3 in both directions
    CHECK(sj["results"]["toward_zero"]["sc_max"].get<double>() == Approx(3.0));

    const RunResult m = run_cli("check --suite moments --model gamma:a=2,theta=0.7");
    CHECK(m.exit_code == 0);

    const RunResult d =
        run_cli("check --suite determinism --model cpexp:rate=1,eta=1,b=0.5 --seed 7");
    CHECK(d.exit_code == 0);
    CHECK(json::parse(d.out)["results"]["byte_identical"] == true);

    CHECK(run_cli("check --suite nosuch --model stable_half").exit_code == 2);
}

TEST_CASE("sweep CSV: exact ratio and monotone tH", "[cli]") {
    const RunResult r = run_cli(
        "sweep --model stable_half --axis t=1..32:log6 --x 1 "
        "--quantities hJ_density --oracle");
    REQUIRE(r.exit_code == 0);
    const auto rows = parse_csv(r.out);
    REQUIRE(rows.size() == 7); // header + 6 points
    const size_t ratio_col = column(rows, "hJ_density_ratio");
    for (size_t i = 1; i < rows.size(); ++i)
        CHECK(std::stod(rows[i][ratio_col]) == Approx(1.0).epsilon(1e-8));

    // tH strictly increasing along a t-sweep at fixed x_t
    const RunResult r2 = run_cli(
        "sweep --model stable_half --axis t=1..32:log6 --xt 0.5 "
        "--quantities density");
    REQUIRE(r2.exit_code == 0);
    const auto rows2 = parse_csv(r2.out);
    const size_t th_col = column(rows2, "tH");
    double prev = 0.0;
    for (size_t i = 1; i < rows2.size(); ++i) {
        const double v = std::stod(rows2[i][th_col]);
        CHECK(v > prev);
        prev = v;
    }
}

TEST_CASE("sweep CSV: gamma Stirling convergence", "[cli]") {
    const RunResult r = run_cli(
        "sweep --model gamma:a=1,theta=1 --axis t=20..2000:log5 --xt 0.5 "
        "--quantities density --oracle");
    REQUIRE(r.exit_code == 0);
    const auto rows = parse_csv(r.out);
    const size_t ratio_col = column(rows, "density_ratio");
    double prev = kInf;
    double last_err = 0.0, last_t = 0.0;
    for (size_t i = 1; i < rows.size(); ++i) {
        const double err = std::fabs(std::stod(rows[i][ratio_col]) - 1.0);
        CHECK(err < prev);
        prev = err;
        last_err = err;
        last_t = std::stod(rows[i][0]);
    }
    CHECK(last_err <= 1.0 / (10.0 * last_t));
}

TEST_CASE("no partial CSV on failure", "[cli]") {
    const std::string path = "/tmp/passagekit_test_sweep.csv";
    std::remove(path.c_str());
    const RunResult r = run_cli(
        "sweep --model stable_half --axis t=1..4:log3 --x 1 "
        "--quantities nosuchquantity --out " + path);
    CHECK(r.exit_code == 2);
    std::ifstream in(path);
    CHECK_FALSE(in.good());

    // failure midway through the grid (x_t crosses mu) must not leave a file
    const RunResult mid = run_cli(
        "sweep --model gamma:a=1,theta=1 --axis x=0.5..20:lin5 --t 10 "
        "--quantities density --out " + path);
    CHECK(mid.exit_code == 2);
    std::ifstream in_mid(path);
    CHECK_FALSE(in_mid.good());

    const RunResult ok = run_cli(
        "sweep --model stable_half --axis t=1..4:log3 --x 1 "
        "--quantities hJ_density --out " + path);
    CHECK(ok.exit_code == 0);
    std::ifstream in2(path);
    CHECK(in2.good());
    std::remove(path.c_str());
}

TEST_CASE("mc determinism and seeding", "[cli]") {
    const std::string base =
        "mc --model cpexp:rate=1,eta=1,b=0.5 --kind passage --t 1 --x 1 "
        "--delta 1 --n 20000 --seed 7";
    const RunResult w1 = run_cli(base + " --workers 1");
    const RunResult w8 = run_cli(base + " --workers 8");
    REQUIRE(w1.exit_code == 0);
    CHECK(w1.out == w8.out);

    // PASSAGEKIT_SEED provides the default seed
    const std::string noseed =
        "mc --model cpexp:rate=1,eta=1,b=0.5 --kind passage --t 1 --x 1 "
        "--delta 1 --n 20000";
    const RunResult env_seed = run_cli(noseed, "PASSAGEKIT_SEED=7");
    CHECK(env_seed.out == w1.out);
    const RunResult other = run_cli(noseed, "PASSAGEKIT_SEED=8");
    CHECK(other.out != w1.out);

    validate_schema(json::parse(w1.out), load_schema());
    check_no_null(json::parse(w1.out));
}

TEST_CASE("config aliases", "[cli]") {
    const std::string cfg_path = "/tmp/passagekit_test_cfg.json";
    {
        std::ofstream out(cfg_path);
        out << R"({"aliases": {"myhalf": "stable_half:b=0.25"}})";
    }
    const RunResult r = run_cli("saddle --model myhalf --config " + cfg_path +
                                " --t 2 --x 1");
    REQUIRE(r.exit_code == 0);
    const json doc = json::parse(r.out);
    CHECK(doc["inputs"]["model"].get<std::string>().find("b=0.25") !=
          std::string::npos);
    std::remove(cfg_path.c_str());
}

TEST_CASE("schema covers every command family", "[cli]") {
    const json schema = load_schema();
    for (const std::string& args :
         {std::string("saddle --model gamma:a=1,theta=1 --t 10 --x 5"),
          std::string("density --model stable_half --t 2 --x 1 --z 1.2 --oracle"),
          std::string("passage --model cpexp:rate=1,eta=1,b=0.5 --t 20 --x 20 --delta 1"),
          std::string("oracle --model gamma:a=1,theta=1 --quantity hypothesis_h"),
          std::string("mc --model stable_half --kind tilt --t 2 --x 1 --n 5000")}) {
        const RunResult r = run_cli(args);
        REQUIRE(r.exit_code == 0);
        const json doc = json::parse(r.out);
        validate_schema(doc, schema);
        check_no_null(doc);
    }
}

TEST_CASE("oracle command round trip", "[cli]") {
    const RunResult r = run_cli(
        "oracle --model cpexp:rate=1,eta=1,b=0.5 --quantity potential --y 1");
    REQUIRE(r.exit_code == 0);
    const json doc = json::parse(r.out);
    CHECK(doc["results"]["u_delta"].get<double>() == Approx(0.7330495).epsilon(1e-6));

    const RunResult g = run_cli(
        "oracle --model stable_half --quantity invert_g --t 2 --x 1 --lambda 2");
    REQUIRE(g.exit_code == 0);
    CHECK(json::parse(g.out)["results"]["g_value"].get<double>() ==
          Approx(0.7978846).epsilon(1e-6));

    // round-trip fidelity of serialized numbers
    const json doc2 = json::parse(g.out);
    const double v = doc2["results"]["g_value"].get<double>();
    const json re = json::parse(json(v).dump());
    CHECK(re.get<double>() == v);
}
