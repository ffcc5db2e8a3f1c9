#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "fadetail/model_json.hpp"

using namespace fadetail;

// --- wire format ------------------------------------------------------------

static const std::vector<std::string>& wire_examples() {
    static const std::vector<std::string> ws = {
        R"({"model":"TwoWave","params":{"rho1":1.0,"rho2":0.8}})",
        R"({"model":"ThreeWave","params":{"rho1":1.0,"rho2":0.7914,"rho3":0.2126}})",
        R"({"model":"Rayleigh","params":{"A":1.0}})",
        R"({"model":"Rician","params":{"k1":5.0,"A":1.0}})",
        R"({"model":"TWDP","params":{"k2":5.0,"delta":0.9,"A":1.0}})",
        R"({"model":"Weibull","params":{"beta_w":2.0,"A":1.0}})",
        R"({"model":"Nakagami","params":{"m":2.0,"A":1.0}})",
        R"({"model":"KappaMu","params":{"kappa":3.9,"mu":2.0,"A":1.0}})",
        R"({"model":"KappaMuM","params":{"kappa":3.9,"mu":2.0,"m":2.5,"A":1.0}})",
        R"({"model":"KappaMuAlpha","params":{"kappa":3.9,"mu":2.0,"alpha_ig":3.5,"A":1.0}})",
        R"({"model":"Suzuki","params":{"sigma_dB":6.0,"mu_dB":0.0}})",
        R"({"model":"LogNormal","params":{"sigma_dB":6.0,"mu_dB":0.0}})",
        R"({"model":"CascadedRayleigh","params":{"gamma_corr":0.5,"A":1.0}})",
    };
    return ws;
}

TEST_CASE("every model round-trips through the wire format") {
    for (const auto& w : wire_examples()) {
        INFO(w);
        models::ChannelModel m = json::parse_model(w);
        std::string s = json::serialize_model(m);
        models::ChannelModel m2 = json::parse_model(s);
        CHECK(s == json::serialize_model(m2));
        CHECK(std::string(models::model_name(m)) ==
              std::string(models::model_name(m2)));
        CHECK(models::mean_power(m) == models::mean_power(m2));
    }
}

TEST_CASE("malformed input is rejected as invalid") {
    const std::vector<std::string> bad = {
        "not json at all",
        "{}",
        R"({"model":"Rayleigh"})",
        R"({"model":"NoSuchModel","params":{"A":1.0}})",
        R"({"model":"Rayleigh","params":{"A":1.0,"extra":2.0}})",
        R"({"model":"Rayleigh","params":{}})",
        R"({"model":"Rician","params":{"k1":5.0}})",
        R"({"model":"Rayleigh","params":{"A":"one"}})",
        R"({"model":"Rayleigh","params":{"A":1.0},"junk":true})",
        R"([{"model":"Rayleigh","params":{"A":1.0}}])",
    };
    for (const auto& w : bad) {
        INFO(w);
        CHECK_THROWS_AS(json::parse_model(w), std::invalid_argument);
    }
}

TEST_CASE("out-of-range parameters are rejected as domain errors") {
    const std::vector<std::string> bad = {
        R"({"model":"Rayleigh","params":{"A":0.0}})",
        R"({"model":"Rayleigh","params":{"A":-1.0}})",
        R"({"model":"Weibull","params":{"beta_w":0.4,"A":1.0}})",
        R"({"model":"Nakagami","params":{"m":0.3,"A":1.0}})",
        R"({"model":"TWDP","params":{"k2":5.0,"delta":1.5,"A":1.0}})",
        R"({"model":"KappaMuAlpha","params":{"kappa":1.0,"mu":1.0,"alpha_ig":1.0,"A":1.0}})",
        R"({"model":"CascadedRayleigh","params":{"gamma_corr":1.5,"A":1.0}})",
        R"({"model":"LogNormal","params":{"sigma_dB":0.0,"mu_dB":0.0}})",
    };
    for (const auto& w : bad) {
        INFO(w);
        CHECK_THROWS_AS(json::parse_model(w), std::domain_error);
    }
}

TEST_CASE("diversity configurations round-trip") {
    std::string w =
        R"({"scheme":"SC","branches":[)"
        R"({"model":"Rayleigh","params":{"A":1.0}},)"
        R"({"model":"Rician","params":{"k1":5.0,"A":2.0}}]})";
    auto c = json::parse_diversity(w);
    CHECK(c.scheme == diversity::Scheme::SelectionCombining);
    CHECK(c.set.branches.size() == 2);
    std::string s = json::serialize_diversity(c);
    auto c2 = json::parse_diversity(s);
    CHECK(json::serialize_diversity(c2) == s);

    auto mrc = json::parse_diversity(
        R"({"scheme":"MRC","branches":[{"model":"Rayleigh","params":{"A":1.0}}]})");
    CHECK(mrc.scheme == diversity::Scheme::MaximumRatioCombining);

    CHECK_THROWS_AS(json::parse_diversity(R"({"scheme":"EGC","branches":[]})"),
                    std::invalid_argument);
    CHECK_THROWS_AS(json::parse_diversity(R"({"branches":[]})"),
                    std::invalid_argument);
    CHECK_THROWS_AS(json::parse_diversity(R"({"scheme":"SC","branches":[]})"),
                    std::invalid_argument);
}

// --- command line -----------------------------------------------------------

struct RunResult {
    int exit_code;
    std::string out;
};

static RunResult run_cli(const std::string& args) {
    std::string cmd = std::string(FADETAIL_CLI_PATH) + " " + args + " 2>&1";
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    std::string out;
    std::array<char, 4096> buf;
    size_t got;
    while ((got = fread(buf.data(), 1, buf.size(), p)) > 0)
        out.append(buf.data(), got);
    int st = pclose(p);
    return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, out};
}

struct Csv {
    std::vector<std::string> header_lines;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
};

static Csv parse_csv(const std::string& text) {
    Csv c;
    std::istringstream in(text);
    std::string line;
    bool have_cols = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            c.header_lines.push_back(line);
            continue;
        }
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (line.back() == ',') cells.push_back("");
        if (!have_cols) {
            c.columns = cells;
            have_cols = true;
        } else {
            c.rows.push_back(cells);
        }
    }
    return c;
}

static size_t col_index(const Csv& c, const std::string& name) {
    for (size_t i = 0; i < c.columns.size(); ++i)
        if (c.columns[i] == name) return i;
    REQUIRE(false);
    return 0;
}

static const std::string kRayleigh = R"({"model":"Rayleigh","params":{"A":1.0}})";

TEST_CASE("tail subcommand prints the expected grid") {
    auto r = run_cli("tail --model '" + kRayleigh + "' --grid -80:-20:10");
    REQUIRE(r.exit_code == 0);
    Csv c = parse_csv(r.out);
    REQUIRE(c.header_lines.size() >= 3);
    CHECK(c.header_lines[0].rfind("# fadetail ", 0) == 0);
    CHECK(c.columns == std::vector<std::string>{"p_dB", "eps_tail", "local_slope"});
    REQUIRE(c.rows.size() == 7);
    // Rayleigh at -60 dB: eps_tail = 1e-6 with unit slope
    CHECK(std::stod(c.rows[2][0]) == doctest::Approx(-60.0));
    CHECK(std::stod(c.rows[2][1]) == doctest::Approx(1e-6).epsilon(1e-12));
    CHECK(std::stod(c.rows[2][2]) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("model argument can come from a file") {
    std::string path = "/tmp/fadetail_iface_model.json";
    std::ofstream(path) << kRayleigh;
    auto r = run_cli("tail --model " + path + " --grid -60:-60:1");
    REQUIRE(r.exit_code == 0);
    Csv c = parse_csv(r.out);
    REQUIRE(c.rows.size() == 1);
    CHECK(std::stod(c.rows[0][1]) == doctest::Approx(1e-6).epsilon(1e-12));
}

TEST_CASE("curve reports exact outage and error bound") {
    auto r = run_cli("curve --model '" + kRayleigh + "' --grid -40:-40:1");
    REQUIRE(r.exit_code == 0);
    Csv c = parse_csv(r.out);
    REQUIRE(c.rows.size() == 1);
    double exact = std::stod(c.rows[0][col_index(c, "eps_exact")]);
    double tail = std::stod(c.rows[0][col_index(c, "eps_tail")]);
    double phi = std::stod(c.rows[0][col_index(c, "phi")]);
    CHECK(exact == doctest::Approx(-std::expm1(-1e-4)).epsilon(1e-12));
    CHECK(tail == doctest::Approx(1e-4).epsilon(1e-12));
    CHECK(exact >= tail * (1.0 - phi) - 1e-12);
    CHECK(exact <= tail * (1.0 + phi) + 1e-12);
}

TEST_CASE("invert round-trips the requested outage levels") {
    auto r = run_cli("invert --model '" + kRayleigh + "' --eps 1e-9,1e-6,1e-3");
    REQUIRE(r.exit_code == 0);
    Csv c = parse_csv(r.out);
    REQUIRE(c.rows.size() == 3);
    size_t err = col_index(c, "roundtrip_rel_err");
    for (const auto& row : c.rows) CHECK(std::stod(row[err]) < 1e-12);
}

TEST_CASE("validate succeeds on a well-behaved model") {
    auto r = run_cli("validate --model '" + kRayleigh + "' --eta 0.1");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("\"pass\"") != std::string::npos);
    auto ln = run_cli(
        R"(validate --model '{"model":"LogNormal","params":{"sigma_dB":6.0,"mu_dB":0.0}}')");
    CHECK(ln.exit_code == 0);
    CHECK(ln.out.find("ln_accuracy_claim") != std::string::npos);
}

TEST_CASE("configuration errors exit with code 2") {
    CHECK(run_cli("tail --model 'not json' --grid -60:-20:10").exit_code == 2);
    CHECK(run_cli(R"(tail --model '{"model":"NoSuch","params":{}}' --grid -60:-20:10)")
              .exit_code == 2);
    CHECK(run_cli(R"(tail --model '{"model":"Rayleigh","params":{"A":-1.0}}' --grid -60:-20:10)")
              .exit_code == 2);
    CHECK(run_cli("tail --model '" + kRayleigh + "' --grid -20:-60:10").exit_code == 2);
    CHECK(run_cli("bogus-subcommand").exit_code == 2);
}

TEST_CASE("mc output is byte-identical across worker counts") {
    std::string base = "mc --model '" + kRayleigh +
                       "' --grid -35:-20:5 --n 2000000 --seed 42 --workers ";
    auto a = run_cli(base + "1");
    auto b = run_cli(base + "4");
    auto c = run_cli(base + "16");
    REQUIRE(a.exit_code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out == c.out);
    Csv csv = parse_csv(a.out);
    size_t eh = col_index(csv, "eps_hat");
    size_t ee = col_index(csv, "eps_exact");
    size_t ci = col_index(csv, "ci95");
    for (const auto& row : csv.rows) {
        double diff = std::fabs(std::stod(row[eh]) - std::stod(row[ee]));
        CHECK(diff <= 4.0 * std::stod(row[ci]));
    }
}

TEST_CASE("diversity subcommand covers both schemes") {
    std::string cfg =
        R"('{"scheme":"SC","branches":[{"model":"Rayleigh","params":{"A":1.0}},)"
        R"({"model":"Rayleigh","params":{"A":1.0}}]}')";
    auto r = run_cli("diversity --model " + cfg +
                     " --grid -15:-15:1 --n 4000000 --seed 11");
    REQUIRE(r.exit_code == 0);
    Csv c = parse_csv(r.out);
    REQUIRE(c.rows.size() == 1);
    double hat = std::stod(c.rows[0][col_index(c, "eps_hat")]);
    double ana = std::stod(c.rows[0][col_index(c, "eps_analytic")]);
    double ci = std::stod(c.rows[0][col_index(c, "ci95")]);
    CHECK(std::fabs(hat - ana) <= 4.0 * ci);
}

TEST_CASE("output file matches stdout and json format is well formed") {
    std::string path = "/tmp/fadetail_iface_out.csv";
    auto r = run_cli("tail --model '" + kRayleigh + "' --grid -60:-40:10 --out " + path);
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.empty());  // redirected to the file
    auto direct = run_cli("tail --model '" + kRayleigh + "' --grid -60:-40:10");
    std::ifstream f(path);
    std::stringstream ss;
    ss << f.rdbuf();
    CHECK(ss.str() == direct.out);  // --out must not change the bytes
    auto j = run_cli("tail --model '" + kRayleigh + "' --grid -60:-40:10 --format json");
    REQUIRE(j.exit_code == 0);
    CHECK(j.out.find("\"rows\"") != std::string::npos);
}
