// Apache License, Version 2.0, refer to LICENSE.txt

#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "accrual/app.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Output {
    int status = -1;
    std::string text;
};

Output run_cli(const std::string& args) {
    const std::string cmd = std::string(ACCRUAL_CLI) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    Output out;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) out.text.append(buf, n);
    const int raw = pclose(pipe);
    out.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return out;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
    std::ofstream(p, std::ios::binary) << text;
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("accrual-cli-" + tag + "-" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& name) const { return (path / name).string(); }
};

const std::string kCounts = "day,count\n1,29\n2,34\n3,20\n4,24\n5,30\n6,25\n7,17\n";

std::string error_class(const Output& o) { return json::parse(o.text).at("error").at("class"); }

}  // namespace

TEST_CASE("known n0 of zero forecasts zero") {
    TempDir dir("zero");
    spit(dir / "in.csv", kCounts);
    const auto o = run_cli("forecast --input " + (dir / "in.csv") + " --n0 0 --draws 50");
    REQUIRE(o.status == 0);
    const auto j = json::parse(o.text);
    CHECK(j.at("resolved_n0") == 0);
    for (const auto& h : j.at("horizons")) {
        CHECK(h.at("point_estimate") == 0.0);
        CHECK(h.at("quantiles").at("0.975") == 0.0);
    }
}

TEST_CASE("every command is byte-identical across runs") {
    TempDir dir("det");
    spit(dir / "in.csv", kCounts);
    const std::string in = " --input " + (dir / "in.csv");
    for (const std::string& args : {"forecast" + in + " --draws 60 --seed 4",
                                   "forecast" + in + " --draws 60 --seed 4 --format csv --horizons 3,10",
                                   "forecast" + in + " --draws 30 --seed 4 --emit-draws --workers 2",
                                   "sweep-lambda" + in + " --draws 40 --lambda-grid 2:6:2 --seed 9"}) {
        const auto a = run_cli(args);
        const auto b = run_cli(args);
        CHECK(a.status == 0);
        CHECK(a.text == b.text);
    }

    const auto s1 = run_cli("simulate --seed 12 --n 3000 --total-days 21");
    const auto s2 = run_cli("simulate --seed 12 --n 3000 --total-days 21");
    CHECK(s1.status == 0);
    CHECK(s1.text == s2.text);

    const std::string corpus_args = " --experiments 3 --n 5000 --alpha 1:3 --beta 20:60 --total-days 28 --seed 2";
    REQUIRE(run_cli("simulate --out " + (dir / "c1") + corpus_args).status == 0);
    REQUIRE(run_cli("simulate --out " + (dir / "c2") + corpus_args).status == 0);
    for (const auto& f : {"exp-1.csv", "exp-3.csv", "truth.csv"})
        CHECK(slurp(dir.path / "c1" / f) == slurp(dir.path / "c2" / f));

    const std::string eval = "batch-eval --corpus " + (dir / "c1") + " --truth " + (dir / "c1") +
                             "/truth.csv --draws 40 --seed 3";
    const auto e1 = run_cli(eval);
    const auto e2 = run_cli(eval + " --workers 3");
    CHECK(e1.status == 0);
    CHECK(e1.text == e2.text);
}

TEST_CASE("structured errors and exit codes") {
    TempDir dir("err");
    spit(dir / "bad.csv", "day,count\n1,4\n1,5\n");
    spit(dir / "day1.csv", "day,count\n1,40\n2,0\n3,0\n4,0\n5,0\n6,0\n7,0\n");
    spit(dir / "in.csv", kCounts);

    auto o = run_cli("forecast --input " + (dir / "bad.csv"));
    CHECK(o.status == 3);
    CHECK(error_class(o) == "parse");
    CHECK(json::parse(o.text).at("error").at("message") == "line 3: duplicate day 1");

    o = run_cli("forecast --input " + (dir / "in.csv") + " --n0 5 --lambda 3");
    CHECK(o.status == 2);
    CHECK(error_class(o) == "request");
    o = run_cli("forecast --input " + (dir / "in.csv") + " --bogus");
    CHECK(o.status == 2);
    o = run_cli("forecast --input " + (dir / "in.csv") + " --horizons 14,7");
    CHECK(o.status == 2);

    o = run_cli("forecast --input " + (dir / "day1.csv"));
    CHECK(o.status == 5);
    CHECK(error_class(o) == "model");

    o = run_cli("forecast --input " + (dir / "missing.csv"));
    CHECK(o.status == 4);
    CHECK(error_class(o) == "data");
    o = run_cli("forecast --input " + (dir / "in.csv") + " --d 9");
    CHECK(o.status == 4);

    CHECK(json::parse(o.text).at("schema_version") == accrual::kSchemaVersion);
}

TEST_CASE("single-lambda sweep matches forecast") {
    TempDir dir("sweep");
    spit(dir / "in.csv", kCounts);
    const std::string in = " --input " + (dir / "in.csv") + " --draws 80 --seed 21";
    const auto fc = run_cli("forecast" + in + " --lambda 7 --horizons 14");
    const auto sw = run_cli("sweep-lambda" + in + " --lambda-grid 7 --sweep-horizon 14");
    REQUIRE(fc.status == 0);
    REQUIRE(sw.status == 0);
    const auto f = json::parse(fc.text).at("horizons").at(0);
    const auto entries = json::parse(sw.text).at("entries");
    REQUIRE(entries.size() == 1);
    CHECK(entries[0].at("point_estimate") == f.at("point_estimate"));
    CHECK(entries[0].at("mean") == f.at("mean"));
    CHECK(entries[0].at("quantiles") == f.at("quantiles"));

    const auto empty = run_cli("sweep-lambda" + in + " --lambda-grid 5:1");
    CHECK(empty.status == 2);
    CHECK(error_class(empty) == "request");
}

TEST_CASE("batch-eval scores zero error when truth equals the Bayesian median") {
    TempDir dir("eval");
    REQUIRE(run_cli("simulate --out " + (dir / "corpus") +
                    " --experiments 3 --n 8000 --alpha 1:3 --beta 20:60 --total-days 28 --seed 6")
                .status == 0);
    // An odd draw count keeps every median an integer.
    const std::string common = " --corpus " + (dir / "corpus") + " --draws 41 --seed 8";
    const auto first = run_cli("batch-eval" + common + " --truth " + (dir / "corpus") + "/truth.csv");
    REQUIRE(first.status == 0);
    std::string truth = "experiment_id,week,actual_new\n";
    const auto report = json::parse(first.text);
    for (const auto& p : report.at("predictions")) {
        const double median = p.at("bayes_median");
        truth += p.at("experiment_id").get<std::string>() + "," + std::to_string(p.at("week").get<int>()) + "," +
                 std::to_string(static_cast<long long>(median)) + "\n";
    }
    spit(dir / "echo.csv", truth);
    const auto second = run_cli("batch-eval" + common + " --truth " + (dir / "echo.csv"));
    REQUIRE(second.status == 0);
    const auto metrics = json::parse(second.text).at("metrics");
    REQUIRE(metrics.at(0).at("method") == "bayes_median");
    const auto pooled = metrics.at(0).at("pooled");
    CHECK(pooled.at("rmse") == 0.0);
    if (pooled.at("mape").is_number()) CHECK(pooled.at("mape") == 0.0);

    fs::create_directories(dir.path / "empty");
    const auto none = run_cli("batch-eval --corpus " + (dir / "empty") + " --truth " + (dir / "echo.csv"));
    CHECK(none.status == 4);
    CHECK(error_class(none) == "data");

    spit(dir / "short.csv", "experiment_id,week,actual_new\nexp-1,2,5\n");
    const auto mismatch = run_cli("batch-eval --corpus " + (dir / "corpus") + " --truth " + (dir / "short.csv"));
    CHECK(mismatch.status == 4);
    const std::string msg = json::parse(mismatch.text).at("error").at("message");
    CHECK(msg.find("exp-2") != std::string::npos);
    CHECK(msg.find("exp-3") != std::string::npos);
}

TEST_CASE("simulate output feeds forecast") {
    TempDir dir("round");
    const auto sim = run_cli("simulate --seed 5 --n 20000 --format csv --out " + (dir / "fx.csv"));
    REQUIRE(sim.status == 0);
    CHECK(sim.text == slurp(dir.path / "fx.csv"));
    const auto fc = run_cli("forecast --input " + (dir / "fx.csv") + " --draws 20 --format csv");
    CHECK(fc.status == 0);
    CHECK(fc.text.rfind("series,index,first_day,last_day,point_estimate", 0) == 0);
}

TEST_CASE("out writes the report to a file") {
    TempDir dir("out");
    spit(dir / "in.csv", kCounts);
    const auto o = run_cli("forecast --input " + (dir / "in.csv") + " --draws 20 --out " + (dir / "r.json"));
    CHECK(o.status == 0);
    CHECK(o.text.empty());
    CHECK(json::parse(slurp(dir.path / "r.json")).at("command") == "forecast");
}

TEST_CASE("argument helpers") {
    using namespace accrual;
    CHECK(parse_lambda_grid("1:3") == std::vector<double>{1, 2, 3});
    CHECK(parse_lambda_grid("2:3:0.5") == std::vector<double>{2, 2.5, 3});
    CHECK(parse_lambda_grid("4,8,16") == std::vector<double>{4, 8, 16});
    CHECK_THROWS_AS(parse_lambda_grid(""), RequestError);
    CHECK_THROWS_AS(parse_lambda_grid("3,2"), RequestError);
    CHECK_THROWS_AS(parse_lambda_grid("0:2"), RequestError);
    CHECK(parse_horizons("7,14") == std::vector<std::int64_t>{7, 14});
    CHECK_THROWS_AS(parse_horizons("7,x"), RequestError);
    const auto r = parse_value_range("1:3");
    CHECK(r.lo == 1.0);
    CHECK(r.hi == 3.0);
    CHECK_THROWS_AS(parse_value_range("3:1"), RequestError);
    CHECK(plateau_relative_change({100, 50, 40, 44}) == doctest::Approx(0.1));
    CHECK(exit_code_for(ErrorKind::parse) == 3);
}
