// Apache License, Version 2.0, refer to LICENSE.txt

#include "accrual/app.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <utility>

#include <nlohmann/json.hpp>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "accrual/baselines.hpp"
#include "accrual/error.hpp"
#include "accrual/io.hpp"
#include "accrual/model.hpp"
#include "accrual/parallel.hpp"
#include "accrual/synthetic.hpp"

namespace accrual {

namespace {

using Json = nlohmann::ordered_json;

constexpr std::array<const char*, kQuantileLevels.size()> kQuantileKeys{"0.025", "0.25", "0.5", "0.75",
                                                                         "0.975"};

// Diagnostics go to stderr; ACCRUAL_LOG picks the level (off by default).
spdlog::logger& log() {
    static const auto logger = [] {
        auto l = spdlog::stderr_logger_mt("accrual");
        l->set_pattern("[%l] %v");
        const char* env = std::getenv("ACCRUAL_LOG");
        const std::string level = env ? env : "off";
        if (level == "debug")
            l->set_level(spdlog::level::debug);
        else if (level == "info")
            l->set_level(spdlog::level::info);
        else {
            l->set_level(spdlog::level::off);
            if (level != "off") {
                l->set_level(spdlog::level::warn);
                l->warn("ACCRUAL_LOG='{}' not recognized (off|info|debug); logging disabled", level);
                l->set_level(spdlog::level::off);
            }
        }
        return l;
    }();
    return *logger;
}

std::string format_number(double v) {
    if (!std::isfinite(v)) return "";
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

Json summary_json(const SampleSummary& s) {
    Json q = Json::object();
    for (std::size_t i = 0; i < kQuantileKeys.size(); ++i) q[kQuantileKeys[i]] = s.quantiles[i];
    return {{"point_estimate", s.point_estimate}, {"mean", s.mean}, {"quantiles", q}};
}

std::string summary_csv_fields(const SampleSummary& s) {
    std::string out = format_number(s.point_estimate) + "," + format_number(s.mean);
    for (double q : s.quantiles) out += "," + format_number(q);
    return out;
}

std::string summary_csv_header() {
    std::string out = "point_estimate,mean";
    for (const char* k : kQuantileKeys) out += std::string(",q") + k;
    return out;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

DailyCounts first_period(const DailyCounts& data, int d, const std::string& source) {
    if (d < 1) throw RequestError("--d must be >= 1");
    if (data.days() < d)
        throw DataError(source + " has " + std::to_string(data.days()) + " days, fewer than --d " +
                        std::to_string(d));
    if (data.days() == d) return data;
    return DailyCounts({data.counts().begin(), data.counts().begin() + d});
}

DailyCounts load_input(const RunConfig& cfg) {
    if (cfg.input.empty()) throw RequestError("--input is required");
    return first_period(parse_daily_counts(read_text_file(cfg.input)), cfg.d, cfg.input);
}

PopulationSpec population_of(const RunConfig& cfg) {
    if (cfg.lambda && cfg.n0) throw RequestError("--lambda and --n0 are mutually exclusive");
    if (cfg.n0) {
        if (*cfg.n0 < 0) throw RequestError("--n0 must be >= 0");
        return PopulationSpec::known(*cfg.n0);
    }
    const double lambda = cfg.lambda.value_or(10.0);
    if (!(lambda > 0.0 && std::isfinite(lambda))) throw RequestError("--lambda must be > 0");
    return PopulationSpec::plug_in(lambda);
}

SamplerConfig sampler_of(const RunConfig& cfg) {
    SamplerConfig s;
    s.n_draws = cfg.n_draws;
    s.seed = cfg.seed;
    s.workers = cfg.workers;
    s.validate();
    return s;
}

Json population_json(const PopulationSpec& p) {
    if (const auto* k = std::get_if<KnownN0>(&p.value())) return {{"kind", "known_n0"}, {"n0", k->n0}};
    return {{"kind", "lambda"}, {"lambda", std::get<PlugInMultiplier>(p.value()).lambda}};
}

Json posterior_json(const PosteriorDraws& post) {
    const double n = static_cast<double>(post.draws.size());
    double ma = 0.0, mb = 0.0;
    for (const auto& hp : post.draws) {
        ma += hp.alpha();
        mb += hp.beta();
    }
    ma /= n;
    mb /= n;
    double va = 0.0, vb = 0.0;
    for (const auto& hp : post.draws) {
        va += (hp.alpha() - ma) * (hp.alpha() - ma);
        vb += (hp.beta() - mb) * (hp.beta() - mb);
    }
    const double denom = n > 1 ? n - 1 : 1;
    const auto pop = beta_summary(HyperParams(ma, mb));
    return {{"draws", post.draws.size()},
            {"acceptance_rate", post.acceptance_rate},
            {"mode", {{"alpha", post.mode.alpha()}, {"beta", post.mode.beta()}}},
            {"alpha", {{"mean", ma}, {"sd", std::sqrt(va / denom)}}},
            {"beta", {{"mean", mb}, {"sd", std::sqrt(vb / denom)}}},
            {"participation_probability", {{"mean", pop.mean}, {"sd", pop.sd}}}};
}

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

double draw_in_range(const ValueRange& r, Rng& rng) {
    if (r.lo == r.hi) return r.lo;
    const double u = uniform_open(rng);
    return std::exp(std::log(r.lo) + u * (std::log(r.hi) - std::log(r.lo)));
}

void check_range(const ValueRange& r, const char* flag) {
    if (!(r.lo > 0.0 && r.hi >= r.lo && std::isfinite(r.hi)))
        throw RequestError(std::string(flag) + " must be positive with lo <= hi");
}

// Truth rows for the whole weeks of realized future accrual.
std::vector<TruthRow> truth_rows(const std::string& id, std::span<const std::int64_t> future) {
    std::vector<TruthRow> rows;
    const auto weeks = weekly_totals(future);
    for (std::size_t w = 0; w < weeks.size(); ++w) {
        if ((w + 1) * kDaysPerWeek > future.size()) break;
        rows.push_back({id, static_cast<int>(w) + 2, weeks[w]});
    }
    return rows;
}

}  // namespace

int exit_code_for(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::request: return 2;
        case ErrorKind::parse: return 3;
        case ErrorKind::data: return 4;
        case ErrorKind::model: return 5;
        case ErrorKind::numerical: return 6;
        case ErrorKind::domain: return 7;
    }
    return 1;
}

std::string error_report(std::string_view error_class, std::string_view message) {
    Json j = {{"schema_version", kSchemaVersion},
              {"error", {{"class", std::string(error_class)}, {"message", std::string(message)}}}};
    return dump(j);
}

std::vector<double> parse_lambda_grid(std::string_view text) {
    auto number = [&](std::string_view s) {
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size())
            throw RequestError("bad number '" + std::string(s) + "' in lambda grid");
        return v;
    };
    std::vector<double> grid;
    if (text.find(':') != std::string_view::npos) {
        std::vector<double> parts;
        while (true) {
            const auto colon = text.find(':');
            parts.push_back(number(text.substr(0, colon)));
            if (colon == std::string_view::npos) break;
            text.remove_prefix(colon + 1);
        }
        if (parts.size() > 3) throw RequestError("lambda grid range is a:b or a:b:step");
        const double step = parts.size() == 3 ? parts[2] : 1.0;
        if (!(step > 0.0)) throw RequestError("lambda grid step must be > 0");
        const auto n = static_cast<std::int64_t>(std::floor((parts[1] - parts[0]) / step + 1e-9));
        if (n < 0) throw RequestError("lambda grid range is empty");
        if (n > 100000) throw RequestError("lambda grid too large");
        for (std::int64_t i = 0; i <= n; ++i) grid.push_back(parts[0] + static_cast<double>(i) * step);
    } else {
        while (!text.empty()) {
            const auto comma = text.find(',');
            grid.push_back(number(text.substr(0, comma)));
            if (comma == std::string_view::npos) break;
            text.remove_prefix(comma + 1);
        }
    }
    if (grid.empty()) throw RequestError("lambda grid is empty");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] > 0.0 && std::isfinite(grid[i]))) throw RequestError("lambda grid values must be > 0");
        if (i > 0 && grid[i] <= grid[i - 1]) throw RequestError("lambda grid must be strictly increasing");
    }
    return grid;
}

std::vector<std::int64_t> parse_horizons(std::string_view text) {
    std::vector<std::int64_t> out;
    while (true) {
        const auto comma = text.find(',');
        const auto s = text.substr(0, comma);
        std::int64_t v = 0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size())
            throw RequestError("bad horizon '" + std::string(s) + "'");
        out.push_back(v);
        if (comma == std::string_view::npos) break;
        text.remove_prefix(comma + 1);
    }
    validate_horizons(out);
    return out;
}

ValueRange parse_value_range(std::string_view text) {
    auto number = [&](std::string_view s) {
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size())
            throw RequestError("bad number '" + std::string(s) + "'");
        return v;
    };
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) {
        const double v = number(text);
        return {v, v};
    }
    const ValueRange r{number(text.substr(0, colon)), number(text.substr(colon + 1))};
    if (r.hi < r.lo) throw RequestError("range '" + std::string(text) + "' has lo > hi");
    return r;
}

double plateau_relative_change(const std::vector<double>& medians) {
    if (medians.empty()) throw RequestError("no medians");
    const std::size_t start = medians.size() / 2;
    const auto [lo, hi] = std::minmax_element(medians.begin() + static_cast<std::ptrdiff_t>(start), medians.end());
    if (*lo == 0.0) return *hi == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return (*hi - *lo) / *lo;
}

std::string run_forecast(const RunConfig& cfg) {
    const auto data = load_input(cfg);
    validate_horizons(cfg.horizons);
    ForecastRequest req{data, population_of(cfg), cfg.horizons, sampler_of(cfg)};
    log().info("forecast: d={} participants={} draws={} seed={}", data.days(), data.total_participants(),
               cfg.n_draws, cfg.seed);
    const auto fc = forecast(req);
    log().info("forecast: resolved n0={} acceptance={:.3f}", fc.resolved_n0, fc.posterior.acceptance_rate);

    if (cfg.format == OutputFormat::csv) {
        std::string out;
        if (cfg.emit_draws) {
            out = "draw,alpha,beta";
            for (const auto& w : fc.weeks) out += ",week_" + std::to_string(w.week);
            out += "\n";
            for (std::size_t k = 0; k < fc.weekly_curve_samples.size(); ++k) {
                out += std::to_string(k) + "," + format_number(fc.posterior.draws[k].alpha()) + "," +
                       format_number(fc.posterior.draws[k].beta());
                for (auto v : fc.weekly_curve_samples[k]) out += "," + std::to_string(v);
                out += "\n";
            }
            return out;
        }
        out = "series,index,first_day,last_day," + summary_csv_header() + "\n";
        for (const auto& h : fc.horizons)
            out += "horizon," + std::to_string(h.horizon_days) + ",1," + std::to_string(h.horizon_days) + "," +
                   summary_csv_fields(h.summary) + "\n";
        for (const auto& w : fc.weeks)
            out += "week," + std::to_string(w.week) + "," + std::to_string(w.first_day) + "," +
                   std::to_string(w.last_day) + "," + summary_csv_fields(w.summary) + "\n";
        return out;
    }

    Json j;
    j["schema_version"] = kSchemaVersion;
    j["command"] = "forecast";
    j["input"] = cfg.input;
    j["d"] = data.days();
    j["participants"] = data.total_participants();
    j["seed"] = cfg.seed;
    j["population"] = population_json(req.population);
    j["resolved_n0"] = fc.resolved_n0;
    j["posterior"] = posterior_json(fc.posterior);
    Json horizons = Json::array();
    for (const auto& h : fc.horizons) {
        Json e = {{"horizon_days", h.horizon_days}};
        e.update(summary_json(h.summary));
        horizons.push_back(e);
    }
    j["horizons"] = horizons;
    Json weeks = Json::array();
    for (const auto& w : fc.weeks) {
        Json e = {{"week", w.week}, {"first_day", w.first_day}, {"last_day", w.last_day}};
        e.update(summary_json(w.summary));
        weeks.push_back(e);
    }
    j["weeks"] = weeks;
    if (cfg.emit_draws) {
        Json draws = Json::array();
        for (std::size_t k = 0; k < fc.weekly_curve_samples.size(); ++k)
            draws.push_back({{"alpha", fc.posterior.draws[k].alpha()},
                             {"beta", fc.posterior.draws[k].beta()},
                             {"weekly_new", fc.weekly_curve_samples[k]}});
        j["draws"] = draws;
    }
    return dump(j);
}

std::string run_lambda_sweep(const RunConfig& cfg) {
    if (cfg.n0) throw RequestError("sweep-lambda takes --lambda-grid, not --n0");
    if (cfg.lambda_grid.empty()) throw RequestError("--lambda-grid is empty");
    for (std::size_t i = 0; i < cfg.lambda_grid.size(); ++i) {
        if (!(cfg.lambda_grid[i] > 0.0)) throw RequestError("lambda grid values must be > 0");
        if (i > 0 && cfg.lambda_grid[i] <= cfg.lambda_grid[i - 1])
            throw RequestError("lambda grid must be strictly increasing");
    }
    if (cfg.sweep_horizon < 1) throw RequestError("--sweep-horizon must be >= 1");
    const auto data = load_input(cfg);
    const auto sampler = sampler_of(cfg);
    const std::vector<std::int64_t> horizon{cfg.sweep_horizon};

    std::vector<std::pair<std::int64_t, SampleSummary>> results;
    std::vector<double> medians;
    for (const double lambda : cfg.lambda_grid) {
        log().info("sweep: lambda={}", lambda);
        const auto fc = forecast({data, PopulationSpec::plug_in(lambda), horizon, sampler});
        results.emplace_back(fc.resolved_n0, fc.horizons.front().summary);
        medians.push_back(fc.horizons.front().summary.point_estimate);
    }
    const double plateau = plateau_relative_change(medians);
    const std::size_t start = medians.size() / 2;

    if (cfg.format == OutputFormat::csv) {
        std::string out = "lambda,resolved_n0," + summary_csv_header() + "\n";
        for (std::size_t i = 0; i < results.size(); ++i)
            out += format_number(cfg.lambda_grid[i]) + "," + std::to_string(results[i].first) + "," +
                   summary_csv_fields(results[i].second) + "\n";
        return out;
    }
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["command"] = "sweep-lambda";
    j["input"] = cfg.input;
    j["d"] = data.days();
    j["participants"] = data.total_participants();
    j["seed"] = cfg.seed;
    j["draws"] = cfg.n_draws;
    j["horizon_days"] = cfg.sweep_horizon;
    Json entries = Json::array();
    for (std::size_t i = 0; i < results.size(); ++i) {
        Json e = {{"lambda", cfg.lambda_grid[i]}, {"resolved_n0", results[i].first}};
        e.update(summary_json(results[i].second));
        entries.push_back(e);
    }
    j["entries"] = entries;
    j["plateau"] = {{"lambda_from", cfg.lambda_grid[start]},
                    {"lambda_to", cfg.lambda_grid.back()},
                    {"max_relative_change", plateau}};
    return dump(j);
}

std::string run_batch_eval(const RunConfig& cfg) {
    if (cfg.n0) throw RequestError("batch-eval estimates n0 per experiment; use --lambda");
    if (cfg.corpus.empty() || cfg.truth.empty()) throw RequestError("--corpus and --truth are required");
    const auto population = population_of(cfg);
    const auto truth = parse_truth_csv(read_text_file(cfg.truth));

    namespace fs = std::filesystem;
    if (!fs::is_directory(cfg.corpus)) throw DataError("corpus " + cfg.corpus + " is not a directory");
    std::map<std::string, fs::path> files;
    for (const auto& entry : fs::directory_iterator(cfg.corpus)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".csv") continue;
        // simulate writes truth.csv next to the experiments.
        std::error_code ec;
        if (entry.path().filename() == "truth.csv" || fs::equivalent(entry.path(), cfg.truth, ec)) continue;
        files.emplace(entry.path().stem().string(), entry.path());
    }
    if (files.empty()) throw DataError("corpus " + cfg.corpus + " holds no .csv experiments");

    std::map<std::string, std::vector<TruthRow>> by_id;
    for (const auto& row : truth) by_id[row.experiment_id].push_back(row);
    std::string missing_files, missing_truth;
    for (const auto& [id, rows] : by_id)
        if (!files.contains(id)) missing_files += (missing_files.empty() ? "" : ", ") + id;
    for (const auto& [id, path] : files)
        if (!by_id.contains(id)) missing_truth += (missing_truth.empty() ? "" : ", ") + id;
    if (!missing_files.empty() || !missing_truth.empty()) {
        std::string msg = "truth and corpus IDs differ;";
        if (!missing_files.empty()) msg += " no corpus file for: " + missing_files + ";";
        if (!missing_truth.empty()) msg += " no truth rows for: " + missing_truth + ";";
        throw DataError(msg);
    }

    struct Outcome {
        std::string id;
        std::vector<TruthRow> rows;
        std::vector<double> bayes;
        std::vector<double> log_linear;
        std::string error_class;
        std::string error;
    };
    std::vector<Outcome> outcomes;
    for (auto& [id, rows] : by_id) {
        std::sort(rows.begin(), rows.end(), [](const TruthRow& a, const TruthRow& b) { return a.week < b.week; });
        outcomes.push_back({id, rows, {}, {}, {}, {}});
    }
    SamplerConfig base = sampler_of(cfg);
    base.workers = 1;

    parallel_for(outcomes.size(), cfg.workers, [&](std::size_t i) {
        auto& o = outcomes[i];
        // Corpus files that fail to parse abort the whole run.
        const auto data = first_period(parse_daily_counts(read_text_file(files.at(o.id))), cfg.d,
                                       files.at(o.id).string());
        const std::int64_t horizon = static_cast<std::int64_t>(o.rows.back().week - 1) * kDaysPerWeek;
        SamplerConfig sampler = base;
        sampler.seed = derive_seed(cfg.seed, {kCorpusStream, fnv1a(o.id)});
        const auto fit = fit_log_linear(data);
        try {
            const auto fc = forecast({data, population, {horizon}, sampler});
            for (const auto& row : o.rows) {
                o.bayes.push_back(fc.weeks.at(static_cast<std::size_t>(row.week - 2)).summary.point_estimate);
                o.log_linear.push_back(predict_log_linear(fit, row.week, data.days()));
            }
        } catch (const ModelError& e) {
            o.error_class = to_string(e.kind());
            o.error = e.what();
        } catch (const NumericalError& e) {
            o.error_class = to_string(e.kind());
            o.error = e.what();
        }
    });

    std::map<int, std::vector<PredictionPair>> bayes_pairs, ll_pairs;
    std::vector<PredictionPair> bayes_all, ll_all;
    std::size_t scored = 0;
    Json skipped = Json::array();
    Json predictions = Json::array();
    for (const auto& o : outcomes) {
        if (!o.error.empty()) {
            log().info("batch-eval: skipping {}: {}", o.id, o.error);
            skipped.push_back({{"experiment_id", o.id}, {"class", o.error_class}, {"message", o.error}});
            continue;
        }
        ++scored;
        for (std::size_t r = 0; r < o.rows.size(); ++r) {
            const double actual = static_cast<double>(o.rows[r].actual_new);
            bayes_pairs[o.rows[r].week].push_back({o.bayes[r], actual});
            ll_pairs[o.rows[r].week].push_back({o.log_linear[r], actual});
            bayes_all.push_back({o.bayes[r], actual});
            ll_all.push_back({o.log_linear[r], actual});
            predictions.push_back({{"experiment_id", o.id},
                                   {"week", o.rows[r].week},
                                   {"actual_new", o.rows[r].actual_new},
                                   {"bayes_median", o.bayes[r]},
                                   {"log_linear", o.log_linear[r]}});
        }
    }
    if (scored == 0) throw DataError("no experiment in the corpus could be scored");

    auto metric_json = [](const MetricReport& m) {
        return Json{{"n", m.n}, {"rmse", m.rmse}, {"mape", m.mape}, {"mape_excluded", m.mape_excluded}};
    };
    const std::array<std::pair<const char*, const std::map<int, std::vector<PredictionPair>>*>, 2> methods{
        {{"bayes_median", &bayes_pairs}, {"log_linear", &ll_pairs}}};
    const std::array<const std::vector<PredictionPair>*, 2> pooled{&bayes_all, &ll_all};

    if (cfg.format == OutputFormat::csv) {
        std::string out = "method,week,n,rmse,mape,mape_excluded\n";
        for (std::size_t m = 0; m < methods.size(); ++m) {
            auto row = [&](const std::string& week, const MetricReport& r) {
                out += std::string(methods[m].first) + "," + week + "," + std::to_string(r.n) + "," +
                       format_number(r.rmse) + "," + format_number(r.mape) + "," +
                       std::to_string(r.mape_excluded) + "\n";
            };
            for (const auto& [week, pairs] : *methods[m].second) row(std::to_string(week), score(pairs));
            row("all", score(*pooled[m]));
        }
        return out;
    }

    Json j;
    j["schema_version"] = kSchemaVersion;
    j["command"] = "batch-eval";
    j["corpus"] = cfg.corpus;
    j["truth"] = cfg.truth;
    j["d"] = cfg.d;
    j["population"] = population_json(population);
    j["seed"] = cfg.seed;
    j["draws"] = cfg.n_draws;
    j["experiments"] = outcomes.size();
    j["experiments_scored"] = scored;
    j["skipped"] = skipped;
    Json metrics = Json::array();
    for (std::size_t m = 0; m < methods.size(); ++m) {
        Json weeks = Json::array();
        for (const auto& [week, pairs] : *methods[m].second) {
            Json e = {{"week", week}};
            e.update(metric_json(score(pairs)));
            weeks.push_back(e);
        }
        metrics.push_back({{"method", methods[m].first}, {"weeks", weeks}, {"pooled", metric_json(score(*pooled[m]))}});
    }
    j["metrics"] = metrics;
    j["predictions"] = predictions;
    return dump(j);
}

std::string run_simulate(const RunConfig& cfg) {
    check_range(cfg.alpha, "--alpha");
    check_range(cfg.beta, "--beta");
    if (cfg.population < 1) throw RequestError("--n must be >= 1");
    if (cfg.d < 1) throw RequestError("--d must be >= 1");
    if (cfg.total_days < cfg.d) throw RequestError("--total-days must be >= --d");
    if (cfg.experiments < 0) throw RequestError("--experiments must be >= 0");

    auto simulate_one = [&](std::uint64_t index) {
        Rng rng(derive_seed(cfg.seed, {kCorpusStream, index, 0}));
        const double a = draw_in_range(cfg.alpha, rng);
        const double b = draw_in_range(cfg.beta, rng);
        return std::make_pair(HyperParams(a, b),
                              simulate_beta_geometric(cfg.population, HyperParams(a, b), cfg.d, cfg.total_days,
                                                      derive_seed(cfg.seed, {kCorpusStream, index, 1})));
    };

    if (cfg.experiments == 0) {
        const auto [hp, sim] = simulate_one(0);
        const auto csv = format_daily_counts_csv(sim.first_period.counts());
        if (!cfg.out.empty()) write_text_file(cfg.out, csv);
        if (cfg.format == OutputFormat::csv) return csv;
        Json j;
        j["schema_version"] = kSchemaVersion;
        j["command"] = "simulate";
        j["seed"] = cfg.seed;
        j["alpha"] = hp.alpha();
        j["beta"] = hp.beta();
        j["n"] = cfg.population;
        j["d"] = cfg.d;
        j["total_days"] = cfg.total_days;
        j["n0_true"] = sim.n0_true;
        j["first_period"] = std::vector<std::int64_t>(sim.first_period.counts().begin(), sim.first_period.counts().end());
        j["future_daily"] = sim.future_daily;
        Json weeks = Json::array();
        for (const auto& row : truth_rows("", sim.future_daily))
            weeks.push_back({{"week", row.week}, {"actual_new", row.actual_new}});
        j["future_weeks"] = weeks;
        return dump(j);
    }

    if (cfg.out.empty()) throw RequestError("--experiments needs --out DIR for the corpus");
    if (cfg.total_days - cfg.d < kDaysPerWeek)
        throw RequestError("--total-days must leave at least one whole week after --d");
    std::filesystem::create_directories(cfg.out);
    const int width = static_cast<int>(std::to_string(cfg.experiments).size());
    std::vector<TruthRow> truth;
    std::string csv = "experiment_id,alpha,beta,n0_true,participants\n";
    Json list = Json::array();
    for (int i = 0; i < cfg.experiments; ++i) {
        std::string id = std::to_string(i + 1);
        id = "exp-" + std::string(static_cast<std::size_t>(width) - id.size(), '0') + id;
        const auto [hp, sim] = simulate_one(static_cast<std::uint64_t>(i));
        write_text_file(std::filesystem::path(cfg.out) / (id + ".csv"),
                        format_daily_counts_csv(sim.first_period.counts()));
        for (auto& row : truth_rows(id, sim.future_daily)) truth.push_back(std::move(row));
        csv += id + "," + format_number(hp.alpha()) + "," + format_number(hp.beta()) + "," +
               std::to_string(sim.n0_true) + "," + std::to_string(sim.first_period.total_participants()) + "\n";
        list.push_back({{"experiment_id", id},
                        {"alpha", hp.alpha()},
                        {"beta", hp.beta()},
                        {"n0_true", sim.n0_true},
                        {"participants", sim.first_period.total_participants()}});
    }
    write_text_file(std::filesystem::path(cfg.out) / "truth.csv", format_truth_csv(truth));
    if (cfg.format == OutputFormat::csv) return csv;
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["command"] = "simulate";
    j["seed"] = cfg.seed;
    j["n"] = cfg.population;
    j["d"] = cfg.d;
    j["total_days"] = cfg.total_days;
    j["corpus"] = cfg.out;
    j["truth"] = (std::filesystem::path(cfg.out) / "truth.csv").string();
    j["experiments"] = list;
    return dump(j);
}

RunResult run(const RunConfig& cfg) {
    try {
        std::string report;
        switch (cfg.command) {
            case Command::forecast: report = run_forecast(cfg); break;
            case Command::sweep_lambda: report = run_lambda_sweep(cfg); break;
            case Command::batch_eval: report = run_batch_eval(cfg); break;
            case Command::simulate: return {0, run_simulate(cfg)};
        }
        if (!cfg.out.empty()) {
            write_text_file(cfg.out, report);
            return {0, ""};
        }
        return {0, report};
    } catch (const Error& e) {
        log().error("{}: {}", to_string(e.kind()), e.what());
        return {exit_code_for(e.kind()), error_report(to_string(e.kind()), e.what())};
    } catch (const std::exception& e) {
        log().error("internal: {}", e.what());
        return {1, error_report("internal", e.what())};
    }
}

}  // namespace accrual
