#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "arriva/engine.hpp"
#include "arriva/evaluate.hpp"
#include "arriva/simulate.hpp"

using namespace arriva;

namespace {

ArrivalSeries quick_series(std::size_t length, std::uint64_t seed) {
    DgpSpec dgp;
    dgp.length = length;
    dgp.ar = {{1, 0.4}};
    dgp.sigma = 0.08;
    return simulate_dgp(dgp, seed);
}

RunConfig quick_config(std::size_t window, int horizons,
                       std::vector<std::string> producers) {
    RunConfig cfg;
    cfg.window = window;
    cfg.horizons = horizons;
    cfg.producers = std::move(producers);
    cfg.fit_starts = 1;
    cfg.warm_starts = 1;
    cfg.seed = 7;
    return cfg;
}

}  // namespace

TEST_CASE("run geometry: origin and horizon counts") {
    const ArrivalSeries s = quick_series(400, 1);
    const RunResult r = run(s, quick_config(371, 28, {"M0"}));
    CHECK(r.store.n_origins() == 29);
    const std::size_t n_targets = s.size() - 1 - (371 - 1);
    CHECK(r.store.evaluable_origins({"M0"}, {1}, n_targets).size() == 29);
    CHECK(r.store.evaluable_origins({"M0"}, {28}, n_targets).size() == 2);
}

TEST_CASE("published run geometry: 749 observations, window 371") {
    const ArrivalSeries s = quick_series(749, 2);
    const RunResult r = run(s, quick_config(371, 28, {"M0"}));
    CHECK(r.store.n_origins() == 378);
    const std::size_t n_targets = s.size() - 1 - (371 - 1);
    CHECK(r.store.evaluable_origins({"M0"}, {1}, n_targets).size() == 378);
    CHECK(r.store.evaluable_origins({"M0"}, {28}, n_targets).size() == 351);
}

TEST_CASE("rolling and recursive agree at the first origin") {
    const ArrivalSeries s = quick_series(160, 3);
    RunConfig rec = quick_config(140, 7, {"M0", "M1", "M6"});
    RunConfig rol = rec;
    rol.scheme = RunConfig::Scheme::rolling;
    const RunResult a = run(s, rec), b = run(s, rol);
    for (const auto& id : a.store.producers())
        for (int h = 1; h <= 7; ++h) {
            const StoredForecast& fa = a.store.at(id, 0, h);
            const StoredForecast& fb = b.store.at(id, 0, h);
            REQUIRE(fa.present == fb.present);
            if (fa.present) CHECK(fa.point == doctest::Approx(fb.point).epsilon(1e-12));
        }
}

TEST_CASE("no look-ahead: future data never moves an earlier forecast") {
    const ArrivalSeries s = quick_series(170, 4);
    // Mutate everything after origin index 10 (series index 149).
    std::vector<long long> tampered(s.counts().begin(), s.counts().end());
    for (std::size_t i = 150; i < tampered.size(); ++i) tampered[i] += 400 + (i % 13);
    const ArrivalSeries s2(s.start_date(), tampered, {});

    const RunConfig cfg = quick_config(140, 7, {"M0", "M1", "M8", "M13"});
    const RunResult a = run(s, cfg), b = run(s2, cfg);
    for (const auto& id : a.store.producers()) {
        for (std::size_t oi = 0; oi <= 10; ++oi) {
            for (int h = 1; h <= 7; ++h) {
                const StoredForecast& fa = a.store.at(id, oi, h);
                const StoredForecast& fb = b.store.at(id, oi, h);
                REQUIRE(fa.present == fb.present);
                if (fa.present) CHECK(fa.point == fb.point);
            }
        }
    }
}

TEST_CASE("store rejects duplicate keys and unknown producers") {
    ForecastStore store(Date::from_ymd(2018, 6, 1), 5, 3, "recursive", 100);
    store.add_producer("M0");
    StoredForecast f;
    f.point = 1.0;
    store.insert("M0", 0, 1, f);
    CHECK_THROWS_AS(store.insert("M0", 0, 1, f), std::invalid_argument);
    CHECK_THROWS_AS(store.insert("M7", 0, 1, f), std::out_of_range);
    CHECK_THROWS_AS(store.add_producer("M0"), std::invalid_argument);
    CHECK(store.at("M0", 1, 1).present == false);
}

TEST_CASE("producer list order does not change the stored forecasts") {
    const ArrivalSeries s = quick_series(160, 5);
    const RunResult a = run(s, quick_config(140, 5, {"M1", "M2", "M3", "avg.G2"}));
    const RunResult b = run(s, quick_config(140, 5, {"avg.G2", "M3", "M2", "M1"}));
    for (const auto& id : a.store.producers())
        for (std::size_t oi = 0; oi < a.store.n_origins(); ++oi)
            for (int h = 1; h <= 5; ++h) {
                const StoredForecast& fa = a.store.at(id, oi, h);
                const StoredForecast& fb = b.store.at(id, oi, h);
                REQUIRE(fa.present == fb.present);
                if (fa.present) CHECK(fa.point == fb.point);
            }
}

TEST_CASE("parallel and serial runs are bit-identical") {
    const ArrivalSeries s = quick_series(170, 6);
    RunConfig serial = quick_config(140, 7, {"M0", "M1", "M6", "M8", "M13", "avg.G5", "M9", "M10"});
    RunConfig parallel = serial;
    parallel.jobs = 2;
    const RunResult a = run(s, serial), b = run(s, parallel);
    for (const auto& id : a.store.producers())
        for (std::size_t oi = 0; oi < a.store.n_origins(); ++oi)
            for (int h = 1; h <= 7; ++h) {
                const StoredForecast& fa = a.store.at(id, oi, h);
                const StoredForecast& fb = b.store.at(id, oi, h);
                REQUIRE(fa.present == fb.present);
                if (!fa.present) continue;
                CHECK(fa.point == fb.point);  // exact, not approximate
                CHECK(fa.log_point.has_value() == fb.log_point.has_value());
                if (fa.log_point) CHECK(*fa.log_point == *fb.log_point);
            }
}

TEST_CASE("refit throttle keeps every origin populated") {
    const ArrivalSeries s = quick_series(200, 7);
    RunConfig cfg = quick_config(140, 7, {"M1", "M8", "M11", "M13"});
    cfg.refit_every = 7;
    const RunResult r = run(s, cfg);
    const std::size_t n_targets = s.size() - 1 - (140 - 1);
    for (const auto& id : r.store.producers()) {
        const auto evaluable = r.store.evaluable_origins({id}, {1}, n_targets);
        CHECK(evaluable.size() == r.store.n_origins());
    }
}

TEST_CASE("combined producers equal the member combinations cell by cell") {
    const ArrivalSeries s = quick_series(170, 8);
    const RunResult r =
        run(s, quick_config(140, 5, {"M8", "M9", "M10", "avg.G5", "med.G5", "min.G5",
                                     "max.G5", "trim.G5", "sic.G5"}));
    for (std::size_t oi = 0; oi < r.store.n_origins(); ++oi) {
        for (int h = 1; h <= 5; ++h) {
            const StoredForecast& avg = r.store.at("avg.G5", oi, h);
            if (!avg.present) continue;
            std::vector<double> members;
            for (const auto& m : {"M8", "M9", "M10"})
                members.push_back(r.store.at(m, oi, h).point);
            CHECK(avg.point ==
                  doctest::Approx(combine_simple(members, CombineMethod::average).value)
                      .epsilon(1e-12));
            CHECK(r.store.at("min.G5", oi, h).point ==
                  doctest::Approx(*std::min_element(members.begin(), members.end())));
            CHECK(r.store.at("max.G5", oi, h).point ==
                  doctest::Approx(*std::max_element(members.begin(), members.end())));
            const double lo = *std::min_element(members.begin(), members.end());
            const double hi = *std::max_element(members.begin(), members.end());
            const double sic = r.store.at("sic.G5", oi, h).point;
            CHECK(sic >= lo - 1e-9);
            CHECK(sic <= hi + 1e-9);
        }
    }
}

TEST_CASE("closing-day targets are forced to zero for every producer") {
    DgpSpec dgp;
    dgp.length = 170;
    dgp.sigma = 0.08;
    dgp.closing_days = {dgp.start + 150, dgp.start + 157};
    const ArrivalSeries raw = simulate_dgp(dgp, 9);
    CHECK_THROWS_AS(run(raw, quick_config(140, 7, {"M0"})), std::invalid_argument);

    std::vector<DatedCount> dated;
    for (std::size_t i = 0; i < raw.size(); ++i) dated.push_back({raw.date(i), raw.count(i)});
    const ArrivalSeries s = validate_and_impute(dated, dgp.closing_days);
    const RunResult r = run(s, quick_config(140, 7, {"M0", "M1", "M8", "avg.G5", "M9", "M10"}));
    for (const auto& id : r.store.producers()) {
        for (std::size_t oi = 0; oi < r.store.n_origins(); ++oi) {
            for (int h = 1; h <= 7; ++h) {
                const StoredForecast& f = r.store.at(id, oi, h);
                if (!f.present) continue;
                const Date target = r.store.origin_date(oi) + h;
                if (s.is_closing(target))
                    CHECK(f.point == 0.0);
                else
                    CHECK(f.point > 0.0);
            }
        }
    }
}

TEST_CASE("evaluation: a perfect producer tops every table") {
    const ArrivalSeries s = quick_series(240, 10);
    const std::size_t window = 170;
    const std::size_t n_origins = s.size() - window + 1 - 1;
    ForecastStore store(s.date(window - 1), n_origins, 7, "recursive", window);
    store.add_producer("M0");
    store.add_producer("M1");  // injected perfect forecasts
    Rng rng(11);
    for (std::size_t oi = 0; oi < n_origins; ++oi) {
        for (int h = 1; h <= 7; ++h) {
            const std::size_t target = window - 1 + oi + static_cast<std::size_t>(h);
            if (target >= s.size()) break;
            const double actual = static_cast<double>(s.count(target));
            StoredForecast noisy;
            noisy.point = std::max(1.0, actual * (1.0 + 0.2 * rng.normal()));
            noisy.log_point = std::log(noisy.point);
            noisy.variance = 0.04;
            store.insert("M0", oi, h, std::move(noisy));
            StoredForecast perfect;
            perfect.point = actual;
            perfect.log_point = std::log(actual);
            perfect.variance = 0.0;
            store.insert("M1", oi, h, std::move(perfect));
        }
    }
    EvalConfig cfg;
    cfg.bootstrap.replications = 199;
    cfg.benchmark = "M1";
    cfg.seed = 3;
    cfg.loss_grid = EvalConfig::standard_grid(7);
    const EvalReport report = evaluate(s, store, cfg);

    for (const auto& table : report.rankings) {
        CHECK(table.rows[0].producer == "M1");
        CHECK(table.by_producer("M1").rank == 1);
    }
    bool saw_perfect_econ = false;
    for (const auto& row : report.econ) {
        if (row.producer != "M1") continue;
        saw_perfect_econ = true;
        const double pi_star = static_cast<double>(row.days) * (43.0 + 10.0);
        CHECK(row.payoff == doctest::Approx(pi_star).epsilon(1e-12));
        CHECK(row.value == doctest::Approx(pi_star).epsilon(1e-9));
        CHECK(row.ce == doctest::Approx(pi_star).epsilon(1e-9));
        CHECK(row.delta_ce == doctest::Approx(0.0));  // benchmark is itself
        CHECK(row.delta_value == doctest::Approx(0.0));
    }
    CHECK(saw_perfect_econ);
    bool saw_density = false;
    for (const auto& row : report.density) {
        if (row.producer != "M1") continue;
        saw_density = true;
        CHECK(row.avg_rps == doctest::Approx(0.0));  // degenerate density at the actual
    }
    CHECK(saw_density);

    // Determinism: a second evaluation is identical.
    const EvalReport again = evaluate(s, store, cfg);
    REQUIRE(again.rankings.size() == report.rankings.size());
    for (std::size_t i = 0; i < report.rankings.size(); ++i)
        for (std::size_t j = 0; j < report.rankings[i].rows.size(); ++j)
            CHECK(report.rankings[i].rows[j].statistic == again.rankings[i].rows[j].statistic);
    REQUIRE(again.tests.size() == report.tests.size());
    for (std::size_t i = 0; i < report.tests.size(); ++i)
        CHECK(report.tests[i].p_value == again.tests[i].p_value);
}

TEST_CASE("run config validation") {
    const ArrivalSeries s = quick_series(100, 12);
    RunConfig cfg = quick_config(100, 7, {"M0"});
    CHECK_THROWS_AS(run(s, cfg), std::invalid_argument);  // window == length
    cfg.window = 10;
    CHECK_THROWS_AS(cfg.validate(s.size()), std::invalid_argument);  // below two weeks
    CHECK_THROWS_AS(ProducerId::parse("avg.G9"), std::invalid_argument);
    CHECK_THROWS_AS(ProducerId::parse("sic.G1"), std::invalid_argument);  // ABMA excludes G1
    CHECK_THROWS_AS(ProducerId::parse("M99"), std::invalid_argument);
    CHECK_NOTHROW(ProducerId::parse("aic.G4"));
}

TEST_CASE("auto-selected specifications flow through the run") {
    DgpSpec dgp;
    dgp.length = 420;
    dgp.ar = {{1, 0.6}};
    dgp.sigma = 0.1;
    const ArrivalSeries s = simulate_dgp(dgp, 77);
    RunConfig cfg = quick_config(371, 7, {"M1"});
    cfg.auto_select = true;
    const RunResult r = run(s, cfg);
    const auto& lags = r.specs.at("M1").ar_lags;
    CHECK(std::find(lags.begin(), lags.end(), 1) != lags.end());
    const std::size_t n_targets = s.size() - 1 - (371 - 1);
    CHECK(r.store.evaluable_origins({"M1"}, {1}, n_targets).size() == r.store.n_origins());
}

TEST_CASE("closing-day targets contribute zero error to every producer") {
    DgpSpec dgp;
    dgp.length = 200;
    dgp.sigma = 0.08;
    dgp.closing_days = {dgp.start + 170, dgp.start + 184};
    const ArrivalSeries raw = simulate_dgp(dgp, 31);
    std::vector<DatedCount> dated;
    for (std::size_t i = 0; i < raw.size(); ++i) dated.push_back({raw.date(i), raw.count(i)});
    const ArrivalSeries s = validate_and_impute(dated, dgp.closing_days);

    const RunResult r = run(s, quick_config(140, 7, {"M0", "M1"}));
    EvalConfig ec;
    ec.run_tests = false;
    ec.run_density = false;
    LossConfig lc;  // h = 1, symmetric
    ec.loss_grid = {lc};
    const EvalReport rep = evaluate(s, r.store, ec);

    // Manual reconstruction: the closing-day targets must enter with u = 0.
    const std::int32_t off = r.store.first_origin() - s.start_date();
    double total = 0.0;
    std::size_t n = 0;
    const auto origins = r.store.evaluable_origins(
        r.store.producers(), {1}, s.size() - 1 - static_cast<std::size_t>(off));
    for (std::size_t oi : origins) {
        const std::size_t target = static_cast<std::size_t>(off) + oi + 1;
        const double actual = s.is_closing(target) ? 0.0 : static_cast<double>(s.count(target));
        const double u = actual - r.store.at("M0", oi, 1).point;
        if (s.is_closing(target)) CHECK(u == 0.0);
        total += u * u;
        ++n;
    }
    CHECK(rep.rankings[0].by_producer("M0").statistic ==
          doctest::Approx(std::sqrt(total / static_cast<double>(n))).epsilon(1e-12));

    // Economics: the two closing targets are excluded from the day count.
    bool checked = false;
    for (const auto& row : rep.econ) {
        CHECK(row.days == origins.size() - 2);
        checked = true;
    }
    CHECK(checked);
}

TEST_CASE("batched spa inside evaluate matches the standalone test") {
    const ArrivalSeries s = quick_series(220, 13);
    RunConfig cfg = quick_config(180, 7, {"M0", "M1", "M8"});
    const RunResult r = run(s, cfg);
    EvalConfig ec;
    ec.bootstrap.replications = 299;
    ec.seed = 99;
    ec.run_econ = false;
    ec.run_density = false;
    LossConfig lc;
    ec.loss_grid = {lc};
    const EvalReport rep = evaluate(s, r.store, ec);

    // Rebuild the loss series exactly as evaluate does, then call the
    // standalone op with the same derived seed.
    const auto a = eval_detail::align(s, r.store, r.store.producers(), lc.horizons);
    const auto losses = eval_detail::loss_series(s, r.store, r.store.producers(), lc, a);
    BootstrapConfig bcfg = ec.bootstrap;
    bcfg.seed = derive_seed(ec.seed, "tests:" + lc.tag());
    for (std::size_t b0 = 0; b0 < losses.size(); ++b0) {
        std::vector<std::vector<double>> alts;
        for (std::size_t j = 0; j < losses.size(); ++j)
            if (j != b0) alts.push_back(losses[j]);
        const TestResult standalone = spa_test(losses[b0], alts, bcfg);
        bool found = false;
        for (const auto& row : rep.tests) {
            if (row.benchmark != r.store.producers()[b0] || row.test.rfind("spa[", 0) != 0)
                continue;
            found = true;
            CHECK(row.p_value == doctest::Approx(standalone.p_value).epsilon(1e-12));
            CHECK(row.statistic == doctest::Approx(standalone.statistic).epsilon(1e-9));
        }
        CHECK(found);
    }
}
