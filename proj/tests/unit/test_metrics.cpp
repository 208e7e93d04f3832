#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <numeric>
#include <thread>

#include "support.hpp"
#include "wastebench/errors.hpp"
#include "wastebench/metrics.hpp"

using namespace wastebench;

namespace {

ConfusionMatrix from_counts(std::vector<std::vector<long>> c) {
    ConfusionMatrix m;
    m.counts = std::move(c);
    return m;
}

std::pair<std::vector<int>, std::vector<int>> random_pairs(std::size_t n, int classes, Rng& rng) {
    std::vector<int> t(n), p(n);
    for (std::size_t i = 0; i < n; ++i) {
        t[i] = static_cast<int>(rng.index(static_cast<std::size_t>(classes)));
        p[i] = rng.uniform() < 0.6 ? t[i] : static_cast<int>(rng.index(static_cast<std::size_t>(classes)));
    }
    return {t, p};
}

}  // namespace

TEST_CASE("confusion counts") {
    CHECK(confusion({0, 0, 1}, {0, 1, 1}, 2).counts == std::vector<std::vector<long>>{{1, 1}, {0, 1}});
    const auto diag = confusion({0, 1, 2, 2}, {0, 1, 2, 2}, 3);
    CHECK(diag.counts == std::vector<std::vector<long>>{{1, 0, 0}, {0, 1, 0}, {0, 0, 2}});
    CHECK(diag.total() == 4);
    CHECK_THROWS(confusion({0, 1}, {0}, 2));
    CHECK_THROWS(confusion({0, 3}, {0, 1}, 2));
}

TEST_CASE("confusion row sums equal class frequencies") {
    Rng rng(1);
    const auto [t, p] = random_pairs(1000, 5, rng);
    const auto m = confusion(t, p, 5);
    for (int c = 0; c < 5; ++c) {
        long tally = 0, row = 0;
        for (int v : t) tally += v == c;
        for (long v : m.counts[c]) row += v;
        CHECK(row == tally);
    }
}

TEST_CASE("perfect predictions score 100") {
    const auto m = confusion({0, 1, 2, 1}, {0, 1, 2, 1}, 3);
    for (auto avg : {Averaging::Macro, Averaging::Weighted}) {
        const auto s = summarize(m, avg);
        CHECK(format_percent(s.accuracy) == "100.00");
        CHECK(format_percent(s.precision) == "100.00");
        CHECK(format_percent(s.recall) == "100.00");
        CHECK(format_percent(s.f1) == "100.00");
    }
}

TEST_CASE("binary hand-computed example") {
    const auto m = from_counts({{50, 10}, {5, 35}});
    const auto macro = summarize(m, Averaging::Macro);
    CHECK(format_percent(macro.accuracy) == "85.00");
    CHECK(macro.precision == doctest::Approx(100.0 * (50.0 / 55 + 35.0 / 45) / 2).epsilon(1e-12));
    CHECK(format_percent(macro.precision) == "84.34");
    CHECK(macro.recall == doctest::Approx(100.0 * (50.0 / 60 + 35.0 / 40) / 2).epsilon(1e-12));
    const auto w = summarize(m, Averaging::Weighted);
    CHECK(w.precision == doctest::Approx(100.0 * (0.6 * 50.0 / 55 + 0.4 * 35.0 / 45)).epsilon(1e-12));
}

TEST_CASE("a class that is never predicted contributes zero precision") {
    const auto m = confusion({0, 0, 1, 1}, {0, 0, 0, 0}, 2);
    const auto pc = per_class(m);
    CHECK(pc[1].precision == 0.0);
    CHECK(pc[1].recall == 0.0);
    CHECK(pc[1].f1 == 0.0);
    const auto s = summarize(m, Averaging::Macro);
    CHECK(s.precision == doctest::Approx(100.0 * 0.5 / 2));
    CHECK(std::isfinite(s.f1));
}

TEST_CASE("metric invariants on random confusions") {
    Rng rng(2);
    for (int trial = 0; trial < 30; ++trial) {
        const int C = 2 + static_cast<int>(rng.index(5));
        const auto [t, p] = random_pairs(50 + rng.index(300), C, rng);
        const auto m = confusion(t, p, C);
        const auto w = summarize(m, Averaging::Weighted);
        const auto mac = summarize(m, Averaging::Macro);
        CHECK(std::abs(w.accuracy - w.recall) <= 1e-9);
        for (double v : {w.accuracy, w.precision, w.recall, w.f1, mac.precision, mac.recall, mac.f1}) {
            CHECK(v >= 0.0);
            CHECK(v <= 100.0);
        }
        for (const auto& s : per_class(m)) {
            if (s.precision > 0 && s.recall > 0) {
                CHECK(s.f1 >= std::min(s.precision, s.recall) - 1e-12);
                CHECK(s.f1 <= std::max(s.precision, s.recall) + 1e-12);
            }
        }
        // Consistent relabelling of classes leaves the macro summary unchanged.
        std::vector<int> perm(C);
        std::iota(perm.begin(), perm.end(), 0);
        rng.shuffle(std::span<int>(perm));
        std::vector<int> t2, p2;
        for (std::size_t i = 0; i < t.size(); ++i) {
            t2.push_back(perm[t[i]]);
            p2.push_back(perm[p[i]]);
        }
        const auto mac2 = summarize(confusion(t2, p2, C), Averaging::Macro);
        CHECK(mac2.precision == doctest::Approx(mac.precision).epsilon(1e-12));
        CHECK(mac2.recall == doctest::Approx(mac.recall).epsilon(1e-12));
        CHECK(mac2.f1 == doctest::Approx(mac.f1).epsilon(1e-12));
        CHECK(mac2.accuracy == mac.accuracy);
    }
}

TEST_CASE("two decimal formatting") {
    CHECK(format_percent(84.3434) == "84.34");
    CHECK(format_percent(0.0) == "0.00");
    CHECK(format_percent(99.995) == "100.00");
}

TEST_CASE("timing takes the median and excludes the warm-up") {
    int calls = 0;
    const auto t = time_pipeline(
        [&] {
            ++calls;
            std::this_thread::sleep_for(std::chrono::milliseconds(calls == 1 ? 60 : 10));
        },
        3, 10);
    CHECK(calls == 4);
    CHECK(t.samples_ms.size() == 3);
    CHECK(t.median_ms >= 10.0);
    CHECK(t.median_ms < 60.0);
    CHECK(t.per_sample_ms == doctest::Approx(t.median_ms / 10));

    const auto per = time_pipeline([] { std::this_thread::sleep_for(std::chrono::milliseconds(10 * 10)); }, 3, 10);
    CHECK(per.per_sample_ms >= 10.0);
    CHECK_THROWS_AS(time_pipeline([] {}, 2, 1), ConfigError);
}

TEST_CASE("report json and csv") {
    EvalReport r;
    r.dataset = "synthetic";
    r.pipeline = "hybrid";
    r.model = "logistic";
    r.k_features = 100;
    r.total_features = 2048;
    r.confusion = from_counts({{50, 10}, {5, 35}});
    r.macro = summarize(r.confusion, Averaging::Macro);
    r.weighted = summarize(r.confusion, Averaging::Weighted);
    r.timing.fe_ms = 3.0;
    r.timing.clf_ms = 0.25;
    r.timing.infer_ms_per_sample = 3.25;
    const auto j = r.to_json();
    CHECK(j.at("k_features") == 100);
    CHECK(j.at("metrics").contains("macro"));
    CHECK(j.at("metrics").contains("weighted"));
    CHECK(j.at("confusion").size() == 2);
    CHECK(j.at("timing").at("infer_ms_per_sample") == 3.25);

    const std::string header = EvalReport::csv_header();
    const std::string row = r.csv_row();
    CHECK(std::count(header.begin(), header.end(), ',') == std::count(row.begin(), row.end(), ','));
    CHECK(row.find("85.00") != std::string::npos);

    EvalReport failed = r;
    failed.error = "ConfigError: k exceeds d";
    CHECK_FALSE(failed.ok());
    CHECK(failed.to_json().at("error") == failed.error);
    CHECK(failed.csv_row().find("k exceeds d") != std::string::npos);
}
