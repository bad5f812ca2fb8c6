// Copyright 2026 The SlsBench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "slsbench/error.hpp"
#include "slsbench/metrics.hpp"
#include "support.hpp"

using namespace slsbench;
using slsbench::testing::read_file;
using slsbench::testing::TempDir;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Sort-and-index oracle straight from the definition: the smallest value v
// such that at least p percent of the list is <= v.
double oracle_percentile(std::vector<double> v, int p) {
    std::sort(v.begin(), v.end());
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (100.0 * static_cast<double>(i + 1) >= static_cast<double>(p) * static_cast<double>(v.size())) return v[i];
    }
    return v.back();
}

TrialResult coldstart_trial(const AxisPoint& point, int index, double estimate, bool valid = true) {
    TrialResult t;
    t.plan_id = "p";
    t.point = point;
    t.trial_index = index;
    t.protocol = Protocol::kColdstartPair;
    t.derived["coldstart_est_ms"] = estimate;
    t.valid = valid;
    if (!valid) t.reason = "negative-estimate";
    return t;
}

TrialResult latency_trial(const json& result, std::optional<double> exec_ms, double response_ms) {
    TrialResult t;
    t.protocol = Protocol::kLatency;
    InvocationRecord r;
    r.t_end_ns = ms_to_ns(response_ms);
    r.result = result;
    r.exec_ms_reported = exec_ms;
    t.records.push_back(r);
    return t;
}

ExperimentPlan memory_plan() {
    ExperimentPlan plan;
    plan.id = "p";
    plan.axes = {{kAxisMemory, {"1024", "128", "256"}}};
    return plan;
}

std::vector<TrialResult> memory_results() {
    std::vector<TrialResult> out;
    for (const char* mem : {"1024", "128", "256"}) {
        for (int i = 0; i < 5; ++i) {
            out.push_back(coldstart_trial({{kAxisMemory, mem}}, i, 1000.0 / std::stod(mem) * (i + 1)));
        }
    }
    return out;
}

}  // namespace

TEST_SUITE("metrics") {
    TEST_CASE("summaries of small lists") {
        const std::vector<double> one = {5};
        const auto s = summarize(one);
        CHECK(s.min == 5);
        CHECK(s.median == 5);
        CHECK(s.max == 5);
        CHECK(s.stddev == 0);

        std::vector<double> v(20);
        std::iota(v.begin(), v.end(), 1.0);
        const auto t = summarize(v);
        CHECK(t.median == 10);
        CHECK(t.p25 == 5);
        CHECK(t.p75 == 15);
        CHECK(t.p95 == 19);
        CHECK(t.min == 1);
        CHECK(t.max == 20);
        CHECK(t.mean == 10.5);
        CHECK(t.stddev == doctest::Approx(std::sqrt(35.0)));

        CHECK_THROWS_AS(summarize(std::vector<double>{}), Error);
        try {
            summarize(std::vector<double>{});
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::kEmptyGroup);
        }
    }

    TEST_CASE("percentiles match the sort-based oracle") {
        std::mt19937_64 rng(2024);
        for (int trial = 0; trial < 500; ++trial) {
            const auto n = 1 + rng() % 100;
            std::vector<double> v(n);
            for (auto& x : v) x = static_cast<double>(rng() % 1000) / 7.0;
            std::vector<double> sorted = v;
            std::sort(sorted.begin(), sorted.end());
            for (int p : {1, 5, 25, 50, 75, 95, 99, 100}) CHECK(percentile_nearest_rank(sorted, p) == oracle_percentile(v, p));
            const auto s = summarize(v);
            CHECK(s.min <= s.p25);
            CHECK(s.p25 <= s.median);
            CHECK(s.median <= s.p75);
            CHECK(s.p75 <= s.p95);
            CHECK(s.p95 <= s.max);
        }
    }

    TEST_CASE("summaries are order invariant and scale linearly") {
        std::mt19937_64 rng(1);
        std::vector<double> v(37);
        for (auto& x : v) x = static_cast<double>(rng() % 10000) / 10.0;
        const auto a = summarize(v);
        std::shuffle(v.begin(), v.end(), rng);
        const auto b = summarize(v);
        CHECK(a.median == b.median);
        CHECK(a.mean == b.mean);
        CHECK(a.stddev == b.stddev);

        for (double k : {2.0, 0.5, 3.0}) {
            std::vector<double> scaled = v;
            for (auto& x : scaled) x *= k;
            const auto s = summarize(scaled);
            CHECK(s.min == doctest::Approx(k * a.min));
            CHECK(s.p25 == doctest::Approx(k * a.p25));
            CHECK(s.median == doctest::Approx(k * a.median));
            CHECK(s.p95 == doctest::Approx(k * a.p95));
            CHECK(s.max == doctest::Approx(k * a.max));
            CHECK(s.mean == doctest::Approx(k * a.mean));
            CHECK(s.stddev == doctest::Approx(k * a.stddev));
        }
    }

    TEST_CASE("derived metrics") {
        const auto cs = coldstart_trial({}, 0, 300);
        const auto m = derive_metric(cs);
        CHECK(m.name == "coldstart_est_ms");
        CHECK(m.value == 300);
        CHECK(m.unit == "ms");

        CHECK(derive_metric(latency_trial({{"result", 1}}, 12.0, 20.0)).value == 12.0);
        CHECK(derive_metric(latency_trial({{"result", 1}}, std::nullopt, 20.0)).value == 20.0);

        const auto lin = latency_trial({{"result", 1}, {"metrics", {{"mflops", 321.5}}}}, 1.0, 2.0);
        const auto all = derive_metrics(lin);
        REQUIRE(all.size() == 2);
        CHECK(all[1].name == "mflops");
        CHECK(all[1].value == 321.5);
        CHECK(all[1].unit == "MFLOPS");
        CHECK(derive_metric(lin, "mflops").value == 321.5);
        CHECK_THROWS_AS(derive_metric(lin, "read_mb_s"), Error);
        try {
            derive_metric(lin, "read_mb_s");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::kSchema);
            CHECK(std::string(e.what()).find("read_mb_s") != std::string::npos);
        }

        TrialResult tput;
        tput.protocol = Protocol::kThroughput;
        tput.derived["req_s"] = 120.0 / 30.0;
        CHECK(derive_metric(tput).value == 4.0);
        CHECK(derive_metric(tput).unit == "req/s");

        CHECK(unit_for_metric("write_mb_s") == "MB/s");
        CHECK(unit_for_metric("latency_ms") == "ms");
        CHECK(derive_metrics(coldstart_trial({}, 0, -5, false)).empty());
    }

    TEST_CASE("grouped summaries use valid trials only") {
        auto results = memory_results();
        results.push_back(coldstart_trial({{kAxisMemory, "128"}}, 5, -3, false));
        TrialResult failed;
        failed.point = {{kAxisMemory, "512"}};
        failed.point_failed = true;
        failed.valid = false;
        results.push_back(failed);
        const auto summaries = summarize_results(memory_plan(), results);
        REQUIRE(summaries.size() == 3);
        CHECK(summaries[0].point == AxisPoint{{kAxisMemory, "1024"}});
        CHECK(summaries[1].count == 6);
        CHECK(summaries[1].valid_count == 5);
        CHECK(summaries[1].stats.min > 0);
        for (const auto& s : summaries) CHECK(s.count >= s.valid_count);
    }

    TEST_CASE("csv round trips exactly") {
        const auto plan = memory_plan();
        auto results = memory_results();
        results.push_back(coldstart_trial({{kAxisMemory, "128"}}, 9, 0.1 + 0.2));
        const auto summaries = summarize_results(plan, results);
        const auto csv = summaries_to_csv(plan, summaries);
        CHECK(csv.rfind("plan,memory_mb,metric,unit,count,valid_count,min,p25,median,p75,p95,max,mean,stddev\n", 0) == 0);
        const auto back = summaries_from_csv(csv);
        REQUIRE(back.size() == summaries.size());
        for (std::size_t i = 0; i < back.size(); ++i) {
            CHECK(back[i].plan == summaries[i].plan);
            CHECK(back[i].point == summaries[i].point);
            CHECK(back[i].metric == summaries[i].metric);
            CHECK(back[i].unit == summaries[i].unit);
            CHECK(back[i].count == summaries[i].count);
            CHECK(back[i].valid_count == summaries[i].valid_count);
            CHECK(back[i].stats.min == summaries[i].stats.min);
            CHECK(back[i].stats.median == summaries[i].stats.median);
            CHECK(back[i].stats.mean == summaries[i].stats.mean);
            CHECK(back[i].stats.stddev == summaries[i].stats.stddev);
        }
        CHECK(summaries_to_csv(plan, back) == csv);
        CHECK(format_number(0.30000000000000004) == "0.30000000000000004");
        CHECK(format_number(390) == "390");
        CHECK_THROWS_AS(summaries_from_csv("bogus\n"), Error);
    }

    TEST_CASE("csv quoting survives commas in values") {
        ExperimentPlan plan;
        plan.id = "q";
        plan.axes = {{kAxisRegion, {"a,b"}}};
        std::vector<TrialResult> results = {coldstart_trial({{kAxisRegion, "a,b"}}, 0, 1)};
        results[0].plan_id = "q";
        const auto csv = summaries_to_csv(plan, summarize_results(plan, results));
        CHECK(csv.find("\"a,b\"") != std::string::npos);
        CHECK(summaries_from_csv(csv)[0].point[0].second == "a,b");
    }

    TEST_CASE("figures order numeric categories and resolve every ref") {
        const auto plan = memory_plan();
        const auto summaries = summarize_results(plan, memory_results());
        const auto figs = build_figures(plan, summaries);
        REQUIRE(figs.size() == 1);
        CHECK(figs[0].name == "p_coldstart_est_ms");
        CHECK(figs[0].categories == std::vector<std::string>{"128", "256", "1024"});
        CHECK(figs[0].unit == "ms");
        REQUIRE(figs[0].series.size() == 1);
        std::set<std::string> refs;
        for (const auto& s : summaries) refs.insert(summary_ref(s));
        for (const auto& r : figs[0].series[0].refs) {
            REQUIRE(r.has_value());
            CHECK(refs.count(*r) == 1);
        }

        ExperimentPlan two;
        two.id = "two";
        two.axes = {{kAxisMemory, {"128", "256"}}, {kAxisLanguage, {"python", "java"}}};
        std::vector<TrialResult> results;
        for (const auto& p : two.points()) results.push_back(coldstart_trial(p, 0, 1));
        const auto f2 = build_figures(two, summarize_results(two, results));
        REQUIRE(f2[0].series.size() == 2);
        CHECK(f2[0].series[0].label == "language=python");
    }

    TEST_CASE("reports are byte stable and header-only when empty") {
        TempDir tmp("report");
        const auto plan = memory_plan();
        const auto a = report(plan, memory_results(), tmp / "a");
        const auto b = report(plan, memory_results(), tmp / "b");
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) CHECK(read_file(a[i]) == read_file(b[i]));
        CHECK(fs::exists(tmp / "a" / "figures" / "p_coldstart_est_ms.figure"));
        const auto fig = json::parse(read_file(tmp / "a" / "figures" / "p_coldstart_est_ms.figure"));
        CHECK(fig["x_axis"]["categories"][0] == "128");

        report(plan, {}, tmp / "empty");
        CHECK(read_file(tmp / "empty" / "summary.csv") ==
              "plan,memory_mb,metric,unit,count,valid_count,min,p25,median,p75,p95,max,mean,stddev\n");

        ReportOptions csv_only;
        csv_only.figures = false;
        report(plan, memory_results(), tmp / "c", csv_only);
        CHECK_FALSE(fs::exists(tmp / "c" / "figures"));

        testing::write_file(tmp / "file", "x");
        CHECK_THROWS_AS(report(plan, {}, tmp / "file" / "sub"), Error);
    }
}
