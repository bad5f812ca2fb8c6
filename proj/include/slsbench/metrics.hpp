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

#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "slsbench/experiment.hpp"

namespace slsbench {

struct SummaryStats {
    std::size_t count = 0;
    double min = 0, p25 = 0, median = 0, p75 = 0, p95 = 0, max = 0;
    double mean = 0;
    double stddev = 0;  // sample standard deviation; 0 for a single value
};

// Nearest-rank percentile: the ceil(percent/100 * n)-th smallest value
// (1-based, clamped to [1, n]). `sorted` must be ascending and non-empty.
double percentile_nearest_rank(std::span<const double> sorted, int percent);

// Throws kEmptyGroup on empty input.
SummaryStats summarize(std::span<const double> values);

struct DerivedMetric {
    std::string name;
    double value = 0;
    std::string unit;
};

// Per-trial metrics: coldstart_est_ms for cold-start pairs, latency_ms
// (reported exec time, else response time) for latency trials, req_s for
// throughput runs, plus every numeric field a workload reports under
// "metrics". With a requested metric only that one is returned, and a result
// missing it is a kSchema error.
std::vector<DerivedMetric> derive_metrics(const TrialResult& trial, const std::string& requested = {});
// First metric of derive_metrics; throws kSchema when there is none.
DerivedMetric derive_metric(const TrialResult& trial, const std::string& requested = {});

std::string unit_for_metric(const std::string& name);

struct MetricsSummary {
    std::string plan;
    AxisPoint point;
    std::string metric;
    std::string unit;
    std::size_t count = 0;        // trials at the point
    std::size_t valid_count = 0;  // trials contributing a value
    SummaryStats stats;
};

// Groups per (point, metric) in first-seen point order and metric name order.
// Statistics use valid trials only; failed points produce no summary.
std::vector<MetricsSummary> summarize_results(const ExperimentPlan& plan, const std::vector<TrialResult>& results);

std::string summary_ref(const MetricsSummary& s);

struct FigureSeries {
    std::string label;
    // Aligned with the x categories; nullopt where the point has no data.
    std::vector<std::optional<std::string>> refs;
};

struct FigureSpec {
    std::string name;  // <plan>_<metric>
    std::string kind = "box";
    std::string x_label;
    std::vector<std::string> categories;
    std::vector<FigureSeries> series;
    std::string title;
    std::string unit;
};

std::vector<FigureSpec> build_figures(const ExperimentPlan& plan, const std::vector<MetricsSummary>& summaries);

nlohmann::json to_json(const FigureSpec& f);

// CSV dialect: comma separated, header row, '.' decimal, '\n' line ends.
// Columns: plan, one per plan axis, metric, unit, count, valid_count, min,
// p25, median, p75, p95, max, mean, stddev.
std::string summaries_to_csv(const ExperimentPlan& plan, const std::vector<MetricsSummary>& summaries);
std::vector<MetricsSummary> summaries_from_csv(const std::string& text);

struct ReportOptions {
    bool csv = true;
    bool figures = true;
};

// Writes summary.csv, failures.csv and figures/<plan>_<metric>.figure under
// out_dir. Output bytes depend only on the inputs.
std::vector<std::filesystem::path> report(const ExperimentPlan& plan, const std::vector<TrialResult>& results,
                                          const std::filesystem::path& out_dir, const ReportOptions& options = {});

// Shortest decimal text that parses back to the same double.
std::string format_number(double v);

}  // namespace slsbench
