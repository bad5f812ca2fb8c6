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

#include "slsbench/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "slsbench/error.hpp"

namespace slsbench {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::vector<std::string>& stat_columns() {
    static const std::vector<std::string> cols = {"count", "valid_count", "min", "p25", "median", "p75",
                                                  "p95",   "max",         "mean", "stddev"};
    return cols;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(std::move(cur));
    return out;
}

double parse_double(const std::string& s) {
    double v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) fail(ErrorCode::kInvalidArgument, "bad number '" + s + "' in CSV");
    return v;
}

bool all_numeric(const std::vector<std::string>& values) {
    return std::all_of(values.begin(), values.end(), [](const std::string& v) {
        double d = 0;
        auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), d);
        return !v.empty() && ec == std::errc() && ptr == v.data() + v.size();
    });
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream os(p, std::ios::binary | std::ios::trunc);
    if (!os) fail(ErrorCode::kIo, "cannot write '" + p.string() + "'");
    os << text;
    if (!os.flush()) fail(ErrorCode::kIo, "short write to '" + p.string() + "'");
}

std::optional<double> lookup_numeric(const json& result, const std::string& name) {
    if (!result.is_object()) return std::nullopt;
    if (auto it = result.find(name); it != result.end() && it->is_number()) return it->get<double>();
    if (auto m = result.find("metrics"); m != result.end() && m->is_object()) {
        if (auto it = m->find(name); it != m->end() && it->is_number()) return it->get<double>();
    }
    if (auto r = result.find("result"); r != result.end() && r->is_object()) {
        if (auto it = r->find(name); it != r->end() && it->is_number()) return it->get<double>();
    }
    return std::nullopt;
}

}  // namespace

std::string format_number(double v) {
    if (v == 0) return "0";
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

double percentile_nearest_rank(std::span<const double> sorted, int percent) {
    if (sorted.empty()) fail(ErrorCode::kEmptyGroup, "percentile of an empty group");
    const auto n = static_cast<long long>(sorted.size());
    // ceil(percent * n / 100) in integer arithmetic.
    long long rank = (static_cast<long long>(percent) * n + 99) / 100;
    rank = std::clamp(rank, 1LL, n);
    return sorted[static_cast<std::size_t>(rank - 1)];
}

SummaryStats summarize(std::span<const double> values) {
    if (values.empty()) fail(ErrorCode::kEmptyGroup, "cannot summarize an empty group");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    SummaryStats s;
    s.count = sorted.size();
    s.min = sorted.front();
    s.max = sorted.back();
    s.p25 = percentile_nearest_rank(sorted, 25);
    s.median = percentile_nearest_rank(sorted, 50);
    s.p75 = percentile_nearest_rank(sorted, 75);
    s.p95 = percentile_nearest_rank(sorted, 95);
    // Summing in sorted order keeps the result independent of input order.
    double sum = 0;
    for (double v : sorted) sum += v;
    s.mean = sum / static_cast<double>(s.count);
    if (s.count > 1) {
        double sq = 0;
        for (double v : sorted) sq += (v - s.mean) * (v - s.mean);
        s.stddev = std::sqrt(sq / static_cast<double>(s.count - 1));
    }
    return s;
}

std::string unit_for_metric(const std::string& name) {
    if (name == "mflops") return "MFLOPS";
    if (name == "req_s") return "req/s";
    if (name.size() > 5 && name.compare(name.size() - 5, 5, "_mb_s") == 0) return "MB/s";
    if (name.size() > 3 && name.compare(name.size() - 3, 3, "_ms") == 0) return "ms";
    return "";
}

std::vector<DerivedMetric> derive_metrics(const TrialResult& trial, const std::string& requested) {
    std::vector<DerivedMetric> out;
    if (trial.point_failed || !trial.valid) return out;

    if (!requested.empty()) {
        if (auto it = trial.derived.find(requested); it != trial.derived.end()) {
            return {{requested, it->second, unit_for_metric(requested)}};
        }
        for (const auto& r : trial.records) {
            if (!r.ok()) continue;
            auto v = lookup_numeric(r.result, requested);
            if (!v) fail(ErrorCode::kSchema, "workload result has no field '" + requested + "'");
            return {{requested, *v, unit_for_metric(requested)}};
        }
        return out;
    }

    switch (trial.protocol) {
        case Protocol::kColdstartPair:
            if (auto it = trial.derived.find("coldstart_est_ms"); it != trial.derived.end()) {
                out.push_back({"coldstart_est_ms", it->second, "ms"});
            }
            break;
        case Protocol::kLatency:
            if (!trial.records.empty() && trial.records.front().ok()) {
                const auto& r = trial.records.front();
                out.push_back({"latency_ms", r.exec_ms_reported.value_or(r.response_ms()), "ms"});
            }
            break;
        case Protocol::kThroughput:
            if (auto it = trial.derived.find("req_s"); it != trial.derived.end()) {
                out.push_back({"req_s", it->second, "req/s"});
            }
            if (auto it = trial.derived.find("median_response_ms"); it != trial.derived.end()) {
                out.push_back({"median_response_ms", it->second, "ms"});
            }
            break;
    }
    // Self-reported workload metrics pass through unchanged.
    if (trial.protocol == Protocol::kLatency && !trial.records.empty() && trial.records.front().ok()) {
        const auto& result = trial.records.front().result;
        if (auto m = result.find("metrics"); m != result.end() && m->is_object()) {
            for (const auto& [k, v] : m->items()) {
                if (v.is_number()) out.push_back({k, v.get<double>(), unit_for_metric(k)});
            }
        }
    }
    return out;
}

DerivedMetric derive_metric(const TrialResult& trial, const std::string& requested) {
    auto all = derive_metrics(trial, requested);
    if (all.empty()) {
        fail(ErrorCode::kSchema, "trial " + std::to_string(trial.trial_index) + " at " + point_key(trial.point) +
                                     " has no derivable metric" + (trial.reason.empty() ? "" : " (" + trial.reason + ")"));
    }
    return all.front();
}

std::vector<MetricsSummary> summarize_results(const ExperimentPlan& plan, const std::vector<TrialResult>& results) {
    std::vector<std::string> order;
    std::map<std::string, AxisPoint> points;
    std::map<std::string, std::size_t> trial_counts;
    std::map<std::string, std::map<std::string, std::pair<std::string, std::vector<double>>>> values;
    for (const auto& t : results) {
        if (t.point_failed) continue;
        const auto key = point_key(t.point);
        if (points.emplace(key, t.point).second) order.push_back(key);
        ++trial_counts[key];
        for (const auto& m : derive_metrics(t, plan.metric)) {
            auto& slot = values[key][m.name];
            slot.first = m.unit;
            slot.second.push_back(m.value);
        }
    }
    std::vector<MetricsSummary> out;
    for (const auto& key : order) {
        for (const auto& [metric, uv] : values[key]) {
            MetricsSummary s;
            s.plan = plan.id;
            s.point = points[key];
            s.metric = metric;
            s.unit = uv.first;
            s.count = trial_counts[key];
            s.valid_count = uv.second.size();
            s.stats = summarize(uv.second);
            out.push_back(std::move(s));
        }
    }
    return out;
}

std::string summary_ref(const MetricsSummary& s) { return s.plan + "|" + point_key(s.point) + "|" + s.metric; }

std::vector<FigureSpec> build_figures(const ExperimentPlan& plan, const std::vector<MetricsSummary>& summaries) {
    std::vector<std::string> metrics;
    for (const auto& s : summaries) {
        if (std::find(metrics.begin(), metrics.end(), s.metric) == metrics.end()) metrics.push_back(s.metric);
    }
    std::sort(metrics.begin(), metrics.end());

    std::vector<FigureSpec> out;
    for (const auto& metric : metrics) {
        FigureSpec f;
        f.name = plan.id + "_" + metric;
        f.title = plan.id + ": " + metric;
        f.x_label = plan.axes.empty() ? "point" : plan.axes.front().name;
        if (plan.axes.empty()) {
            f.categories = {""};
        } else {
            f.categories = plan.axes.front().values;
            if (all_numeric(f.categories)) {
                std::sort(f.categories.begin(), f.categories.end(),
                          [](const auto& a, const auto& b) { return parse_double(a) < parse_double(b); });
            }
        }
        // One series per combination of the remaining axes, in plan order.
        ExperimentPlan rest = plan;
        if (!rest.axes.empty()) rest.axes.erase(rest.axes.begin());
        for (const auto& combo : rest.points()) {
            FigureSeries series;
            series.label = combo.empty() ? metric : point_key(combo);
            for (const auto& cat : f.categories) {
                std::optional<std::string> ref;
                for (const auto& s : summaries) {
                    if (s.metric != metric) continue;
                    bool match = plan.axes.empty() || (point_value(s.point, f.x_label) != nullptr &&
                                                       *point_value(s.point, f.x_label) == cat);
                    for (const auto& [k, v] : combo) {
                        const auto* have = point_value(s.point, k);
                        match = match && have != nullptr && *have == v;
                    }
                    if (match) {
                        ref = summary_ref(s);
                        f.unit = s.unit;
                        break;
                    }
                }
                series.refs.push_back(ref);
            }
            f.series.push_back(std::move(series));
        }
        out.push_back(std::move(f));
    }
    return out;
}

json to_json(const FigureSpec& f) {
    json series = json::array();
    for (const auto& s : f.series) {
        json refs = json::array();
        for (const auto& r : s.refs) refs.push_back(r ? json(*r) : json());
        series.push_back({{"label", s.label}, {"summary_refs", refs}});
    }
    return {{"name", f.name},   {"kind", f.kind},     {"title", f.title},
            {"unit", f.unit},   {"x_axis", {{"label", f.x_label}, {"categories", f.categories}}},
            {"series", series}};
}

std::string summaries_to_csv(const ExperimentPlan& plan, const std::vector<MetricsSummary>& summaries) {
    std::ostringstream os;
    os << "plan";
    for (const auto& a : plan.axes) os << ',' << csv_field(a.name);
    os << ",metric,unit";
    for (const auto& c : stat_columns()) os << ',' << c;
    os << '\n';
    for (const auto& s : summaries) {
        os << csv_field(s.plan);
        for (const auto& a : plan.axes) {
            const auto* v = point_value(s.point, a.name);
            os << ',' << csv_field(v ? *v : "");
        }
        os << ',' << csv_field(s.metric) << ',' << csv_field(s.unit) << ',' << s.count << ',' << s.valid_count;
        for (double v : {s.stats.min, s.stats.p25, s.stats.median, s.stats.p75, s.stats.p95, s.stats.max,
                         s.stats.mean, s.stats.stddev}) {
            os << ',' << format_number(v);
        }
        os << '\n';
    }
    return os.str();
}

std::vector<MetricsSummary> summaries_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) fail(ErrorCode::kInvalidArgument, "empty CSV");
    const auto header = split_csv_line(line);
    const auto metric_col = std::find(header.begin(), header.end(), "metric");
    if (header.empty() || header.front() != "plan" || metric_col == header.end() ||
        header.end() - metric_col != static_cast<std::ptrdiff_t>(2 + stat_columns().size())) {
        fail(ErrorCode::kInvalidArgument, "unexpected CSV header");
    }
    const auto n_axes = static_cast<std::size_t>(metric_col - header.begin()) - 1;
    std::vector<MetricsSummary> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != header.size()) fail(ErrorCode::kInvalidArgument, "CSV row has wrong field count");
        MetricsSummary s;
        s.plan = f[0];
        for (std::size_t i = 0; i < n_axes; ++i) s.point.emplace_back(header[1 + i], f[1 + i]);
        std::size_t at = 1 + n_axes;
        s.metric = f[at++];
        s.unit = f[at++];
        s.count = std::stoull(f[at++]);
        s.valid_count = std::stoull(f[at++]);
        s.stats.count = s.valid_count;
        for (double* d : {&s.stats.min, &s.stats.p25, &s.stats.median, &s.stats.p75, &s.stats.p95, &s.stats.max,
                          &s.stats.mean, &s.stats.stddev}) {
            *d = parse_double(f[at++]);
        }
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<fs::path> report(const ExperimentPlan& plan, const std::vector<TrialResult>& results,
                             const fs::path& out_dir, const ReportOptions& options) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec || !fs::is_directory(out_dir)) fail(ErrorCode::kIo, "cannot create report directory '" + out_dir.string() + "'");
    const auto summaries = summarize_results(plan, results);
    std::vector<fs::path> written;
    if (options.csv) {
        const auto csv = out_dir / "summary.csv";
        write_file(csv, summaries_to_csv(plan, summaries));
        written.push_back(csv);

        std::ostringstream failures;
        failures << "plan,point,reason\n";
        for (const auto& t : results) {
            if (!t.point_failed) continue;
            std::string reason = t.reason;
            for (const auto& v : t.violations) reason += "; " + v.kind + ": " + v.message;
            failures << csv_field(t.plan_id) << ',' << csv_field(point_key(t.point)) << ',' << csv_field(reason) << '\n';
        }
        const auto fpath = out_dir / "failures.csv";
        write_file(fpath, failures.str());
        written.push_back(fpath);
    }
    if (options.figures) {
        const auto dir = out_dir / "figures";
        fs::create_directories(dir, ec);
        for (const auto& f : build_figures(plan, summaries)) {
            const auto path = dir / (f.name + ".figure");
            write_file(path, to_json(f).dump(2) + "\n");
            written.push_back(path);
        }
    }
    return written;
}

}  // namespace slsbench
