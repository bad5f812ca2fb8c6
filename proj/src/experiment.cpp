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

#include "slsbench/experiment.hpp"

#include <fstream>
#include <set>

#include "slsbench/error.hpp"

namespace slsbench {

using nlohmann::json;

namespace {

const std::set<std::string>& known_axes() {
    static const std::set<std::string> axes = {kAxisLanguage, kAxisMemory, kAxisPackage, kAxisRegion,
                                               kAxisConcurrency};
    return axes;
}

std::string value_text(const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

json point_json(const AxisPoint& p) {
    json out = json::array();
    for (const auto& [k, v] : p) out.push_back({k, v});
    return out;
}

AxisPoint point_from_json(const json& doc) {
    AxisPoint p;
    for (const auto& kv : doc) p.emplace_back(kv.at(0).get<std::string>(), kv.at(1).get<std::string>());
    return p;
}

}  // namespace

const char* to_string(Protocol p) {
    switch (p) {
        case Protocol::kColdstartPair: return "coldstart-pair";
        case Protocol::kLatency: return "latency";
        case Protocol::kThroughput: return "throughput";
    }
    return "latency";
}

Protocol protocol_from_string(const std::string& s) {
    if (s == "coldstart-pair") return Protocol::kColdstartPair;
    if (s == "latency") return Protocol::kLatency;
    if (s == "throughput") return Protocol::kThroughput;
    fail(ErrorCode::kInvalidArgument, "unknown protocol '" + s + "'");
}

std::string point_key(const AxisPoint& point) {
    std::string out;
    for (const auto& [k, v] : point) {
        if (!out.empty()) out += ',';
        out += k + "=" + v;
    }
    return out;
}

const std::string* point_value(const AxisPoint& point, const std::string& axis) {
    for (const auto& [k, v] : point) {
        if (k == axis) return &v;
    }
    return nullptr;
}

void ExperimentPlan::check() const {
    if (id.empty()) fail(ErrorCode::kInvalidArgument, "plan id must be non-empty");
    if (repetitions < 1) fail(ErrorCode::kInvalidArgument, "plan '" + id + "': repetitions must be >= 1");
    if (workload.empty()) fail(ErrorCode::kInvalidArgument, "plan '" + id + "': no workload");
    std::set<std::string> seen;
    for (const auto& a : axes) {
        if (known_axes().count(a.name) == 0) {
            fail(ErrorCode::kInvalidArgument, "plan '" + id + "': unknown axis '" + a.name + "'");
        }
        if (!seen.insert(a.name).second) fail(ErrorCode::kInvalidArgument, "plan '" + id + "': duplicate axis " + a.name);
        if (a.values.empty()) fail(ErrorCode::kInvalidArgument, "plan '" + id + "': axis '" + a.name + "' is empty");
        if (a.name == kAxisPackage) {
            for (const auto& v : a.values) {
                bool defined = v == "base";
                for (const auto& pv : package_variants) defined = defined || pv.label == v;
                if (!defined) fail(ErrorCode::kInvalidArgument, "plan '" + id + "': package variant '" + v + "' undefined");
            }
        }
    }
    if (protocol == Protocol::kThroughput && !(duration_s >= 0)) {
        fail(ErrorCode::kInvalidArgument, "plan '" + id + "': duration_s must be >= 0");
    }
    if (!(timeout_s > 0)) fail(ErrorCode::kInvalidArgument, "plan '" + id + "': timeout_s must be > 0");
    if (pacing_s < 0) fail(ErrorCode::kInvalidArgument, "plan '" + id + "': pacing_s must be >= 0");
}

std::vector<AxisPoint> ExperimentPlan::points() const {
    std::vector<AxisPoint> out{AxisPoint{}};
    for (const auto& axis : axes) {
        std::vector<AxisPoint> next;
        for (const auto& prefix : out) {
            for (const auto& v : axis.values) {
                auto p = prefix;
                p.emplace_back(axis.name, v);
                next.push_back(std::move(p));
            }
        }
        out = std::move(next);
    }
    return out;
}

json to_json(const ExperimentPlan& p) {
    json axes = json::array();
    for (const auto& a : p.axes) axes.push_back({{"name", a.name}, {"values", a.values}});
    json variants = json::array();
    for (const auto& v : p.package_variants) {
        variants.push_back({{"label", v.label}, {"padding_bytes", v.padding_bytes}, {"import_at_init", v.import_at_init}});
    }
    return {{"id", p.id},
            {"provider", p.provider},
            {"platform", p.platform},
            {"workload", p.workload},
            {"axes", axes},
            {"repetitions", p.repetitions},
            {"protocol", to_string(p.protocol)},
            {"concurrency", p.concurrency},
            {"duration_s", p.duration_s},
            {"language", p.language},
            {"memory_mb", p.memory_mb},
            {"region", p.region},
            {"timeout_s", p.timeout_s},
            {"payload", p.payload},
            {"package_variants", variants},
            {"synthetic_base_bytes", p.synthetic_base_bytes},
            {"pacing_s", p.pacing_s},
            {"teardown_after_point", p.teardown_after_point},
            {"metric", p.metric},
            {"sim_model", p.sim_model}};
}

ExperimentPlan plan_from_json(const json& doc) {
    ExperimentPlan p;
    try {
        p.id = doc.at("id").get<std::string>();
        p.provider = doc.value("provider", p.provider);
        p.platform = doc.value("platform", p.platform);
        p.workload = doc.value("workload", p.workload);
        for (const auto& a : doc.value("axes", json::array())) {
            Axis axis{a.at("name").get<std::string>(), {}};
            for (const auto& v : a.at("values")) axis.values.push_back(value_text(v));
            p.axes.push_back(std::move(axis));
        }
        p.repetitions = doc.value("repetitions", 20);
        p.protocol = protocol_from_string(doc.value("protocol", std::string("coldstart-pair")));
        p.concurrency = doc.value("concurrency", 1);
        p.duration_s = doc.value("duration_s", 30.0);
        p.language = doc.value("language", std::string());
        p.memory_mb = doc.value("memory_mb", Mebibytes{128});
        p.region = doc.value("region", std::string());
        p.timeout_s = doc.value("timeout_s", 60.0);
        p.payload = doc.value("payload", json::object());
        for (const auto& v : doc.value("package_variants", json::array())) {
            p.package_variants.push_back({v.at("label").get<std::string>(), v.value("padding_bytes", std::int64_t{0}),
                                          v.value("import_at_init", false)});
        }
        p.synthetic_base_bytes = doc.value("synthetic_base_bytes", std::uint64_t{0});
        p.pacing_s = doc.value("pacing_s", 1.0);
        p.teardown_after_point = doc.value("teardown_after_point", true);
        p.metric = doc.value("metric", std::string());
        p.sim_model = doc.value("sim_model", std::string());
    } catch (const json::exception& e) {
        fail(ErrorCode::kInvalidArgument, std::string("malformed plan: ") + e.what());
    }
    p.check();
    return p;
}

ExperimentPlan load_plan(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) fail(ErrorCode::kNotFound, "plan file '" + file.string() + "' not found");
    try {
        return plan_from_json(json::parse(in));
    } catch (const json::parse_error& e) {
        fail(ErrorCode::kInvalidArgument, file.string() + ": " + e.what());
    }
}

json to_json(const TrialResult& t) {
    json records = json::array();
    for (const auto& r : t.records) records.push_back(to_json(r));
    json violations = json::array();
    for (const auto& v : t.violations) violations.push_back({{"kind", v.kind}, {"message", v.message}});
    return {{"plan_id", t.plan_id},
            {"point", point_json(t.point)},
            {"trial_index", t.trial_index},
            {"protocol", to_string(t.protocol)},
            {"function_id", t.function_id},
            {"records", records},
            {"derived", t.derived},
            {"valid", t.valid},
            {"reason", t.reason},
            {"point_failed", t.point_failed},
            {"violations", violations},
            {"duration_s", t.duration_s}};
}

TrialResult trial_from_json(const json& doc) {
    TrialResult t;
    t.plan_id = doc.at("plan_id").get<std::string>();
    t.point = point_from_json(doc.at("point"));
    t.trial_index = doc.at("trial_index").get<int>();
    t.protocol = protocol_from_string(doc.at("protocol").get<std::string>());
    t.function_id = doc.value("function_id", std::string());
    for (const auto& r : doc.value("records", json::array())) t.records.push_back(record_from_json(r));
    t.derived = doc.value("derived", std::map<std::string, double>{});
    t.valid = doc.value("valid", false);
    t.reason = doc.value("reason", std::string());
    t.point_failed = doc.value("point_failed", false);
    for (const auto& v : doc.value("violations", json::array())) {
        t.violations.push_back({v.at("kind").get<std::string>(), v.at("message").get<std::string>()});
    }
    t.duration_s = doc.value("duration_s", 0.0);
    return t;
}

}  // namespace slsbench
