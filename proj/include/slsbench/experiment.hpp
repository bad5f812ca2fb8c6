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

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "slsbench/packaging.hpp"
#include "slsbench/platform.hpp"
#include "slsbench/provider.hpp"

namespace slsbench {

enum class Protocol { kColdstartPair, kLatency, kThroughput };

const char* to_string(Protocol p);
Protocol protocol_from_string(const std::string& text);

inline constexpr const char* kAxisLanguage = "language";
inline constexpr const char* kAxisMemory = "memory_mb";
inline constexpr const char* kAxisPackage = "package_variant";
inline constexpr const char* kAxisRegion = "region";
inline constexpr const char* kAxisConcurrency = "concurrency";

struct Axis {
    std::string name;
    std::vector<std::string> values;
};

// Ordered (axis, value) pairs identifying one configuration.
using AxisPoint = std::vector<std::pair<std::string, std::string>>;

std::string point_key(const AxisPoint& point);
const std::string* point_value(const AxisPoint& point, const std::string& axis);

struct ExperimentPlan {
    std::string id;
    std::string provider = "local-sim";
    std::string platform = "aws";
    std::string workload = "synthetic";
    std::vector<Axis> axes;
    int repetitions = 20;
    Protocol protocol = Protocol::kColdstartPair;
    // Throughput protocol.
    int concurrency = 1;
    double duration_s = 30;
    // Defaults for dimensions that are not swept.
    std::string language;  // empty: the manifest's language
    Mebibytes memory_mb = 128;
    std::string region;
    double timeout_s = 60;
    nlohmann::json payload = nlohmann::json::object();
    std::vector<SizeVariant> package_variants;
    // Unzipped size of the generated synthetic base package (0: minimal).
    std::uint64_t synthetic_base_bytes = 0;
    double pacing_s = 1.0;
    bool teardown_after_point = true;
    // Field of the workload result to report for latency trials; empty: the
    // execution time.
    std::string metric;
    std::string sim_model;

    void check() const;
    std::vector<AxisPoint> points() const;
};

nlohmann::json to_json(const ExperimentPlan& plan);
ExperimentPlan plan_from_json(const nlohmann::json& doc);
ExperimentPlan load_plan(const std::filesystem::path& file);

struct TrialResult {
    std::string plan_id;
    AxisPoint point;
    int trial_index = 0;
    Protocol protocol = Protocol::kColdstartPair;
    std::string function_id;
    std::vector<InvocationRecord> records;
    std::map<std::string, double> derived;
    bool valid = true;
    std::string reason;
    // Set when the point could not be deployed; the trial then carries no
    // records and lists the violations.
    bool point_failed = false;
    std::vector<Violation> violations;
    double duration_s = 0;
};

nlohmann::json to_json(const TrialResult& t);
TrialResult trial_from_json(const nlohmann::json& doc);

}  // namespace slsbench
