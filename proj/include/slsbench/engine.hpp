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
#include <functional>
#include <map>
#include <mutex>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "slsbench/experiment.hpp"
#include "slsbench/provider.hpp"

namespace slsbench {

// Invoke-twice cold-start estimate. The caller forces a cold state first.
// coldstart_est_ms = response(first) - response(second).
TrialResult run_coldstart_trial(Provider& provider, const DeploymentHandle& handle,
                                const nlohmann::json& payload = nlohmann::json::object(), double timeout_s = 60);

// `concurrency` workers issue back-to-back invocations until duration_s has
// elapsed. On a virtual clock the workers are interleaved deterministically
// by a discrete-event loop instead of threads. Every record, including
// failures, is appended to `sink` when given and returned.
std::vector<InvocationRecord> run_throughput(Provider& provider, const DeploymentHandle& handle, int concurrency,
                                             double duration_s, const nlohmann::json& payload = nlohmann::json::object(),
                                             double timeout_s = 60, RecordSink* sink = nullptr);

// Append-only line-delimited journal. A torn final line (crash mid-write) is
// ignored on load.
class Journal {
public:
    explicit Journal(std::filesystem::path path);

    std::vector<nlohmann::json> load() const;
    void append(const nlohmann::json& entry);
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
    std::mutex mu_;
};

// Resolves workload ids to packaged artifacts, building each at most once.
class WorkloadCatalog {
public:
    WorkloadCatalog(std::filesystem::path workloads_dir, std::filesystem::path package_dir);

    const PackageArtifact& base(const std::string& workload, std::uint64_t synthetic_base_bytes = 0);
    const PackageArtifact& variant(const std::string& workload, const SizeVariant& variant,
                                   std::uint64_t synthetic_base_bytes = 0);
    std::filesystem::path workload_dir(const std::string& workload) const;

private:
    std::filesystem::path workloads_dir_;
    std::filesystem::path package_dir_;
    std::map<std::string, PackageArtifact> built_;
};

struct EngineOptions {
    // Run directory holding the journal; empty disables persistence.
    std::filesystem::path run_dir;
    std::function<void(const std::string&)> progress;
    // Called after each trial is persisted; used to inject faults in tests.
    std::function<void(const TrialResult&)> after_trial;
};

class ExperimentEngine {
public:
    ExperimentEngine(Provider& provider, EngineOptions options = {});

    // Runs every point of the plan (Cartesian product of its axes). Trials
    // already in the run journal for the same plan are reused, so a rerun
    // after a crash resumes at the first incomplete point. A point that
    // fails validation or deployment yields one point_failed entry and the
    // plan continues.
    std::vector<TrialResult> run_plan(const ExperimentPlan& plan, WorkloadCatalog& catalog);

private:
    DeploymentSpec spec_for(const ExperimentPlan& plan, const AxisPoint& point, const PackageArtifact& artifact) const;
    void note(const std::string& message) const;

    Provider& provider_;
    EngineOptions options_;
};

std::string plan_digest(const ExperimentPlan& plan);

// Loads the trials of the newest plan recorded in a run journal.
std::vector<TrialResult> load_run_results(const std::filesystem::path& run_dir, const ExperimentPlan& plan);

// Ready-made plans for the cold-start studies (language, memory, package
// size), the micro/macro benchmark memory sweeps and an HTTP throughput run.
std::vector<ExperimentPlan> builtin_sweeps();
ExperimentPlan builtin_sweep(const std::string& name);

// Package-size sweep variants: a 504.6 KB base plus 2.8, 21.9 and 48.6 MB of
// padding, each without and with import at initialization.
std::vector<SizeVariant> package_sweep_variants();
inline constexpr std::uint64_t kPackageSweepBaseBytes = 516710;  // 504.6 KiB

}  // namespace slsbench
