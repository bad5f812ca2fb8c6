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

#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "slsbench/provider.hpp"

namespace slsbench {

inline constexpr const char* kLocalSimProvider = "local-sim";
inline constexpr const char* kSyntheticHandler = "builtin:synthetic";

// Parameters of the additive cold-start model:
//   cold = base + runtime_init(language) + imported_bytes / bandwidth + mem_coeff / memory
// scaled by (1 + u), u ~ U[-jitter, jitter].
struct SimModel {
    // Keyed by platform name; "default" applies when no entry matches.
    std::map<std::string, double> base_ms{{"default", 0.0}};
    // Keyed by language name; missing languages contribute 0.
    std::map<std::string, double> runtime_init_ms;
    // 0 disables the package load term.
    double load_bandwidth_bytes_per_ms = 0;
    double mem_coeff_ms_mb = 0;
    double warm_overhead_ms = 0;
    double keepalive_s = 600;
    double jitter = 0;
    std::uint64_t seed = 0;
    // Interpreter per language for subprocess workloads.
    std::map<std::string, std::string> interpreters{{"python", "python3"}, {"nodejs", "node"}};
    // Behaviour when a function is at its instance limit: queue or reject.
    bool queue_at_instance_limit = true;

    double base_for(const std::string& platform) const;
    void check() const;
};

nlohmann::json to_json(const SimModel& m);
SimModel sim_model_from_json(const nlohmann::json& doc);
SimModel load_sim_model(const std::filesystem::path& file);

// Default model of the command line tool: Java cold starts about 7x Python,
// latency falling with memory, and a load bandwidth at which importing a
// 21.9 MB package makes a 128 MB Python cold start about 4.6x slower.
SimModel reference_sim_model();

// Jitter-free cold latency scaled by (1 + jitter_draw).
double sim_cold_latency(const SimModel& model, const std::string& platform, const DeploymentSpec& spec,
                        const PackageArtifact& artifact, double jitter_draw = 0.0);

// Seeded stream of draws uniform in [-epsilon, epsilon]. Uses only the raw
// mt19937_64 output so the sequence is identical across standard libraries.
class JitterStream {
public:
    JitterStream(std::uint64_t seed, double epsilon) : rng_(seed), epsilon_(epsilon) {}

    double next();
    std::string save() const;
    void restore(const std::string& state);

private:
    std::mt19937_64 rng_;
    double epsilon_;
};

enum class InstanceState { kInitializing, kWarm };

struct SimInstance {
    std::string instance_id;
    std::filesystem::path scratch_dir;
    std::int64_t born_at_ns = 0;
    std::int64_t last_used_at_ns = 0;
    // End times of executions that ran ahead of the current virtual time;
    // each occupies a slot until the clock reaches it.
    std::vector<std::int64_t> busy_until_ns;
    InstanceState state = InstanceState::kInitializing;
    std::uint32_t busy_slots = 0;
};

struct LocalSimOptions {
    std::filesystem::path scratch_root;  // empty: a fresh directory under the system temp dir
};

// In-process provider with a parameterised cold-start model and a keep-alive
// instance pool. Safe for concurrent invoke; pool admission is serialized,
// execution is not.
class LocalSimProvider final : public Provider {
public:
    LocalSimProvider(PlatformProfile profile, SimModel model, Clock& clock, LocalSimOptions options = {});
    ~LocalSimProvider() override;

    std::string name() const override { return kLocalSimProvider; }
    const PlatformProfile& profile() const override { return profile_; }
    Clock& clock() override { return clock_; }
    const SimModel& model() const { return model_; }

    InvocationRecord invoke(const DeploymentHandle& handle, const nlohmann::json& payload, double timeout_s) override;
    void teardown(const DeploymentHandle& handle) override;
    std::vector<LogLine> fetch_logs(const DeploymentHandle& handle, std::int64_t since_ns) override;
    DeploymentHandle force_cold(const DeploymentHandle& handle) override;

    // Drops every idle instance of the function without undeploying it.
    void evict(const DeploymentHandle& handle);

    std::size_t live_instances(const std::string& function_id) const;
    std::size_t peak_instances(const std::string& function_id) const;
    std::vector<std::filesystem::path> scratch_dirs(const std::string& function_id) const;
    const std::filesystem::path& scratch_root() const { return scratch_root_; }
    std::vector<DeploymentHandle> deployments() const;
    DeploymentHandle find(const std::string& function_id) const;

    // Persists deployments, warm instances, logs, the jitter stream and the
    // virtual clock so a later process can continue the same simulation.
    nlohmann::json save_state() const;
    void restore_state(const nlohmann::json& state);

protected:
    DeploymentHandle do_deploy(const PackageArtifact& artifact, const DeploymentSpec& spec) override;

private:
    struct Function {
        DeploymentHandle handle;
        PackageArtifact artifact;
        std::filesystem::path code_dir;
        std::vector<std::unique_ptr<SimInstance>> instances;
        std::vector<LogLine> logs;
        std::size_t peak_instances = 0;
        std::uint64_t next_seq = 0;
    };

    struct Admission {
        SimInstance* instance = nullptr;
        bool cold = false;
        double cold_ms = 0;
        std::uint64_t seq = 0;
    };

    Function& function_locked(const std::string& function_id);
    void reap_expired_locked(Function& fn, std::int64_t now);
    void remove_instance_locked(Function& fn, SimInstance* inst);
    Admission admit(const std::string& function_id, InvocationRecord& record);
    std::string run_synthetic(const Function& fn, const SimInstance& inst, const nlohmann::json& payload,
                              std::int64_t budget_ns, bool& timed_out);
    std::string run_subprocess(const Function& fn, const SimInstance& inst, const nlohmann::json& payload,
                               std::int64_t budget_ns, bool& timed_out, std::string& error);

    PlatformProfile profile_;
    SimModel model_;
    Clock& clock_;
    std::filesystem::path scratch_root_;
    bool owns_scratch_root_ = false;

    mutable std::mutex mu_;
    std::condition_variable slot_freed_;
    std::map<std::string, Function> functions_;
    JitterStream jitter_;
    std::uint64_t next_instance_ = 0;
};

// Writes a workload directory for the built-in synthetic workload. When
// target_unzipped_bytes is non-zero a filler file brings the package to that
// size (the handler never loads it).
void write_synthetic_workload(const std::filesystem::path& dir, std::uint64_t target_unzipped_bytes = 0);
WorkloadManifest synthetic_manifest();

}  // namespace slsbench
