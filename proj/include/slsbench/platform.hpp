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
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace slsbench {

using Mebibytes = std::uint32_t;

inline constexpr std::uint64_t kBytesPerMiB = 1024ull * 1024ull;

enum class LanguageStatus { kSupported, kBeta, kDeprecated };

struct LanguageSupport {
    std::string name;
    std::vector<std::string> versions;
    LanguageStatus status = LanguageStatus::kSupported;
};

struct MemoryGrid {
    enum class Kind { kStep, kExplicit, kFixed };

    Kind kind = Kind::kStep;
    Mebibytes step_mb = 0;
    // Explicit grid values, or the single fixed value.
    std::vector<Mebibytes> values;
};

enum class BillingMode { kAllocatedMemory, kConsumedMemory };

enum class Trigger { kHttp, kTimer, kStorage };

// Limits and scaling rules of one platform. Optional limits are absent when
// no value is known; validation skips them.
struct PlatformProfile {
    std::string name;
    std::vector<LanguageSupport> languages;
    Mebibytes memory_min_mb = 0;
    Mebibytes memory_max_mb = 0;
    MemoryGrid memory_grid;
    std::optional<double> cpu_full_share_at_mb;
    // Upper bound on cpu_share; defaults to memory_max_mb / cpu_full_share_at_mb.
    std::optional<double> cpu_share_cap;
    std::optional<std::uint64_t> package_zip_limit_bytes;
    std::optional<std::uint64_t> package_unzipped_limit_bytes;
    double timeout_max_s = 0;
    std::optional<std::uint64_t> payload_limit_bytes;
    std::optional<std::uint32_t> process_limit;
    std::optional<std::uint32_t> fd_limit;
    Mebibytes local_disk_mb = 0;
    std::uint32_t instance_concurrency = 1;
    std::uint32_t instance_limit = 0;
    std::vector<std::string> regions;
    std::vector<std::string> runtime_os;
    BillingMode billing_mode = BillingMode::kAllocatedMemory;
    std::string notes;

    // Every selectable memory size in ascending order.
    std::vector<Mebibytes> memory_values() const;
    bool on_grid(Mebibytes mb) const;
    const LanguageSupport* find_language(const std::string& name) const;
    // Throws kInvalidArgument when an invariant does not hold.
    void check() const;
};

struct LanguageRef {
    std::string name;
    std::string version;  // empty: any version the profile lists

    // Parses "name" or "name:version".
    static LanguageRef parse(const std::string& text);
    std::string str() const { return version.empty() ? name : name + ":" + version; }
};

struct PackageRef {
    std::string digest;
    std::uint64_t zip_bytes = 0;
    std::uint64_t unzipped_bytes = 0;
};

struct DeploymentSpec {
    LanguageRef language;
    Mebibytes memory_mb = 128;
    double timeout_s = 60;
    std::string region;  // empty: provider default
    PackageRef package;
    Trigger trigger = Trigger::kHttp;
    // Changing the marker changes the deployment identity; used to force a
    // fresh function on providers that cannot evict instances.
    std::string env_marker;

    bool operator==(const DeploymentSpec& other) const;
};

struct Violation {
    std::string kind;
    std::string message;
};

struct ValidationReport {
    std::vector<Violation> violations;
    std::vector<std::string> warnings;

    bool accepted() const { return violations.empty(); }
    bool has(const std::string& kind) const;
};

struct MemorySnap {
    Mebibytes mb = 0;
    // Set when the platform does not let the caller choose memory.
    bool fixed_warning = false;
};

struct RateCard {
    double per_gb_second = 0;
    double per_invocation = 0;
};

std::vector<PlatformProfile> builtin_profiles();
PlatformProfile builtin_profile(const std::string& name);

ValidationReport validate(const PlatformProfile& profile, const DeploymentSpec& spec);

MemorySnap snap_memory(const PlatformProfile& profile, double requested_mb);

double cpu_share(const PlatformProfile& profile, Mebibytes memory_mb);

double estimate_cost(const PlatformProfile& profile, Mebibytes memory_mb, double duration_s,
                     double consumed_mb, std::uint64_t invocations,
                     const std::optional<RateCard>& rate_card);

// Profile documents.
PlatformProfile profile_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const PlatformProfile& profile);
// Field-wise merge, overlay wins. The overlay maps profile names to partial
// profile documents; unknown names add new profiles.
std::vector<PlatformProfile> apply_overlay(const std::vector<PlatformProfile>& profiles,
                                           const nlohmann::json& overlay);
std::vector<PlatformProfile> load_profiles_dir(const std::string& dir);

nlohmann::json to_json(const DeploymentSpec& spec);
DeploymentSpec spec_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const ValidationReport& report);

const char* to_string(Trigger trigger);
Trigger trigger_from_string(const std::string& text);
const char* to_string(BillingMode mode);

}  // namespace slsbench
