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

#include "slsbench/platform.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string_view>

#include "slsbench/error.hpp"

namespace slsbench {

// Generated from profiles/*.json at configure time.
std::vector<std::string_view> builtin_profile_documents();

namespace {

using nlohmann::json;

LanguageStatus status_from_string(const std::string& s) {
    if (s == "supported") return LanguageStatus::kSupported;
    if (s == "beta") return LanguageStatus::kBeta;
    if (s == "deprecated") return LanguageStatus::kDeprecated;
    fail(ErrorCode::kInvalidArgument, "unknown language status '" + s + "'");
}

const char* to_string(LanguageStatus s) {
    switch (s) {
        case LanguageStatus::kSupported: return "supported";
        case LanguageStatus::kBeta: return "beta";
        case LanguageStatus::kDeprecated: return "deprecated";
    }
    return "supported";
}

BillingMode billing_from_string(const std::string& s) {
    if (s == "allocated-memory") return BillingMode::kAllocatedMemory;
    if (s == "consumed-memory") return BillingMode::kConsumedMemory;
    fail(ErrorCode::kInvalidArgument, "unknown billing mode '" + s + "'");
}

template <typename T>
std::optional<T> optional_field(const json& doc, const char* key) {
    if (!doc.contains(key) || doc.at(key).is_null()) return std::nullopt;
    return doc.at(key).get<T>();
}

template <typename T>
void put_optional(json& doc, const char* key, const std::optional<T>& value) {
    if (value) doc[key] = *value;
}

std::string mb_string(double mb) {
    std::ostringstream os;
    os << mb << " MB";
    return os.str();
}

}  // namespace

std::vector<Mebibytes> PlatformProfile::memory_values() const {
    std::vector<Mebibytes> out;
    switch (memory_grid.kind) {
        case MemoryGrid::Kind::kStep:
            if (memory_grid.step_mb == 0) break;
            for (Mebibytes mb = memory_min_mb; mb <= memory_max_mb; mb += memory_grid.step_mb) {
                out.push_back(mb);
            }
            break;
        case MemoryGrid::Kind::kExplicit:
        case MemoryGrid::Kind::kFixed:
            out = memory_grid.values;
            std::sort(out.begin(), out.end());
            break;
    }
    return out;
}

bool PlatformProfile::on_grid(Mebibytes mb) const {
    switch (memory_grid.kind) {
        case MemoryGrid::Kind::kStep:
            return mb >= memory_min_mb && mb <= memory_max_mb && memory_grid.step_mb != 0 &&
                   (mb - memory_min_mb) % memory_grid.step_mb == 0;
        case MemoryGrid::Kind::kExplicit:
        case MemoryGrid::Kind::kFixed:
            return std::find(memory_grid.values.begin(), memory_grid.values.end(), mb) !=
                   memory_grid.values.end();
    }
    return false;
}

const LanguageSupport* PlatformProfile::find_language(const std::string& lang) const {
    for (const auto& l : languages) {
        if (l.name == lang) return &l;
    }
    return nullptr;
}

void PlatformProfile::check() const {
    auto bad = [&](const std::string& what) {
        fail(ErrorCode::kInvalidArgument, "profile '" + name + "': " + what);
    };
    if (name.empty()) bad("empty name");
    if (memory_min_mb == 0 || memory_min_mb > memory_max_mb) bad("memory_min_mb must be in (0, memory_max_mb]");
    if (memory_grid.kind == MemoryGrid::Kind::kStep && memory_grid.step_mb == 0) bad("zero memory step");
    if (memory_grid.kind == MemoryGrid::Kind::kFixed && memory_grid.values.size() != 1) bad("fixed grid needs exactly one value");
    if (memory_grid.kind == MemoryGrid::Kind::kExplicit && memory_grid.values.empty()) bad("empty explicit grid");
    for (auto mb : memory_grid.values) {
        if (mb < memory_min_mb || mb > memory_max_mb) bad("grid value " + std::to_string(mb) + " outside [min, max]");
    }
    if (cpu_full_share_at_mb &&
        (*cpu_full_share_at_mb < memory_min_mb || *cpu_full_share_at_mb > memory_max_mb)) {
        bad("cpu_full_share_at_mb outside [min, max]");
    }
    if (cpu_share_cap && *cpu_share_cap <= 0) bad("cpu_share_cap must be positive");
    if (package_zip_limit_bytes && *package_zip_limit_bytes == 0) bad("zero zip limit");
    if (package_unzipped_limit_bytes && *package_unzipped_limit_bytes == 0) bad("zero unzipped limit");
    if (payload_limit_bytes && *payload_limit_bytes == 0) bad("zero payload limit");
    if (process_limit && *process_limit == 0) bad("zero process limit");
    if (fd_limit && *fd_limit == 0) bad("zero fd limit");
    if (!(timeout_max_s > 0)) bad("timeout_max_s must be positive");
    if (local_disk_mb == 0) bad("local_disk_mb must be positive");
    if (instance_concurrency == 0) bad("instance_concurrency must be positive");
    if (instance_limit == 0) bad("instance_limit must be positive");
}

LanguageRef LanguageRef::parse(const std::string& text) {
    auto colon = text.find(':');
    if (colon == std::string::npos) return {text, ""};
    return {text.substr(0, colon), text.substr(colon + 1)};
}

bool DeploymentSpec::operator==(const DeploymentSpec& o) const {
    return language.name == o.language.name && language.version == o.language.version &&
           memory_mb == o.memory_mb && timeout_s == o.timeout_s && region == o.region &&
           package.digest == o.package.digest && package.zip_bytes == o.package.zip_bytes &&
           package.unzipped_bytes == o.package.unzipped_bytes && trigger == o.trigger &&
           env_marker == o.env_marker;
}

bool ValidationReport::has(const std::string& kind) const {
    return std::any_of(violations.begin(), violations.end(),
                       [&](const Violation& v) { return v.kind == kind; });
}

std::vector<PlatformProfile> builtin_profiles() {
    std::vector<PlatformProfile> out;
    for (auto doc : builtin_profile_documents()) {
        out.push_back(profile_from_json(json::parse(doc)));
    }
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return a.name < b.name; });
    return out;
}

PlatformProfile builtin_profile(const std::string& name) {
    for (auto& p : builtin_profiles()) {
        if (p.name == name) return p;
    }
    fail(ErrorCode::kNotFound, "unknown platform '" + name + "'");
}

ValidationReport validate(const PlatformProfile& profile, const DeploymentSpec& spec) {
    ValidationReport report;
    auto violate = [&](std::string kind, std::string message) {
        report.violations.push_back({std::move(kind), std::move(message)});
    };

    if (const auto* lang = profile.find_language(spec.language.name); lang == nullptr) {
        violate("language-unsupported",
                "language '" + spec.language.name + "' is not supported on " + profile.name);
    } else {
        if (!spec.language.version.empty() &&
            std::find(lang->versions.begin(), lang->versions.end(), spec.language.version) ==
                lang->versions.end()) {
            violate("language-unsupported", "language version '" + spec.language.str() +
                                                "' is not supported on " + profile.name);
        }
        if (lang->status != LanguageStatus::kSupported) {
            report.warnings.push_back("language '" + lang->name + "' is " + to_string(lang->status) +
                                      " on " + profile.name);
        }
    }

    if (profile.memory_grid.kind == MemoryGrid::Kind::kFixed) {
        if (spec.memory_mb != profile.memory_grid.values.front()) {
            report.warnings.push_back("memory is not selectable on " + profile.name + "; functions run with " +
                                      std::to_string(profile.memory_grid.values.front()) + " MB");
        }
    } else if (spec.memory_mb < profile.memory_min_mb || spec.memory_mb > profile.memory_max_mb) {
        violate("memory-out-of-range", "memory " + std::to_string(spec.memory_mb) + " MB outside [" +
                                           std::to_string(profile.memory_min_mb) + ", " +
                                           std::to_string(profile.memory_max_mb) + "] MB");
    } else if (!profile.on_grid(spec.memory_mb)) {
        violate("memory-off-grid", "memory " + std::to_string(spec.memory_mb) + " MB is not a selectable size on " +
                                       profile.name);
    }

    if (spec.timeout_s > profile.timeout_max_s) {
        std::ostringstream os;
        os << "timeout " << spec.timeout_s << " s exceeds limit " << profile.timeout_max_s << " s";
        violate("timeout-exceeded", os.str());
    }
    if (profile.package_zip_limit_bytes && spec.package.zip_bytes > *profile.package_zip_limit_bytes) {
        violate("zip-size-exceeded",
                "compressed package " + mb_string(double(spec.package.zip_bytes) / kBytesPerMiB) +
                    " exceeds limit " + mb_string(double(*profile.package_zip_limit_bytes) / kBytesPerMiB));
    }
    if (profile.package_unzipped_limit_bytes &&
        spec.package.unzipped_bytes > *profile.package_unzipped_limit_bytes) {
        violate("unzipped-size-exceeded",
                "uncompressed package " + mb_string(double(spec.package.unzipped_bytes) / kBytesPerMiB) +
                    " exceeds limit " + mb_string(double(*profile.package_unzipped_limit_bytes) / kBytesPerMiB));
    }
    if (!spec.region.empty() &&
        std::find(profile.regions.begin(), profile.regions.end(), spec.region) == profile.regions.end()) {
        violate("region-unknown", "region '" + spec.region + "' is not offered by " + profile.name);
    }
    return report;
}

MemorySnap snap_memory(const PlatformProfile& profile, double requested_mb) {
    if (!(requested_mb > 0)) {
        fail(ErrorCode::kInvalidArgument, "requested memory must be positive");
    }
    if (profile.memory_grid.kind == MemoryGrid::Kind::kFixed) {
        return {profile.memory_grid.values.front(), true};
    }
    if (requested_mb > profile.memory_max_mb) {
        fail(ErrorCode::kNoValidMemory, "no selectable memory size >= " + mb_string(requested_mb) + " on " +
                                            profile.name);
    }
    if (profile.memory_grid.kind == MemoryGrid::Kind::kStep) {
        if (requested_mb <= profile.memory_min_mb) return {profile.memory_min_mb, false};
        const double steps = std::ceil((requested_mb - profile.memory_min_mb) / profile.memory_grid.step_mb);
        const auto mb = profile.memory_min_mb + static_cast<Mebibytes>(steps) * profile.memory_grid.step_mb;
        if (mb > profile.memory_max_mb) {
            fail(ErrorCode::kNoValidMemory, "no selectable memory size >= " + mb_string(requested_mb) + " on " +
                                                profile.name);
        }
        return {mb, false};
    }
    for (auto mb : profile.memory_values()) {
        if (mb >= requested_mb) return {mb, false};
    }
    fail(ErrorCode::kNoValidMemory, "no selectable memory size >= " + mb_string(requested_mb) + " on " + profile.name);
}

double cpu_share(const PlatformProfile& profile, Mebibytes memory_mb) {
    if (!profile.cpu_full_share_at_mb) {
        fail(ErrorCode::kUnsupported, "platform '" + profile.name + "' does not state a memory-to-CPU mapping");
    }
    if (!profile.on_grid(memory_mb)) {
        fail(ErrorCode::kPrecondition, std::to_string(memory_mb) + " MB is not a selectable size on " + profile.name);
    }
    const double full = *profile.cpu_full_share_at_mb;
    const double cap = profile.cpu_share_cap.value_or(profile.memory_max_mb / full);
    return std::min(memory_mb / full, cap);
}

double estimate_cost(const PlatformProfile& profile, Mebibytes memory_mb, double duration_s, double consumed_mb,
                     std::uint64_t invocations, const std::optional<RateCard>& rate_card) {
    if (!rate_card) {
        fail(ErrorCode::kConfiguration, "no rate card configured for platform '" + profile.name + "'");
    }
    const double billed_mb =
        profile.billing_mode == BillingMode::kAllocatedMemory ? static_cast<double>(memory_mb) : consumed_mb;
    return billed_mb / 1024.0 * duration_s * rate_card->per_gb_second +
           static_cast<double>(invocations) * rate_card->per_invocation;
}

PlatformProfile profile_from_json(const json& doc) {
    PlatformProfile p;
    try {
        p.name = doc.at("name").get<std::string>();
        for (const auto& l : doc.value("languages", json::array())) {
            LanguageSupport ls;
            ls.name = l.at("name").get<std::string>();
            ls.versions = l.value("versions", std::vector<std::string>{});
            ls.status = status_from_string(l.value("status", std::string("supported")));
            p.languages.push_back(std::move(ls));
        }
        const auto& grid = doc.at("memory_grid");
        if (grid.contains("fixed_mb")) {
            p.memory_grid.kind = MemoryGrid::Kind::kFixed;
            p.memory_grid.values = {grid.at("fixed_mb").get<Mebibytes>()};
        } else if (grid.contains("values")) {
            p.memory_grid.kind = MemoryGrid::Kind::kExplicit;
            p.memory_grid.values = grid.at("values").get<std::vector<Mebibytes>>();
        } else {
            p.memory_grid.kind = MemoryGrid::Kind::kStep;
            p.memory_grid.step_mb = grid.at("step_mb").get<Mebibytes>();
        }
        p.memory_min_mb = doc.at("memory_min_mb").get<Mebibytes>();
        p.memory_max_mb = doc.at("memory_max_mb").get<Mebibytes>();
        p.cpu_full_share_at_mb = optional_field<double>(doc, "cpu_full_share_at_mb");
        p.cpu_share_cap = optional_field<double>(doc, "cpu_share_cap");
        p.package_zip_limit_bytes = optional_field<std::uint64_t>(doc, "package_zip_limit_bytes");
        p.package_unzipped_limit_bytes = optional_field<std::uint64_t>(doc, "package_unzipped_limit_bytes");
        p.timeout_max_s = doc.at("timeout_max_s").get<double>();
        p.payload_limit_bytes = optional_field<std::uint64_t>(doc, "payload_limit_bytes");
        p.process_limit = optional_field<std::uint32_t>(doc, "process_limit");
        p.fd_limit = optional_field<std::uint32_t>(doc, "fd_limit");
        p.local_disk_mb = doc.at("local_disk_mb").get<Mebibytes>();
        p.instance_concurrency = doc.value("instance_concurrency", 1u);
        p.instance_limit = doc.at("instance_limit").get<std::uint32_t>();
        p.regions = doc.value("regions", std::vector<std::string>{});
        p.runtime_os = doc.value("runtime_os", std::vector<std::string>{});
        p.billing_mode = billing_from_string(doc.value("billing_mode", std::string("allocated-memory")));
        p.notes = doc.value("notes", std::string());
    } catch (const json::exception& e) {
        fail(ErrorCode::kInvalidArgument, std::string("malformed profile document: ") + e.what());
    }
    p.check();
    return p;
}

json to_json(const PlatformProfile& p) {
    json doc;
    doc["name"] = p.name;
    doc["languages"] = json::array();
    for (const auto& l : p.languages) {
        doc["languages"].push_back({{"name", l.name}, {"versions", l.versions}, {"status", to_string(l.status)}});
    }
    doc["memory_min_mb"] = p.memory_min_mb;
    doc["memory_max_mb"] = p.memory_max_mb;
    switch (p.memory_grid.kind) {
        case MemoryGrid::Kind::kStep: doc["memory_grid"] = {{"step_mb", p.memory_grid.step_mb}}; break;
        case MemoryGrid::Kind::kExplicit: doc["memory_grid"] = {{"values", p.memory_grid.values}}; break;
        case MemoryGrid::Kind::kFixed: doc["memory_grid"] = {{"fixed_mb", p.memory_grid.values.front()}}; break;
    }
    put_optional(doc, "cpu_full_share_at_mb", p.cpu_full_share_at_mb);
    put_optional(doc, "cpu_share_cap", p.cpu_share_cap);
    put_optional(doc, "package_zip_limit_bytes", p.package_zip_limit_bytes);
    put_optional(doc, "package_unzipped_limit_bytes", p.package_unzipped_limit_bytes);
    doc["timeout_max_s"] = p.timeout_max_s;
    put_optional(doc, "payload_limit_bytes", p.payload_limit_bytes);
    put_optional(doc, "process_limit", p.process_limit);
    put_optional(doc, "fd_limit", p.fd_limit);
    doc["local_disk_mb"] = p.local_disk_mb;
    doc["instance_concurrency"] = p.instance_concurrency;
    doc["instance_limit"] = p.instance_limit;
    doc["regions"] = p.regions;
    doc["runtime_os"] = p.runtime_os;
    doc["billing_mode"] = to_string(p.billing_mode);
    if (!p.notes.empty()) doc["notes"] = p.notes;
    return doc;
}

std::vector<PlatformProfile> apply_overlay(const std::vector<PlatformProfile>& profiles, const json& overlay) {
    if (!overlay.is_object()) {
        fail(ErrorCode::kConfiguration, "profile overlay must map platform names to documents");
    }
    std::vector<PlatformProfile> out;
    for (const auto& p : profiles) {
        if (!overlay.contains(p.name)) {
            out.push_back(p);
            continue;
        }
        json doc = to_json(p);
        const auto& patch = overlay.at(p.name);
        // A grid in the overlay replaces the grid wholesale; mixing step and
        // explicit keys would be ambiguous.
        if (patch.contains("memory_grid")) doc.erase("memory_grid");
        doc.merge_patch(patch);
        doc["name"] = p.name;
        out.push_back(profile_from_json(doc));
    }
    for (const auto& [name, doc] : overlay.items()) {
        bool known = std::any_of(profiles.begin(), profiles.end(), [&](const auto& p) { return p.name == name; });
        if (!known) {
            json full = doc;
            full["name"] = name;
            out.push_back(profile_from_json(full));
        }
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
    return out;
}

std::vector<PlatformProfile> load_profiles_dir(const std::string& dir) {
    namespace fs = std::filesystem;
    std::vector<PlatformProfile> out;
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) fail(ErrorCode::kIo, "profiles directory '" + dir + "' not found");
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
        std::ifstream in(f);
        try {
            out.push_back(profile_from_json(json::parse(in)));
        } catch (const json::exception& e) {
            fail(ErrorCode::kInvalidArgument, f.string() + ": " + e.what());
        }
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
    return out;
}

const char* to_string(Trigger t) {
    switch (t) {
        case Trigger::kHttp: return "http";
        case Trigger::kTimer: return "timer";
        case Trigger::kStorage: return "storage";
    }
    return "http";
}

Trigger trigger_from_string(const std::string& s) {
    if (s == "http") return Trigger::kHttp;
    if (s == "timer") return Trigger::kTimer;
    if (s == "storage") return Trigger::kStorage;
    fail(ErrorCode::kInvalidArgument, "unknown trigger '" + s + "'");
}

const char* to_string(BillingMode m) {
    return m == BillingMode::kAllocatedMemory ? "allocated-memory" : "consumed-memory";
}

json to_json(const DeploymentSpec& s) {
    return {{"language", s.language.str()},
            {"memory_mb", s.memory_mb},
            {"timeout_s", s.timeout_s},
            {"region", s.region},
            {"package",
             {{"digest", s.package.digest}, {"zip_bytes", s.package.zip_bytes},
              {"unzipped_bytes", s.package.unzipped_bytes}}},
            {"trigger", to_string(s.trigger)},
            {"env_marker", s.env_marker}};
}

DeploymentSpec spec_from_json(const json& doc) {
    DeploymentSpec s;
    s.language = LanguageRef::parse(doc.at("language").get<std::string>());
    s.memory_mb = doc.value("memory_mb", 128u);
    s.timeout_s = doc.value("timeout_s", 60.0);
    s.region = doc.value("region", std::string());
    if (doc.contains("package")) {
        const auto& pk = doc.at("package");
        s.package.digest = pk.value("digest", std::string());
        s.package.zip_bytes = pk.value("zip_bytes", std::uint64_t{0});
        s.package.unzipped_bytes = pk.value("unzipped_bytes", std::uint64_t{0});
    }
    s.trigger = trigger_from_string(doc.value("trigger", std::string("http")));
    s.env_marker = doc.value("env_marker", std::string());
    if (s.memory_mb == 0 || !(s.timeout_s > 0)) {
        fail(ErrorCode::kInvalidArgument, "deployment spec needs positive memory and timeout");
    }
    return s;
}

json to_json(const ValidationReport& r) {
    json doc;
    doc["accepted"] = r.accepted();
    doc["violations"] = json::array();
    for (const auto& v : r.violations) doc["violations"].push_back({{"kind", v.kind}, {"message", v.message}});
    doc["warnings"] = r.warnings;
    return doc;
}

}  // namespace slsbench
