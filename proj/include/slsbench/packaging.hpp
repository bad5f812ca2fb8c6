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
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "slsbench/platform.hpp"

namespace slsbench {

inline constexpr const char* kManifestFileName = "workload.manifest";
// Handlers with this prefix are provided by the local simulator and need no
// file in the workload directory.
inline constexpr const char* kBuiltinHandlerPrefix = "builtin:";

struct Dependency {
    std::string name;
    std::uint64_t bytes = 0;
    bool import_at_init = false;
};

struct WorkloadManifest {
    std::string id;
    LanguageRef language;
    std::string handler;
    Trigger trigger = Trigger::kHttp;
    nlohmann::json params = nlohmann::json::object();
    std::vector<Dependency> dependencies;
    std::vector<std::string> expected_output_schema;

    bool builtin_handler() const;
    // Path part of the handler ("file" in "file:function").
    std::string handler_file() const;
    void check() const;
};

struct PackageArtifact {
    WorkloadManifest manifest;
    std::filesystem::path archive_path;
    std::uint64_t zip_bytes = 0;
    std::uint64_t unzipped_bytes = 0;
    std::string content_digest;
    // Variant label; not part of the archive so it never affects the digest.
    std::string label = "base";

    // Bytes of dependencies the handler loads during initialization.
    std::uint64_t imported_bytes() const;
    PackageRef ref() const { return {content_digest, zip_bytes, unzipped_bytes}; }
};

struct SizeVariant {
    std::string label;
    std::int64_t padding_bytes = 0;
    bool import_at_init = false;
};

nlohmann::json to_json(const WorkloadManifest& m);
// Exact bytes stored as workload.manifest inside an archive.
std::string serialize_manifest(const WorkloadManifest& m);
WorkloadManifest manifest_from_json(const nlohmann::json& doc);
WorkloadManifest load_manifest(const std::filesystem::path& workload_dir);

nlohmann::json to_json(const PackageArtifact& a);
PackageArtifact artifact_from_json(const nlohmann::json& doc);

// Builds a reproducible archive of workload_dir plus the serialized manifest
// into out_dir. Member order is sorted and timestamps are fixed, so identical
// trees yield identical digests. The input directory is never modified.
PackageArtifact build_package(const std::filesystem::path& workload_dir, const WorkloadManifest& manifest,
                              const std::filesystem::path& out_dir);

// One artifact per variant. Padding is an incompressible dependency directory
// deps/<label>/ of the requested size; a zero-padding variant reuses the base
// archive unchanged.
std::vector<PackageArtifact> make_size_variants(const PackageArtifact& base, const std::vector<SizeVariant>& variants,
                                                const std::filesystem::path& out_dir);

// Deterministic pseudo-random bytes (fixed seed).
std::vector<std::uint8_t> padding_bytes(std::uint64_t n);

}  // namespace slsbench
