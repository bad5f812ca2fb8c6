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

#include "slsbench/packaging.hpp"

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <fstream>
#include <iterator>
#include <random>

#include "slsbench/digest.hpp"
#include "slsbench/error.hpp"
#include "slsbench/zip_archive.hpp"

namespace slsbench {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr std::uint64_t kPaddingSeed = 0x5e1b'e4c4'0d5e'edULL;

std::vector<std::uint8_t> read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) fail(ErrorCode::kIo, "cannot read '" + p.string() + "'");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<std::uint8_t> manifest_bytes(const WorkloadManifest& m) {
    const auto text = serialize_manifest(m);
    return {text.begin(), text.end()};
}

std::vector<zip::Entry> collect_tree(const fs::path& dir) {
    std::vector<zip::Entry> entries;
    std::error_code ec;
    fs::recursive_directory_iterator it(dir, ec);
    if (ec) fail(ErrorCode::kIo, "cannot read workload directory '" + dir.string() + "': " + ec.message());
    for (; it != fs::recursive_directory_iterator(); it.increment(ec)) {
        if (ec) fail(ErrorCode::kIo, "cannot read workload directory '" + dir.string() + "': " + ec.message());
        if (!it->is_regular_file()) continue;
        auto rel = fs::relative(it->path(), dir).generic_string();
        if (rel == kManifestFileName) continue;
        const auto perms = it->status().permissions();
        const bool exec = (perms & fs::perms::owner_exec) != fs::perms::none;
        entries.push_back({std::move(rel), read_file(it->path()), exec ? 0755u : 0644u});
    }
    return entries;
}

PackageArtifact write_package(std::vector<zip::Entry> entries, const WorkloadManifest& manifest,
                              const fs::path& out_dir) {
    entries.push_back({kManifestFileName, manifest_bytes(manifest), 0644});
    std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return a.path < b.path; });

    std::uint64_t unzipped = 0;
    for (const auto& e : entries) unzipped += e.data.size();

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) fail(ErrorCode::kIo, "cannot create '" + out_dir.string() + "': " + ec.message());
    static std::atomic<std::uint64_t> build_counter{0};
    const auto tmp = out_dir / (manifest.id + "." + std::to_string(::getpid()) + "." +
                                std::to_string(build_counter++) + ".partial");
    zip::write_archive(tmp, entries);
    const auto digest = sha256_file(tmp);
    const auto final_path = out_dir / (manifest.id + "-" + digest.substr(0, 16) + ".zip");
    fs::rename(tmp, final_path, ec);
    if (ec) fail(ErrorCode::kIo, "cannot move archive into place: " + ec.message());

    PackageArtifact a;
    a.manifest = manifest;
    a.archive_path = final_path;
    a.zip_bytes = fs::file_size(final_path);
    a.unzipped_bytes = unzipped;
    a.content_digest = digest;
    return a;
}

}  // namespace

bool WorkloadManifest::builtin_handler() const { return handler.rfind(kBuiltinHandlerPrefix, 0) == 0; }

std::string WorkloadManifest::handler_file() const {
    const auto colon = handler.find(':');
    return colon == std::string::npos ? handler : handler.substr(0, colon);
}

void WorkloadManifest::check() const {
    if (id.empty()) fail(ErrorCode::kInvalidArgument, "manifest id must be non-empty");
    if (handler.empty()) fail(ErrorCode::kInvalidArgument, "manifest '" + id + "' has an empty handler");
    if (language.name.empty()) fail(ErrorCode::kInvalidArgument, "manifest '" + id + "' has no language");
}

std::uint64_t PackageArtifact::imported_bytes() const {
    std::uint64_t n = 0;
    for (const auto& d : manifest.dependencies) {
        if (d.import_at_init) n += d.bytes;
    }
    return n;
}

std::string serialize_manifest(const WorkloadManifest& m) { return to_json(m).dump(2) + "\n"; }

json to_json(const WorkloadManifest& m) {
    json deps = json::array();
    for (const auto& d : m.dependencies) {
        deps.push_back({{"name", d.name}, {"bytes", d.bytes}, {"import_at_init", d.import_at_init}});
    }
    return {{"id", m.id},
            {"language", m.language.str()},
            {"handler", m.handler},
            {"trigger", to_string(m.trigger)},
            {"params", m.params},
            {"dependencies", deps},
            {"expected_output_schema", m.expected_output_schema}};
}

WorkloadManifest manifest_from_json(const json& doc) {
    WorkloadManifest m;
    try {
        m.id = doc.at("id").get<std::string>();
        m.language = LanguageRef::parse(doc.at("language").get<std::string>());
        m.handler = doc.at("handler").get<std::string>();
        m.trigger = trigger_from_string(doc.value("trigger", std::string("http")));
        m.params = doc.value("params", json::object());
        for (const auto& d : doc.value("dependencies", json::array())) {
            const auto bytes = d.value("bytes", std::int64_t{0});
            if (bytes < 0) fail(ErrorCode::kInvalidArgument, "dependency sizes must be >= 0");
            m.dependencies.push_back(
                {d.at("name").get<std::string>(), static_cast<std::uint64_t>(bytes), d.value("import_at_init", false)});
        }
        m.expected_output_schema = doc.value("expected_output_schema", std::vector<std::string>{});
    } catch (const json::exception& e) {
        fail(ErrorCode::kInvalidArgument, std::string("malformed workload manifest: ") + e.what());
    }
    m.check();
    return m;
}

WorkloadManifest load_manifest(const fs::path& workload_dir) {
    const auto path = workload_dir / kManifestFileName;
    std::ifstream in(path);
    if (!in) fail(ErrorCode::kNotFound, "no " + std::string(kManifestFileName) + " in '" + workload_dir.string() + "'");
    try {
        return manifest_from_json(json::parse(in));
    } catch (const json::parse_error& e) {
        fail(ErrorCode::kInvalidArgument, path.string() + ": " + e.what());
    }
}

json to_json(const PackageArtifact& a) {
    return {{"manifest", to_json(a.manifest)},
            {"archive_path", a.archive_path.string()},
            {"zip_bytes", a.zip_bytes},
            {"unzipped_bytes", a.unzipped_bytes},
            {"content_digest", a.content_digest},
            {"label", a.label}};
}

PackageArtifact artifact_from_json(const json& doc) {
    PackageArtifact a;
    a.manifest = manifest_from_json(doc.at("manifest"));
    a.archive_path = doc.at("archive_path").get<std::string>();
    a.zip_bytes = doc.at("zip_bytes").get<std::uint64_t>();
    a.unzipped_bytes = doc.at("unzipped_bytes").get<std::uint64_t>();
    a.content_digest = doc.at("content_digest").get<std::string>();
    a.label = doc.value("label", std::string("base"));
    return a;
}

PackageArtifact build_package(const fs::path& workload_dir, const WorkloadManifest& manifest, const fs::path& out_dir) {
    manifest.check();
    std::error_code ec;
    if (!fs::is_directory(workload_dir, ec)) {
        fail(ErrorCode::kIo, "workload directory '" + workload_dir.string() + "' is not readable");
    }
    if (!manifest.builtin_handler() && !fs::is_regular_file(workload_dir / manifest.handler_file(), ec)) {
        fail(ErrorCode::kNotFound,
             "handler file '" + manifest.handler_file() + "' missing from '" + workload_dir.string() + "'");
    }
    return write_package(collect_tree(workload_dir), manifest, out_dir);
}

std::vector<std::uint8_t> padding_bytes(std::uint64_t n) {
    std::vector<std::uint8_t> out(n);
    std::mt19937_64 rng(kPaddingSeed);
    std::uint64_t i = 0;
    for (; i + 8 <= n; i += 8) {
        auto v = rng();
        for (int k = 0; k < 8; ++k) out[i + k] = static_cast<std::uint8_t>(v >> (8 * k));
    }
    for (auto v = rng(); i < n; ++i, v >>= 8) out[i] = static_cast<std::uint8_t>(v);
    return out;
}

std::vector<PackageArtifact> make_size_variants(const PackageArtifact& base, const std::vector<SizeVariant>& variants,
                                                const fs::path& out_dir) {
    for (const auto& v : variants) {
        if (v.padding_bytes < 0) {
            fail(ErrorCode::kInvalidArgument, "variant '" + v.label + "' has negative padding");
        }
    }
    std::vector<zip::Entry> base_entries;
    bool loaded = false;
    std::vector<PackageArtifact> out;
    for (const auto& v : variants) {
        if (v.padding_bytes == 0) {
            PackageArtifact a = base;
            a.label = v.label;
            out.push_back(std::move(a));
            continue;
        }
        if (!loaded) {
            base_entries = zip::read_archive(base.archive_path);
            std::erase_if(base_entries, [](const auto& e) { return e.path == kManifestFileName; });
            loaded = true;
        }
        auto entries = base_entries;
        entries.push_back({"deps/" + v.label + "/payload.bin", padding_bytes(static_cast<std::uint64_t>(v.padding_bytes)),
                           0644});
        WorkloadManifest m = base.manifest;
        m.dependencies.push_back({"padding-" + v.label, static_cast<std::uint64_t>(v.padding_bytes), v.import_at_init});
        auto a = write_package(std::move(entries), m, out_dir);
        a.label = v.label;
        out.push_back(std::move(a));
    }
    return out;
}

}  // namespace slsbench
