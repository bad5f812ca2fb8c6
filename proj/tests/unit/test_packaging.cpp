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

#include <doctest.h>

#include <sys/stat.h>

#include "slsbench/digest.hpp"
#include "slsbench/error.hpp"
#include "slsbench/packaging.hpp"
#include "slsbench/zip_archive.hpp"
#include "support.hpp"

using namespace slsbench;
using slsbench::testing::read_file;
using slsbench::testing::TempDir;
using slsbench::testing::write_file;
namespace fs = std::filesystem;

namespace {

WorkloadManifest echo_manifest() {
    WorkloadManifest m;
    m.id = "echo";
    m.language = {"python", "3.10"};
    m.handler = "handler.py:main";
    m.params = {{"n", 3}};
    m.dependencies = {{"numpy", 1000, true}, {"tools", 50, false}};
    m.expected_output_schema = {"result", "exec_ms"};
    return m;
}

void write_echo_workload(const fs::path& dir) {
    write_file(dir / "handler.py", "import json, sys\nprint(json.dumps({'result': 1, 'exec_ms': 0}))\n");
    write_file(dir / "lib" / "util.py", "X = 1\n");
}

}  // namespace

TEST_SUITE("packaging") {
    TEST_CASE("sha256 known vectors") {
        CHECK(sha256_hex(std::string_view("abc")) ==
              "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
        CHECK(sha256_hex(std::string_view("")) ==
              "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    }

    TEST_CASE("zip of 1 MiB of zeros round trips and compresses") {
        TempDir tmp("zip");
        std::vector<zip::Entry> entries = {{"zeros.bin", std::vector<std::uint8_t>(kBytesPerMiB, 0), 0644},
                                           {"run.sh", {'e', 'c', 'h', 'o'}, 0755}};
        const auto archive = tmp / "z.zip";
        zip::write_archive(archive, entries);
        CHECK(fs::file_size(archive) < 8 * 1024);
        const auto back = zip::read_archive(archive);
        REQUIRE(back.size() == 2);
        CHECK(back[0].path == "run.sh");
        CHECK(back[0].mode == 0755);
        CHECK(back[1].path == "zeros.bin");
        CHECK(back[1].data == entries[0].data);

        zip::extract_archive(archive, tmp / "x");
        CHECK(fs::file_size(tmp / "x" / "zeros.bin") == kBytesPerMiB);
        struct stat st {};
        REQUIRE(::stat((tmp / "x" / "run.sh").c_str(), &st) == 0);
        CHECK((st.st_mode & 0777) == 0755);
    }

    TEST_CASE("corrupt archives and escaping members are rejected") {
        TempDir tmp("zipbad");
        const auto archive = tmp / "z.zip";
        zip::write_archive(archive, {{"a.txt", {'h', 'e', 'l', 'l', 'o'}, 0644}});
        auto bytes = read_file(archive);
        bytes[bytes.find("hello")] = 'j';  // stored member: flips payload, CRC no longer matches
        write_file(tmp / "bad.zip", bytes);
        CHECK_THROWS_AS(zip::read_archive(tmp / "bad.zip"), Error);
        write_file(tmp / "junk.zip", "not a zip at all, definitely not");
        CHECK_THROWS_AS(zip::read_archive(tmp / "junk.zip"), Error);

        zip::write_archive(tmp / "evil.zip", {{"../evil.txt", {'x'}, 0644}});
        CHECK_THROWS_AS(zip::extract_archive(tmp / "evil.zip", tmp / "dest"), Error);
        CHECK_FALSE(fs::exists(tmp / "evil.txt"));
    }

    TEST_CASE("manifest documents round trip") {
        const auto m = echo_manifest();
        const auto back = manifest_from_json(to_json(m));
        CHECK(to_json(back) == to_json(m));
        CHECK(back.handler_file() == "handler.py");
        CHECK_FALSE(back.builtin_handler());
        auto bad = to_json(m);
        bad["dependencies"][0]["bytes"] = -5;
        CHECK_THROWS_AS(manifest_from_json(bad), Error);
        bad = to_json(m);
        bad.erase("handler");
        CHECK_THROWS_AS(manifest_from_json(bad), Error);
    }

    TEST_CASE("packaging is reproducible and content addressed") {
        TempDir tmp("pkg");
        const auto dir = tmp / "echo";
        write_echo_workload(dir);
        const auto a = build_package(dir, echo_manifest(), tmp / "out1");
        // Same tree, later mtimes, different output directory.
        fs::last_write_time(dir / "handler.py", fs::file_time_type::clock::now() + std::chrono::hours(1));
        const auto b = build_package(dir, echo_manifest(), tmp / "out2");
        CHECK(a.content_digest == b.content_digest);
        CHECK(read_file(a.archive_path) == read_file(b.archive_path));
        CHECK(sha256_file(a.archive_path) == a.content_digest);
        CHECK(a.zip_bytes == fs::file_size(a.archive_path));
        CHECK(a.imported_bytes() == 1000);
        CHECK_FALSE(fs::exists(dir / kManifestFileName));  // input untouched

        std::uint64_t unzipped = 0;
        bool has_manifest = false;
        for (const auto& e : zip::read_archive(a.archive_path)) {
            unzipped += e.data.size();
            if (e.path == kManifestFileName) {
                has_manifest = true;
                CHECK(std::string(e.data.begin(), e.data.end()) == serialize_manifest(echo_manifest()));
            }
        }
        CHECK(has_manifest);
        CHECK(a.unzipped_bytes == unzipped);

        write_file(dir / "lib" / "util.py", "X = 2\n");
        const auto c = build_package(dir, echo_manifest(), tmp / "out1");
        CHECK(c.content_digest != a.content_digest);

        CHECK(artifact_from_json(to_json(a)).content_digest == a.content_digest);
    }

    TEST_CASE("missing handler file is reported") {
        TempDir tmp("pkgbad");
        write_file(tmp / "w" / "other.py", "");
        try {
            build_package(tmp / "w", echo_manifest(), tmp / "out");
            FAIL("expected an error");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::kNotFound);
            CHECK(std::string(e.what()).find("handler.py") != std::string::npos);
        }
        CHECK_THROWS_AS(build_package(tmp / "absent", echo_manifest(), tmp / "out"), Error);
        CHECK_THROWS_AS(load_manifest(tmp / "w"), Error);
    }

    TEST_CASE("size variants add exact padding") {
        TempDir tmp("var");
        const auto dir = tmp / "echo";
        write_echo_workload(dir);
        const auto base = build_package(dir, echo_manifest(), tmp / "out");
        const auto variants = make_size_variants(
            base, {{"none", 0, false}, {"small", 100000, false}, {"small-imp", 100000, true}}, tmp / "out");
        REQUIRE(variants.size() == 3);
        CHECK(variants[0].content_digest == base.content_digest);
        CHECK(variants[0].label == "none");
        for (int i = 1; i < 3; ++i) {
            const auto& v = variants[static_cast<std::size_t>(i)];
            CHECK(v.content_digest != base.content_digest);
            // Padding is incompressible: the archive grows by at least the padding.
            CHECK(v.zip_bytes >= base.zip_bytes + 100000);
            const auto manifest_growth = serialize_manifest(v.manifest).size() - serialize_manifest(base.manifest).size();
            CHECK(v.unzipped_bytes == base.unzipped_bytes + 100000 + manifest_growth);
        }
        CHECK(variants[1].imported_bytes() == base.imported_bytes());
        CHECK(variants[2].imported_bytes() == base.imported_bytes() + 100000);
        CHECK_THROWS_AS(make_size_variants(base, {{"neg", -1, false}}, tmp / "out"), Error);

        const auto again = make_size_variants(base, {{"small", 100000, false}}, tmp / "out2");
        CHECK(again[0].content_digest == variants[1].content_digest);
    }

    TEST_CASE("padding bytes are deterministic") {
        CHECK(padding_bytes(37) == padding_bytes(37));
        CHECK(padding_bytes(0).empty());
        const auto a = padding_bytes(64);
        const auto b = padding_bytes(65);
        CHECK(std::equal(a.begin(), a.end(), b.begin()));
    }
}
