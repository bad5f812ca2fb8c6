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

#include <random>

#include "slsbench/error.hpp"
#include "slsbench/platform.hpp"
#include "support.hpp"

using namespace slsbench;
using nlohmann::json;

namespace {

// 106.4 MB zip / 661.8 MB unzipped TensorFlow package, in bytes.
constexpr std::uint64_t kTfZipBytes = 1064ull * kBytesPerMiB / 10;
constexpr std::uint64_t kTfUnzippedBytes = 6618ull * kBytesPerMiB / 10;

DeploymentSpec minimal_spec() {
    DeploymentSpec s;
    s.language = {"python", ""};
    s.memory_mb = 128;
    s.timeout_s = 1;
    return s;
}

// Grid-enumeration oracle: smallest selectable value >= request.
std::optional<Mebibytes> oracle_snap(const PlatformProfile& p, double request) {
    for (auto v : p.memory_values()) {
        if (v >= request) return v;
    }
    return std::nullopt;
}

}  // namespace

TEST_SUITE("platform") {
    TEST_CASE("builtin profiles are the four platforms in name order") {
        const auto all = builtin_profiles();
        REQUIRE(all.size() == 4);
        CHECK(all[0].name == "alibaba");
        CHECK(all[1].name == "aws");
        CHECK(all[2].name == "azure");
        CHECK(all[3].name == "google");
        for (const auto& p : all) CHECK_NOTHROW(p.check());
    }

    TEST_CASE("aws limits") {
        const auto aws = builtin_profile("aws");
        CHECK(aws.memory_min_mb == 128);
        CHECK(aws.memory_max_mb == 3008);
        CHECK(aws.memory_grid.kind == MemoryGrid::Kind::kStep);
        CHECK(aws.memory_grid.step_mb == 64);
        CHECK(aws.timeout_max_s == 900);
        CHECK(*aws.package_zip_limit_bytes == 50 * kBytesPerMiB);
        CHECK(*aws.package_unzipped_limit_bytes == 250 * kBytesPerMiB);
        CHECK(aws.regions.size() == 20);
        CHECK(*aws.cpu_full_share_at_mb == 1792);
        CHECK(aws.memory_values().size() == (3008 - 128) / 64 + 1);
        CHECK_FALSE(aws.payload_limit_bytes.has_value());
        CHECK_FALSE(aws.process_limit.has_value());
        CHECK_FALSE(aws.fd_limit.has_value());
    }

    TEST_CASE("google, alibaba and azure limits") {
        const auto google = builtin_profile("google");
        CHECK(google.memory_values() == std::vector<Mebibytes>{128, 256, 512, 1024, 2048});
        CHECK(google.timeout_max_s == 540);
        CHECK(*google.package_zip_limit_bytes == 100 * kBytesPerMiB);
        CHECK(*google.package_unzipped_limit_bytes == 500 * kBytesPerMiB);
        CHECK(google.regions.size() == 19);

        const auto alibaba = builtin_profile("alibaba");
        CHECK(alibaba.memory_min_mb == 128);
        CHECK(alibaba.memory_max_mb == 3072);
        CHECK(alibaba.memory_grid.step_mb == 64);
        CHECK(*alibaba.cpu_full_share_at_mb == 1024);
        CHECK(alibaba.timeout_max_s == 600);
        CHECK(alibaba.instance_limit == 100);

        const auto azure = builtin_profile("azure");
        CHECK(azure.memory_grid.kind == MemoryGrid::Kind::kFixed);
        CHECK(azure.memory_values() == std::vector<Mebibytes>{1536});
        CHECK(azure.instance_limit == 200);
        CHECK(azure.billing_mode == BillingMode::kConsumedMemory);
        CHECK(azure.regions.size() == 32);
        CHECK(azure.notes.find("43") != std::string::npos);
        CHECK_FALSE(azure.package_zip_limit_bytes.has_value());
    }

    TEST_CASE("unknown platform") {
        CHECK_THROWS_AS(builtin_profile("ibm"), Error);
    }

    TEST_CASE("oversized TensorFlow package is rejected everywhere but azure") {
        DeploymentSpec spec = minimal_spec();
        spec.package = {"tf", kTfZipBytes, kTfUnzippedBytes};
        for (const auto& p : builtin_profiles()) {
            CAPTURE(p.name);
            const auto r = validate(p, spec);
            if (p.name == "azure") {
                CHECK(r.accepted());
            } else {
                CHECK(r.has("zip-size-exceeded"));
                CHECK(r.has("unzipped-size-exceeded"));
                CHECK(r.violations.size() == 2);
            }
        }
    }

    TEST_CASE("minimal spec is accepted by every profile") {
        for (const auto& p : builtin_profiles()) {
            CAPTURE(p.name);
            CHECK(validate(p, minimal_spec()).accepted());
        }
    }

    TEST_CASE("validation reports each violated constraint") {
        const auto aws = builtin_profile("aws");
        DeploymentSpec spec = minimal_spec();
        spec.language = {"cobol", ""};
        spec.memory_mb = 130;
        spec.timeout_s = 901;
        spec.region = "mars-north-1";
        const auto r = validate(aws, spec);
        CHECK(r.has("language-unsupported"));
        CHECK(r.has("memory-off-grid"));
        CHECK(r.has("timeout-exceeded"));
        CHECK(r.has("region-unknown"));
        CHECK(r.violations.size() == 4);

        spec = minimal_spec();
        spec.memory_mb = 4096;
        CHECK(validate(aws, spec).has("memory-out-of-range"));
        spec = minimal_spec();
        spec.language = LanguageRef::parse("python:1.0");
        CHECK(validate(aws, spec).has("language-unsupported"));
    }

    TEST_CASE("beta languages are accepted with a warning") {
        const auto google = builtin_profile("google");
        DeploymentSpec spec = minimal_spec();
        spec.language = {"java", ""};
        const auto r = validate(google, spec);
        CHECK(r.accepted());
        CHECK_FALSE(r.warnings.empty());
    }

    TEST_CASE("validate is monotone when dimensions shrink") {
        std::mt19937_64 rng(11);
        for (const auto& p : builtin_profiles()) {
            for (int i = 0; i < 300; ++i) {
                DeploymentSpec big = minimal_spec();
                big.package.zip_bytes = rng() % (200 * kBytesPerMiB);
                big.package.unzipped_bytes = big.package.zip_bytes + rng() % (800 * kBytesPerMiB);
                big.timeout_s = 1 + static_cast<double>(rng() % 1200);
                DeploymentSpec small = big;
                small.package.zip_bytes = rng() % (big.package.zip_bytes + 1);
                small.package.unzipped_bytes = rng() % (big.package.unzipped_bytes + 1);
                small.timeout_s = 1 + static_cast<double>(rng() % static_cast<std::uint64_t>(big.timeout_s));
                const auto rb = validate(p, big);
                const auto rs = validate(p, small);
                for (const auto& v : rs.violations) CHECK(rb.has(v.kind));
            }
        }
    }

    TEST_CASE("snap_memory examples") {
        const auto aws = builtin_profile("aws");
        CHECK(snap_memory(aws, 128).mb == 128);
        CHECK(snap_memory(aws, 130).mb == 192);
        CHECK(snap_memory(aws, 1).mb == 128);
        CHECK(snap_memory(builtin_profile("google"), 300).mb == 512);
        const auto fixed = snap_memory(builtin_profile("azure"), 4000);
        CHECK(fixed.mb == 1536);
        CHECK(fixed.fixed_warning);
        CHECK_THROWS_WITH_AS(snap_memory(aws, 3009), doctest::Contains("no selectable"), Error);
        try {
            snap_memory(aws, 5000);
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::kNoValidMemory);
        }
        CHECK_THROWS_AS(snap_memory(aws, 0), Error);
    }

    TEST_CASE("snap_memory agrees with grid enumeration") {
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> dist(0.5, 3500.0);
        for (const auto& p : builtin_profiles()) {
            if (p.memory_grid.kind == MemoryGrid::Kind::kFixed) continue;
            for (int i = 0; i < 1000; ++i) {
                const double req = i % 2 == 0 ? dist(rng) : static_cast<double>(1 + rng() % 3500);
                const auto want = oracle_snap(p, req);
                if (want) {
                    const auto got = snap_memory(p, req);
                    CHECK(got.mb == *want);
                    CHECK(p.on_grid(got.mb));
                } else {
                    CHECK_THROWS_AS(snap_memory(p, req), Error);
                }
            }
        }
    }

    TEST_CASE("cpu_share") {
        const auto aws = builtin_profile("aws");
        CHECK(cpu_share(aws, 1792) == doctest::Approx(1.0));
        CHECK(cpu_share(aws, 896) == doctest::Approx(0.5));
        CHECK(cpu_share(aws, 3008) == doctest::Approx(3008.0 / 1792.0));
        CHECK(cpu_share(builtin_profile("alibaba"), 1024) == doctest::Approx(1.0));
        CHECK_THROWS_AS(cpu_share(builtin_profile("google"), 128), Error);
        CHECK_THROWS_AS(cpu_share(aws, 130), Error);
        double prev = 0;
        for (auto mb : aws.memory_values()) {
            const double s = cpu_share(aws, mb);
            CHECK(s >= prev);
            prev = s;
        }
    }

    TEST_CASE("estimate_cost") {
        const auto aws = builtin_profile("aws");
        const auto azure = builtin_profile("azure");
        const RateCard card{1.0, 0.0};
        CHECK(estimate_cost(aws, 1024, 0, 0, 0, card) == 0.0);
        CHECK(estimate_cost(aws, 1024, 10, 0, 0, card) == doctest::Approx(10.0));
        CHECK(estimate_cost(azure, 1536, 10, 1536, 0, card) == doctest::Approx(estimate_cost(aws, 1536, 10, 0, 0, card)));
        const RateCard full{0.0000166667, 0.0000002};
        const double one = estimate_cost(aws, 512, 1.5, 0, 7, full);
        CHECK(estimate_cost(aws, 512, 3.0, 0, 14, full) == doctest::Approx(2 * one));
        CHECK_THROWS_AS(estimate_cost(aws, 512, 1, 0, 1, std::nullopt), Error);
    }

    TEST_CASE("profile documents round trip and overlays merge field-wise") {
        for (const auto& p : builtin_profiles()) {
            CHECK(to_json(profile_from_json(to_json(p))) == to_json(p));
        }
        const json overlay = {{"aws", {{"timeout_max_s", 60}, {"payload_limit_bytes", 6291456}}},
                              {"local", {{"name", "local"},
                                         {"languages", json::array({{{"name", "python"}, {"versions", {"3.10"}}}})},
                                         {"memory_min_mb", 128},
                                         {"memory_max_mb", 128},
                                         {"memory_grid", {{"fixed_mb", 128}}},
                                         {"timeout_max_s", 10},
                                         {"local_disk_mb", 512},
                                         {"instance_limit", 4}}}};
        const auto merged = apply_overlay(builtin_profiles(), overlay);
        REQUIRE(merged.size() == 5);
        for (const auto& p : merged) {
            if (p.name == "aws") {
                CHECK(p.timeout_max_s == 60);
                CHECK(*p.payload_limit_bytes == 6291456);
                CHECK(p.regions.size() == 20);
            }
        }
        CHECK_THROWS_AS(apply_overlay(builtin_profiles(), json::array()), Error);
    }

    TEST_CASE("profiles directory matches the embedded documents") {
        const auto from_dir = load_profiles_dir(std::string(SLSBENCH_SOURCE_DIR) + "/profiles");
        const auto embedded = builtin_profiles();
        REQUIRE(from_dir.size() == embedded.size());
        for (std::size_t i = 0; i < embedded.size(); ++i) CHECK(to_json(from_dir[i]) == to_json(embedded[i]));
    }

    TEST_CASE("language references and specs") {
        const auto l = LanguageRef::parse("java:11");
        CHECK(l.name == "java");
        CHECK(l.version == "11");
        CHECK(LanguageRef::parse("go").version.empty());
        DeploymentSpec s = minimal_spec();
        s.region = "us-east-1";
        s.trigger = Trigger::kTimer;
        CHECK(spec_from_json(to_json(s)) == s);
        s.memory_mb = 0;
        CHECK_THROWS_AS(spec_from_json(to_json(s)), Error);
    }
}
