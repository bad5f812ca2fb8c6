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

#include <httplib.h>

#include <thread>

#include "slsbench/digest.hpp"
#include "slsbench/error.hpp"
#include "slsbench/http_provider.hpp"
#include "slsbench/provider.hpp"

using namespace slsbench;
using nlohmann::json;

namespace {

PackageArtifact fake_artifact(const std::string& id) {
    PackageArtifact a;
    a.manifest.id = id;
    a.manifest.language = {"python", ""};
    a.manifest.handler = "handler.py:main";
    a.manifest.expected_output_schema = {"result", "exec_ms"};
    a.content_digest = sha256_hex(std::string_view(id));
    a.zip_bytes = 1000;
    a.unzipped_bytes = 3000;
    return a;
}

DeploymentSpec spec_for(const PackageArtifact& a) {
    DeploymentSpec s;
    s.language = a.manifest.language;
    s.memory_mb = 256;
    s.timeout_s = 30;
    s.package = a.ref();
    return s;
}

// In-process HTTP function host on an ephemeral port.
class FunctionServer {
public:
    FunctionServer() {
        server_.Post("/ok", [this](const httplib::Request& req, httplib::Response& res) {
            last_auth_ = req.get_header_value("Authorization");
            last_custom_ = req.get_header_value("X-Bench");
            const auto in = json::parse(req.body);
            const bool first = !warm_.exchange(true);
            res.set_content(json{{"result", in.value("echo", json())}, {"exec_ms", 2.5}, {"first_run", first}}.dump(),
                            "application/json");
        });
        server_.Post("/fail", [](const httplib::Request&, httplib::Response& res) {
            res.status = 500;
            res.set_content("boom", "text/plain");
        });
        server_.Post("/garbage", [](const httplib::Request&, httplib::Response& res) {
            res.set_content("<html>not json</html>", "text/html");
        });
        server_.Post("/schema", [](const httplib::Request&, httplib::Response& res) {
            res.set_content(R"({"result": 1})", "application/json");
        });
        server_.Post("/slow", [](const httplib::Request&, httplib::Response& res) {
            std::this_thread::sleep_for(std::chrono::milliseconds(600));
            res.set_content(R"({"result": 1, "exec_ms": 600})", "application/json");
        });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    ~FunctionServer() {
        server_.stop();
        thread_.join();
    }
    std::string url(const std::string& path) const { return "http://127.0.0.1:" + std::to_string(port_) + path; }

    std::string last_auth_;
    std::string last_custom_;

private:
    httplib::Server server_;
    std::thread thread_;
    int port_ = 0;
    std::atomic<bool> warm_{false};
};

}  // namespace

TEST_SUITE("provider") {
    TEST_CASE("response bodies map onto records") {
        const std::vector<std::string> schema = {"result", "exec_ms"};
        InvocationRecord r;
        apply_response_body(r, R"({"result": {"x": 1}, "exec_ms": 12.5, "first_run": true})", schema);
        CHECK(r.ok());
        CHECK(r.cold_evidence == ColdEvidence::kCold);
        CHECK(*r.exec_ms_reported == 12.5);
        CHECK(r.result["result"]["x"] == 1);

        InvocationRecord w;
        apply_response_body(w, R"({"result": 1, "exec_ms": 1, "first_run": false})", schema);
        CHECK(w.cold_evidence == ColdEvidence::kWarm);

        InvocationRecord u;
        apply_response_body(u, R"({"result": 1, "exec_ms": 1})", schema);
        CHECK(u.cold_evidence == ColdEvidence::kUnknown);

        InvocationRecord bad;
        apply_response_body(bad, "not json", schema);
        CHECK(bad.status == InvocationStatus::kError);
        CHECK(bad.raw_body == "not json");

        InvocationRecord missing;
        apply_response_body(missing, R"({"result": 1})", schema);
        CHECK(missing.status == InvocationStatus::kError);
        CHECK(missing.error.find("exec_ms") != std::string::npos);
        CHECK(missing.raw_body == R"({"result": 1})");

        InvocationRecord dotted;
        apply_response_body(dotted, R"({"metrics": {"mflops": 9}})", {"metrics.mflops"});
        CHECK(dotted.ok());
    }

    TEST_CASE("records, handles and ids") {
        InvocationRecord r;
        r.function_id = "fn-1";
        r.seq = 4;
        r.t_start_ns = 10;
        r.t_end_ns = 2'000'010;
        r.status = InvocationStatus::kTimeout;
        r.exec_ms_reported = 1.5;
        r.cold_evidence = ColdEvidence::kCold;
        r.result = {{"a", 1}};
        const auto back = record_from_json(to_json(r));
        CHECK(to_json(back) == to_json(r));
        CHECK(back.response_ms() == doctest::Approx(2.0));

        const auto a = fake_artifact("w");
        auto s = spec_for(a);
        const auto id = deployment_id("local-sim", s);
        CHECK(id == deployment_id("local-sim", s));
        CHECK(id != deployment_id("http", s));
        s.env_marker = "cold-1";
        CHECK(id != deployment_id("local-sim", s));
        CHECK(id.rfind("fn-", 0) == 0);

        DeploymentHandle h{"http", id, s, "http://x/", 5, {"result"}};
        CHECK(to_json(handle_from_json(to_json(h))) == to_json(h));
        for (auto st : {InvocationStatus::kOk, InvocationStatus::kError, InvocationStatus::kTimeout}) {
            CHECK(status_from_string(to_string(st)) == st);
        }
    }

    TEST_CASE("record sink is safe for concurrent append") {
        RecordSink sink;
        std::vector<std::thread> threads;
        for (int t = 0; t < 8; ++t) {
            threads.emplace_back([&sink, t] {
                for (int i = 0; i < 500; ++i) {
                    InvocationRecord r;
                    r.seq = static_cast<std::uint64_t>(t * 1000 + i);
                    sink.append(r);
                }
            });
        }
        for (auto& th : threads) th.join();
        CHECK(sink.size() == 4000);
        CHECK(sink.snapshot().size() == 4000);
    }

    TEST_CASE("http adapter invokes pre-deployed endpoints") {
        FunctionServer server;
        SteadyClock clock;
        HttpProviderConfig cfg;
        cfg.endpoints = {{"ok", server.url("/ok")},
                         {"fail", server.url("/fail")},
                         {"garbage", server.url("/garbage")},
                         {"schema", server.url("/schema")},
                         {"slow", server.url("/slow")}};
        cfg.headers = {{"X-Bench", "1"}};
        cfg.auth_token = "secret";
        HttpProvider http(builtin_profile("aws"), cfg, clock);

        const auto ok = fake_artifact("ok");
        const auto h = http.deploy(ok, spec_for(ok));
        CHECK(h.endpoint == server.url("/ok"));
        CHECK(http.deploy(ok, spec_for(ok)).function_id == h.function_id);

        const auto r1 = http.invoke(h, {{"echo", "hi"}}, 5);
        REQUIRE(r1.ok());
        CHECK(r1.result["result"] == "hi");
        CHECK(r1.cold_evidence == ColdEvidence::kCold);
        CHECK(r1.t_end_ns >= r1.t_start_ns);
        CHECK(r1.response_ms() >= 0);
        CHECK(server.last_auth_ == "Bearer secret");
        CHECK(server.last_custom_ == "1");
        CHECK(http.invoke(h, json::object(), 5).cold_evidence == ColdEvidence::kWarm);

        const auto fail = fake_artifact("fail");
        const auto r2 = http.invoke(http.deploy(fail, spec_for(fail)), json::object(), 5);
        CHECK(r2.status == InvocationStatus::kError);
        CHECK(r2.raw_body == "boom");

        const auto garbage = fake_artifact("garbage");
        const auto r3 = http.invoke(http.deploy(garbage, spec_for(garbage)), json::object(), 5);
        CHECK(r3.status == InvocationStatus::kError);
        CHECK(r3.raw_body == "<html>not json</html>");

        const auto schema = fake_artifact("schema");
        CHECK(http.invoke(http.deploy(schema, spec_for(schema)), json::object(), 5).status == InvocationStatus::kError);

        const auto slow = fake_artifact("slow");
        const auto r4 = http.invoke(http.deploy(slow, spec_for(slow)), json::object(), 0.2);
        CHECK(r4.status == InvocationStatus::kTimeout);
        CHECK(r4.t_end_ns - r4.t_start_ns == 200'000'000);

        http.teardown(h);
        CHECK_THROWS_AS(http.invoke(h, json::object(), 5), Error);
        CHECK_THROWS_AS(http.teardown(h), Error);
        CHECK_THROWS_AS(http.fetch_logs(h, 0), Error);
    }

    TEST_CASE("http adapter reports transport failures and config errors") {
        SteadyClock clock;
        HttpProviderConfig cfg;
        cfg.endpoint = "http://127.0.0.1:1/";  // nothing listens on port 1
        HttpProvider http(builtin_profile("aws"), cfg, clock);
        const auto a = fake_artifact("x");
        const auto r = http.invoke(http.deploy(a, spec_for(a)), json::object(), 2);
        CHECK(r.status == InvocationStatus::kError);
        CHECK(r.error.find("transport") != std::string::npos);

        HttpProvider none(builtin_profile("aws"), {}, clock);
        CHECK_THROWS_AS(none.deploy(a, spec_for(a)), Error);
        CHECK_THROWS_AS(parse_url("ftp://x"), Error);
        const auto u = parse_url("https://example.com/fn/run");
        CHECK(u.port == 443);
        CHECK(u.path == "/fn/run");
    }

    TEST_CASE("deploy validates before contacting the provider") {
        SteadyClock clock;
        HttpProviderConfig cfg;
        cfg.endpoint = "http://127.0.0.1:1/";
        HttpProvider http(builtin_profile("aws"), cfg, clock);
        const auto a = fake_artifact("x");
        auto s = spec_for(a);
        s.memory_mb = 130;
        try {
            http.deploy(a, s);
            FAIL("expected a precondition error");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::kPrecondition);
            CHECK(std::string(e.what()).find("memory-off-grid") != std::string::npos);
        }
        CHECK(http.provider_deploy_calls() == 0);
        s = spec_for(a);
        s.package.digest = "other";
        CHECK_THROWS_AS(http.deploy(a, s), Error);
        CHECK(http.provider_deploy_calls() == 0);
    }

    TEST_CASE("default force_cold redeploys under a new marker") {
        SteadyClock clock;
        HttpProviderConfig cfg;
        cfg.endpoint = "http://127.0.0.1:1/";
        HttpProvider http(builtin_profile("aws"), cfg, clock);
        const auto a = fake_artifact("x");
        const auto h = http.deploy(a, spec_for(a));
        const auto cold = http.force_cold(h);
        CHECK(cold.function_id != h.function_id);
        CHECK_FALSE(cold.spec.env_marker.empty());
        CHECK_THROWS_AS(http.teardown(h), Error);  // the old function is gone
        CHECK_NOTHROW(http.teardown(cold));
    }
}
