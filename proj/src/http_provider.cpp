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

#include "slsbench/http_provider.hpp"

#include <httplib.h>

#include <regex>

#include "slsbench/error.hpp"

namespace slsbench {

using nlohmann::json;

HttpProviderConfig http_config_from_json(const json& doc) {
    HttpProviderConfig c;
    c.endpoint = doc.value("endpoint", std::string());
    c.endpoints = doc.value("endpoints", std::map<std::string, std::string>{});
    c.headers = doc.value("headers", std::map<std::string, std::string>{});
    c.auth_token = doc.value("auth_token", std::string());
    return c;
}

ParsedUrl parse_url(const std::string& url) {
    static const std::regex re(R"(^(https?)://([^/:]+)(?::(\d+))?(/.*)?$)");
    std::smatch m;
    if (!std::regex_match(url, m, re)) fail(ErrorCode::kConfiguration, "malformed endpoint URL '" + url + "'");
    ParsedUrl u;
    u.scheme = m[1];
    u.host = m[2];
    u.port = m[3].matched ? std::stoi(m[3]) : (u.scheme == "https" ? 443 : 80);
    u.path = m[4].matched ? std::string(m[4]) : "/";
    return u;
}

HttpProvider::HttpProvider(PlatformProfile profile, HttpProviderConfig config, Clock& clock)
    : profile_(std::move(profile)), config_(std::move(config)), clock_(clock) {}

DeploymentHandle HttpProvider::do_deploy(const PackageArtifact& artifact, const DeploymentSpec& spec) {
    std::string endpoint = config_.endpoint;
    if (auto it = config_.endpoints.find(artifact.manifest.id); it != config_.endpoints.end()) endpoint = it->second;
    if (endpoint.empty()) {
        fail(ErrorCode::kConfiguration, "no HTTP endpoint configured for workload '" + artifact.manifest.id + "'");
    }
    parse_url(endpoint);

    std::lock_guard lock(mu_);
    const auto id = deployment_id(name(), spec);
    if (auto it = live_.find(id); it != live_.end()) return it->second;
    DeploymentHandle h;
    h.provider = name();
    h.function_id = id;
    h.spec = spec;
    h.endpoint = endpoint;
    h.created_at_ns = wall_now_ns();
    h.output_schema = artifact.manifest.expected_output_schema;
    live_.emplace(id, h);
    return h;
}

void HttpProvider::adopt(const DeploymentHandle& handle) {
    std::lock_guard lock(mu_);
    live_[handle.function_id] = handle;
}

InvocationRecord HttpProvider::invoke(const DeploymentHandle& handle, const json& payload, double timeout_s) {
    {
        std::lock_guard lock(mu_);
        if (live_.count(handle.function_id) == 0) {
            fail(ErrorCode::kNotFound, "unknown function '" + handle.function_id + "'");
        }
    }
    const auto url = parse_url(handle.endpoint);
    const auto timeout_us = static_cast<long long>(timeout_s * 1e6);
    const auto sec = static_cast<time_t>(timeout_us / 1'000'000);
    const auto usec = static_cast<time_t>(timeout_us % 1'000'000);

    httplib::Headers headers;
    for (const auto& [k, v] : config_.headers) headers.emplace(k, v);
    if (!config_.auth_token.empty()) headers.emplace("Authorization", "Bearer " + config_.auth_token);
    const auto body = payload.dump();

    InvocationRecord rec;
    rec.function_id = handle.function_id;
    rec.wall_start_ns = wall_now_ns();
    httplib::Result res{nullptr, httplib::Error::Unknown};
    // Client construction stays outside the timed window.
    if (url.scheme == "https") {
        httplib::SSLClient cli(url.host, url.port);
        cli.set_connection_timeout(sec, usec);
        cli.set_read_timeout(sec, usec);
        cli.set_write_timeout(sec, usec);
        rec.t_start_ns = clock_.now_ns();
        res = cli.Post(url.path, headers, body, "application/json");
        rec.t_end_ns = clock_.now_ns();
    } else {
        httplib::Client cli(url.host, url.port);
        cli.set_connection_timeout(sec, usec);
        cli.set_read_timeout(sec, usec);
        cli.set_write_timeout(sec, usec);
        rec.t_start_ns = clock_.now_ns();
        res = cli.Post(url.path, headers, body, "application/json");
        rec.t_end_ns = clock_.now_ns();
    }

    const auto deadline = rec.t_start_ns + static_cast<std::int64_t>(timeout_s * 1e9);
    if (!res) {
        // The read timer fires at the deadline; allow a millisecond of slack.
        const bool timed_out = res.error() == httplib::Error::ConnectionTimeout ||
                               (res.error() == httplib::Error::Read && rec.t_end_ns >= deadline - kNsPerMs);
        if (timed_out) {
            rec.status = InvocationStatus::kTimeout;
            rec.t_end_ns = deadline;
            rec.error = "invocation exceeded " + std::to_string(timeout_s) + " s";
        } else {
            rec.status = InvocationStatus::kError;
            rec.error = "transport failure: " + httplib::to_string(res.error());
        }
        return rec;
    }
    if (res->status < 200 || res->status >= 300) {
        rec.status = InvocationStatus::kError;
        rec.error = "HTTP status " + std::to_string(res->status);
        rec.raw_body = res->body;
        return rec;
    }
    apply_response_body(rec, res->body, handle.output_schema);
    return rec;
}

void HttpProvider::teardown(const DeploymentHandle& handle) {
    std::lock_guard lock(mu_);
    if (live_.erase(handle.function_id) == 0) {
        fail(ErrorCode::kNotFound, "unknown function '" + handle.function_id + "'");
    }
}

}  // namespace slsbench
