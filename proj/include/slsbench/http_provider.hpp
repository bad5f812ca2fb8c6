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

#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "slsbench/provider.hpp"

namespace slsbench {

inline constexpr const char* kHttpProvider = "http";

struct HttpProviderConfig {
    // Endpoint per workload id; falls back to `endpoint`.
    std::map<std::string, std::string> endpoints;
    std::string endpoint;
    std::map<std::string, std::string> headers;
    std::string auth_token;  // sent as "Authorization: Bearer <token>"
};

HttpProviderConfig http_config_from_json(const nlohmann::json& doc);

// Adapter for functions that are already deployed behind an HTTP endpoint.
// deploy() binds a workload to its configured URL; invoke() POSTs the payload
// and parses the response body as a structured document.
class HttpProvider final : public Provider {
public:
    HttpProvider(PlatformProfile profile, HttpProviderConfig config, Clock& clock);

    std::string name() const override { return kHttpProvider; }
    const PlatformProfile& profile() const override { return profile_; }
    Clock& clock() override { return clock_; }

    InvocationRecord invoke(const DeploymentHandle& handle, const nlohmann::json& payload, double timeout_s) override;
    void teardown(const DeploymentHandle& handle) override;

    // Restores a handle produced by an earlier process.
    void adopt(const DeploymentHandle& handle);

protected:
    DeploymentHandle do_deploy(const PackageArtifact& artifact, const DeploymentSpec& spec) override;

private:
    PlatformProfile profile_;
    HttpProviderConfig config_;
    Clock& clock_;
    std::mutex mu_;
    std::map<std::string, DeploymentHandle> live_;
};

struct ParsedUrl {
    std::string scheme;
    std::string host;
    int port = 0;
    std::string path;
};

ParsedUrl parse_url(const std::string& url);

}  // namespace slsbench
