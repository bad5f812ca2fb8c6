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
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "slsbench/clock.hpp"
#include "slsbench/packaging.hpp"
#include "slsbench/platform.hpp"

namespace slsbench {

enum class InvocationStatus { kOk, kError, kTimeout };
enum class ColdEvidence { kUnknown, kCold, kWarm };

struct DeploymentHandle {
    std::string provider;
    std::string function_id;
    DeploymentSpec spec;
    std::string endpoint;
    std::int64_t created_at_ns = 0;  // wall clock, informational only
    std::vector<std::string> output_schema;
};

struct InvocationRecord {
    std::string function_id;
    std::uint64_t seq = 0;
    // Monotonic client timestamps taken immediately around the request.
    std::int64_t t_start_ns = 0;
    std::int64_t t_end_ns = 0;
    std::int64_t wall_start_ns = 0;
    InvocationStatus status = InvocationStatus::kOk;
    nlohmann::json result;  // parsed workload output
    ColdEvidence cold_evidence = ColdEvidence::kUnknown;
    std::optional<double> exec_ms_reported;
    std::string error;
    std::string raw_body;  // kept when the body did not parse or match the schema

    double response_ms() const { return ns_to_ms(t_end_ns - t_start_ns); }
    bool ok() const { return status == InvocationStatus::kOk; }
};

struct LogLine {
    std::int64_t timestamp_ns = 0;
    std::string function_id;
    std::string message;
    std::optional<double> exec_ms;
};

// Append-only record sink; safe for concurrent append.
class RecordSink {
public:
    void append(InvocationRecord record);
    std::vector<InvocationRecord> snapshot() const;
    std::size_t size() const;

private:
    mutable std::mutex mu_;
    std::vector<InvocationRecord> records_;
};

// Adapter contract every provider implements. Deploy validates against the
// provider's platform profile before any provider-side work happens.
class Provider {
public:
    virtual ~Provider() = default;

    virtual std::string name() const = 0;
    virtual const PlatformProfile& profile() const = 0;
    virtual Clock& clock() = 0;

    // Throws kPrecondition with the violation list when validation fails.
    DeploymentHandle deploy(const PackageArtifact& artifact, const DeploymentSpec& spec);

    virtual InvocationRecord invoke(const DeploymentHandle& handle, const nlohmann::json& payload,
                                    double timeout_s) = 0;
    virtual void teardown(const DeploymentHandle& handle) = 0;
    virtual std::vector<LogLine> fetch_logs(const DeploymentHandle& handle, std::int64_t since_ns);

    // Guarantees the next invocation of the returned handle is cold. The
    // default redeploys with a fresh environment marker, which yields a new
    // handle; providers with direct instance control override it.
    virtual DeploymentHandle force_cold(const DeploymentHandle& handle);

    // Number of deploy calls that reached the provider back end.
    std::uint64_t provider_deploy_calls() const { return provider_deploy_calls_; }

protected:
    virtual DeploymentHandle do_deploy(const PackageArtifact& artifact, const DeploymentSpec& spec) = 0;

    // Remembers artifacts so force_cold can redeploy.
    std::map<std::string, PackageArtifact> deployed_artifacts_;
    std::mutex artifacts_mu_;

private:
    std::uint64_t provider_deploy_calls_ = 0;
    std::uint64_t cold_markers_ = 0;
};

// Fills result/status/cold evidence of a record from a workload response body.
// A body that does not parse, or misses a field of the schema, turns the
// record into an error with the raw body retained.
void apply_response_body(InvocationRecord& record, const std::string& body, const std::vector<std::string>& schema);

// Deterministic identity for (provider, digest, spec).
std::string deployment_id(const std::string& provider, const DeploymentSpec& spec);

std::int64_t wall_now_ns();

const char* to_string(InvocationStatus status);
InvocationStatus status_from_string(const std::string& text);
const char* to_string(ColdEvidence evidence);
ColdEvidence evidence_from_string(const std::string& text);

nlohmann::json to_json(const InvocationRecord& r);
InvocationRecord record_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const DeploymentHandle& h);
DeploymentHandle handle_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const LogLine& line);

}  // namespace slsbench
