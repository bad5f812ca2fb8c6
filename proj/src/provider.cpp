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

#include "slsbench/provider.hpp"

#include <chrono>
#include <sstream>

#include "slsbench/digest.hpp"
#include "slsbench/error.hpp"

namespace slsbench {

using nlohmann::json;

void RecordSink::append(InvocationRecord record) {
    std::lock_guard lock(mu_);
    records_.push_back(std::move(record));
}

std::vector<InvocationRecord> RecordSink::snapshot() const {
    std::lock_guard lock(mu_);
    return records_;
}

std::size_t RecordSink::size() const {
    std::lock_guard lock(mu_);
    return records_.size();
}

DeploymentHandle Provider::deploy(const PackageArtifact& artifact, const DeploymentSpec& spec) {
    if (spec.package.digest != artifact.content_digest) {
        fail(ErrorCode::kPrecondition, "deployment spec does not reference the artifact being deployed");
    }
    const auto report = validate(profile(), spec);
    if (!report.accepted()) {
        std::ostringstream os;
        os << "deployment rejected by " << profile().name << " limits:";
        for (const auto& v : report.violations) os << "\n  " << v.kind << ": " << v.message;
        fail(ErrorCode::kPrecondition, os.str());
    }
    auto handle = do_deploy(artifact, spec);
    ++provider_deploy_calls_;
    std::lock_guard lock(artifacts_mu_);
    deployed_artifacts_[handle.function_id] = artifact;
    return handle;
}

std::vector<LogLine> Provider::fetch_logs(const DeploymentHandle&, std::int64_t) {
    fail(ErrorCode::kUnsupported, "provider '" + name() + "' does not expose execution logs");
}

DeploymentHandle Provider::force_cold(const DeploymentHandle& handle) {
    PackageArtifact artifact;
    {
        std::lock_guard lock(artifacts_mu_);
        auto it = deployed_artifacts_.find(handle.function_id);
        if (it == deployed_artifacts_.end()) {
            fail(ErrorCode::kNotFound, "unknown function '" + handle.function_id + "'");
        }
        artifact = it->second;
    }
    teardown(handle);
    DeploymentSpec spec = handle.spec;
    spec.env_marker = "cold-" + std::to_string(++cold_markers_);
    return deploy(artifact, spec);
}

void apply_response_body(InvocationRecord& record, const std::string& body, const std::vector<std::string>& schema) {
    json doc;
    try {
        doc = json::parse(body);
    } catch (const json::parse_error& e) {
        record.status = InvocationStatus::kError;
        record.error = std::string("unparsable response: ") + e.what();
        record.raw_body = body;
        return;
    }
    if (!doc.is_object()) {
        record.status = InvocationStatus::kError;
        record.error = "response is not a structured document";
        record.raw_body = body;
        return;
    }
    for (const auto& field : schema) {
        // Dotted names address nested fields, e.g. metrics.mflops.
        const json* node = &doc;
        std::istringstream parts(field);
        std::string part;
        bool found = true;
        while (std::getline(parts, part, '.')) {
            if (!node->is_object() || !node->contains(part)) {
                found = false;
                break;
            }
            node = &node->at(part);
        }
        if (!found) {
            record.status = InvocationStatus::kError;
            record.error = "response misses required field '" + field + "'";
            record.raw_body = body;
            record.result = std::move(doc);
            return;
        }
    }
    if (auto it = doc.find("first_run"); it != doc.end() && it->is_boolean()) {
        record.cold_evidence = it->get<bool>() ? ColdEvidence::kCold : ColdEvidence::kWarm;
    }
    if (auto it = doc.find("exec_ms"); it != doc.end() && it->is_number()) {
        record.exec_ms_reported = it->get<double>();
    }
    record.result = std::move(doc);
}

std::string deployment_id(const std::string& provider, const DeploymentSpec& spec) {
    return "fn-" + sha256_hex(provider + "\n" + to_json(spec).dump()).substr(0, 16);
}

std::int64_t wall_now_ns() {
    return std::chrono::duration_cast<std::chrono::nanoseconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
}

const char* to_string(InvocationStatus s) {
    switch (s) {
        case InvocationStatus::kOk: return "ok";
        case InvocationStatus::kError: return "error";
        case InvocationStatus::kTimeout: return "timeout";
    }
    return "error";
}

InvocationStatus status_from_string(const std::string& s) {
    if (s == "ok") return InvocationStatus::kOk;
    if (s == "timeout") return InvocationStatus::kTimeout;
    return InvocationStatus::kError;
}

const char* to_string(ColdEvidence e) {
    switch (e) {
        case ColdEvidence::kUnknown: return "unknown";
        case ColdEvidence::kCold: return "cold";
        case ColdEvidence::kWarm: return "warm";
    }
    return "unknown";
}

ColdEvidence evidence_from_string(const std::string& s) {
    if (s == "cold") return ColdEvidence::kCold;
    if (s == "warm") return ColdEvidence::kWarm;
    return ColdEvidence::kUnknown;
}

json to_json(const InvocationRecord& r) {
    json doc = {{"function_id", r.function_id},
                {"seq", r.seq},
                {"t_start_ns", r.t_start_ns},
                {"t_end_ns", r.t_end_ns},
                {"wall_start_ns", r.wall_start_ns},
                {"response_ms", r.response_ms()},
                {"status", to_string(r.status)},
                {"result", r.result},
                {"cold_evidence", to_string(r.cold_evidence)}};
    if (r.exec_ms_reported) doc["exec_ms_reported"] = *r.exec_ms_reported;
    if (!r.error.empty()) doc["error"] = r.error;
    if (!r.raw_body.empty()) doc["raw_body"] = r.raw_body;
    return doc;
}

InvocationRecord record_from_json(const json& doc) {
    InvocationRecord r;
    r.function_id = doc.at("function_id").get<std::string>();
    r.seq = doc.value("seq", std::uint64_t{0});
    r.t_start_ns = doc.at("t_start_ns").get<std::int64_t>();
    r.t_end_ns = doc.at("t_end_ns").get<std::int64_t>();
    r.wall_start_ns = doc.value("wall_start_ns", std::int64_t{0});
    r.status = status_from_string(doc.at("status").get<std::string>());
    r.result = doc.value("result", json());
    r.cold_evidence = evidence_from_string(doc.value("cold_evidence", std::string("unknown")));
    if (doc.contains("exec_ms_reported")) r.exec_ms_reported = doc.at("exec_ms_reported").get<double>();
    r.error = doc.value("error", std::string());
    r.raw_body = doc.value("raw_body", std::string());
    return r;
}

json to_json(const DeploymentHandle& h) {
    return {{"provider", h.provider},         {"function_id", h.function_id},
            {"spec", to_json(h.spec)},        {"endpoint", h.endpoint},
            {"created_at_ns", h.created_at_ns}, {"output_schema", h.output_schema}};
}

DeploymentHandle handle_from_json(const json& doc) {
    DeploymentHandle h;
    h.provider = doc.at("provider").get<std::string>();
    h.function_id = doc.at("function_id").get<std::string>();
    h.spec = spec_from_json(doc.at("spec"));
    h.endpoint = doc.at("endpoint").get<std::string>();
    h.created_at_ns = doc.value("created_at_ns", std::int64_t{0});
    h.output_schema = doc.value("output_schema", std::vector<std::string>{});
    return h;
}

json to_json(const LogLine& l) {
    json doc = {{"timestamp_ns", l.timestamp_ns}, {"function_id", l.function_id}, {"message", l.message}};
    if (l.exec_ms) doc["exec_ms"] = *l.exec_ms;
    return doc;
}

}  // namespace slsbench
