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

#include "slsbench/engine.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <thread>

#include "slsbench/digest.hpp"
#include "slsbench/error.hpp"
#include "slsbench/localsim.hpp"

namespace slsbench {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string invalid_reason(const char* which, const InvocationRecord& r) {
    return std::string(which) + "-" + to_string(r.status) + (r.error.empty() ? "" : ": " + r.error);
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[(v.size() + 1) / 2 - 1];
}

}  // namespace

TrialResult run_coldstart_trial(Provider& provider, const DeploymentHandle& handle, const json& payload,
                                double timeout_s) {
    TrialResult t;
    t.protocol = Protocol::kColdstartPair;
    t.function_id = handle.function_id;
    t.records.push_back(provider.invoke(handle, payload, timeout_s));
    t.records.push_back(provider.invoke(handle, payload, timeout_s));
    const auto& first = t.records[0];
    const auto& second = t.records[1];
    t.valid = false;
    if (!first.ok()) {
        t.reason = invalid_reason("first", first);
    } else if (!second.ok()) {
        t.reason = invalid_reason("second", second);
    } else {
        const double est = first.response_ms() - second.response_ms();
        t.derived["coldstart_est_ms"] = est;
        if (second.cold_evidence == ColdEvidence::kCold) {
            t.reason = "second-not-warm";
        } else if (est < 0) {
            t.reason = "negative-estimate";
        } else {
            t.valid = true;
        }
    }
    return t;
}

std::vector<InvocationRecord> run_throughput(Provider& provider, const DeploymentHandle& handle, int concurrency,
                                             double duration_s, const json& payload, double timeout_s,
                                             RecordSink* sink) {
    if (concurrency < 1) fail(ErrorCode::kPrecondition, "throughput concurrency must be >= 1");
    std::vector<InvocationRecord> out;
    if (!(duration_s > 0)) return out;

    Clock& clock = provider.clock();
    const auto start = clock.now_ns();
    const auto deadline = start + static_cast<std::int64_t>(duration_s * 1e9);
    // Zero-duration failures (e.g. instance limit rejections) back off so a
    // worker cannot spin.
    constexpr std::int64_t kBackoffNs = kNsPerMs;

    if (clock.is_virtual()) {
        auto& vclock = static_cast<VirtualClock&>(clock);
        std::vector<std::int64_t> worker_time(static_cast<std::size_t>(concurrency), start);
        for (;;) {
            const auto it = std::min_element(worker_time.begin(), worker_time.end());
            if (*it >= deadline) break;
            vclock.jump_to(*it);
            auto rec = provider.invoke(handle, payload, timeout_s);
            *it = std::max(rec.t_end_ns, *it + (rec.t_end_ns > rec.t_start_ns ? 0 : kBackoffNs));
            if (sink) sink->append(rec);
            out.push_back(std::move(rec));
        }
        vclock.jump_to(*std::max_element(worker_time.begin(), worker_time.end()));
    } else {
        std::vector<std::vector<InvocationRecord>> per_worker(static_cast<std::size_t>(concurrency));
        std::vector<std::thread> workers;
        for (int w = 0; w < concurrency; ++w) {
            workers.emplace_back([&, w] {
                auto& mine = per_worker[static_cast<std::size_t>(w)];
                while (clock.now_ns() < deadline) {
                    InvocationRecord rec;
                    try {
                        rec = provider.invoke(handle, payload, timeout_s);
                    } catch (const std::exception& e) {
                        rec.function_id = handle.function_id;
                        rec.t_start_ns = rec.t_end_ns = clock.now_ns();
                        rec.status = InvocationStatus::kError;
                        rec.error = e.what();
                    }
                    if (rec.t_end_ns <= rec.t_start_ns) clock.sleep_for_ns(kBackoffNs);
                    if (sink) sink->append(rec);
                    mine.push_back(std::move(rec));
                }
            });
        }
        for (auto& th : workers) th.join();
        for (auto& v : per_worker) {
            for (auto& r : v) out.push_back(std::move(r));
        }
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const auto& a, const auto& b) { return a.t_start_ns < b.t_start_ns; });
    return out;
}

Journal::Journal(fs::path path) : path_(std::move(path)) {
    if (path_.has_parent_path()) fs::create_directories(path_.parent_path());
}

std::vector<json> Journal::load() const {
    std::vector<json> out;
    std::ifstream in(path_);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        try {
            out.push_back(json::parse(line));
        } catch (const json::parse_error&) {
            // Torn write from an interrupted run.
        }
    }
    return out;
}

void Journal::append(const json& entry) {
    std::lock_guard lock(mu_);
    // A torn line left by a crash must not swallow the next entry.
    bool torn = false;
    if (std::ifstream in(path_, std::ios::binary | std::ios::ate); in && in.tellg() > 0) {
        in.seekg(-1, std::ios::end);
        torn = in.get() != '\n';
    }
    std::ofstream os(path_, std::ios::app | std::ios::binary);
    if (!os) fail(ErrorCode::kIo, "cannot append to journal '" + path_.string() + "'");
    if (torn) os << '\n';
    os << entry.dump() << '\n';
    os.flush();
}

WorkloadCatalog::WorkloadCatalog(fs::path workloads_dir, fs::path package_dir)
    : workloads_dir_(std::move(workloads_dir)), package_dir_(std::move(package_dir)) {}

fs::path WorkloadCatalog::workload_dir(const std::string& workload) const {
    if (fs::exists(fs::path(workload) / kManifestFileName)) return workload;
    return workloads_dir_ / workload;
}

const PackageArtifact& WorkloadCatalog::base(const std::string& workload, std::uint64_t synthetic_base_bytes) {
    const auto key = workload + "#" + std::to_string(synthetic_base_bytes);
    if (auto it = built_.find(key); it != built_.end()) return it->second;
    PackageArtifact artifact;
    if (workload == "synthetic") {
        const auto dir = package_dir_ / "workloads" / ("synthetic-" + std::to_string(synthetic_base_bytes));
        write_synthetic_workload(dir, synthetic_base_bytes);
        artifact = build_package(dir, synthetic_manifest(), package_dir_);
    } else {
        const auto dir = workload_dir(workload);
        artifact = build_package(dir, load_manifest(dir), package_dir_);
    }
    return built_.emplace(key, std::move(artifact)).first->second;
}

const PackageArtifact& WorkloadCatalog::variant(const std::string& workload, const SizeVariant& v,
                                                std::uint64_t synthetic_base_bytes) {
    const auto& b = base(workload, synthetic_base_bytes);
    if (v.label == "base") return b;
    const auto key = workload + "#" + std::to_string(synthetic_base_bytes) + "#" + v.label;
    if (auto it = built_.find(key); it != built_.end()) return it->second;
    auto variants = make_size_variants(b, {v}, package_dir_);
    return built_.emplace(key, std::move(variants.front())).first->second;
}

ExperimentEngine::ExperimentEngine(Provider& provider, EngineOptions options)
    : provider_(provider), options_(std::move(options)) {}

void ExperimentEngine::note(const std::string& message) const {
    if (options_.progress) options_.progress(message);
}

DeploymentSpec ExperimentEngine::spec_for(const ExperimentPlan& plan, const AxisPoint& point,
                                          const PackageArtifact& artifact) const {
    DeploymentSpec spec;
    if (const auto* v = point_value(point, kAxisLanguage)) {
        spec.language = LanguageRef::parse(*v);
    } else if (!plan.language.empty()) {
        spec.language = LanguageRef::parse(plan.language);
    } else {
        spec.language = artifact.manifest.language;
    }
    spec.memory_mb = plan.memory_mb;
    if (const auto* v = point_value(point, kAxisMemory)) {
        try {
            spec.memory_mb = static_cast<Mebibytes>(std::stoul(*v));
        } catch (const std::exception&) {
            fail(ErrorCode::kInvalidArgument, "memory value '" + *v + "' is not a number");
        }
    }
    spec.region = plan.region;
    if (const auto* v = point_value(point, kAxisRegion)) spec.region = *v;
    spec.timeout_s = plan.timeout_s;
    spec.package = artifact.ref();
    spec.trigger = artifact.manifest.trigger;
    return spec;
}

std::string plan_digest(const ExperimentPlan& plan) { return sha256_hex(to_json(plan).dump()); }

std::vector<TrialResult> ExperimentEngine::run_plan(const ExperimentPlan& plan, WorkloadCatalog& catalog) {
    plan.check();
    const auto digest = plan_digest(plan);

    std::unique_ptr<Journal> journal;
    std::set<std::string> done_points;
    std::map<std::string, std::map<int, TrialResult>> prior;
    if (!options_.run_dir.empty()) {
        fs::create_directories(options_.run_dir);
        std::ofstream(options_.run_dir / "plan.json") << to_json(plan).dump(2) << "\n";
        journal = std::make_unique<Journal>(options_.run_dir / "journal.jsonl");
        for (const auto& e : journal->load()) {
            if (e.value("plan_digest", std::string()) != digest) continue;
            const auto kind = e.value("kind", std::string());
            if (kind == "point-done") {
                done_points.insert(e.value("point", std::string()));
            } else if (kind == "trial") {
                auto t = trial_from_json(e.at("trial"));
                prior[point_key(t.point)][t.trial_index] = std::move(t);
            }
        }
    }

    std::uint64_t seq = 0;
    for (const auto& [key, trials] : prior) {
        for (const auto& [idx, t] : trials) seq += t.records.size();
    }

    auto persist = [&](const TrialResult& t) {
        if (journal) journal->append({{"kind", "trial"}, {"plan_digest", digest}, {"trial", to_json(t)}});
    };
    auto mark_done = [&](const std::string& key) {
        if (journal) journal->append({{"kind", "point-done"}, {"plan_digest", digest}, {"point", key}});
    };

    std::vector<TrialResult> results;
    for (const auto& point : plan.points()) {
        const auto key = point_key(point);
        auto& have = prior[key];
        if (done_points.count(key) != 0) {
            for (auto& [idx, t] : have) results.push_back(t);
            continue;
        }
        std::vector<int> missing;
        for (int i = 0; i < plan.repetitions; ++i) {
            if (have.count(i) == 0) missing.push_back(i);
        }
        for (auto& [idx, t] : have) results.push_back(t);
        if (missing.empty()) {
            mark_done(key);
            continue;
        }

        auto point_failure = [&](std::string reason, std::vector<Violation> violations) {
            TrialResult t;
            t.plan_id = plan.id;
            t.point = point;
            t.protocol = plan.protocol;
            t.valid = false;
            t.point_failed = true;
            t.reason = std::move(reason);
            t.violations = std::move(violations);
            persist(t);
            mark_done(key);
            note("point " + key + " failed: " + t.reason);
            results.push_back(std::move(t));
        };

        const PackageArtifact* artifact = nullptr;
        DeploymentSpec spec;
        try {
            SizeVariant variant{"base", 0, false};
            if (const auto* v = point_value(point, kAxisPackage); v != nullptr && *v != "base") {
                for (const auto& pv : plan.package_variants) {
                    if (pv.label == *v) variant = pv;
                }
            }
            artifact = &catalog.variant(plan.workload, variant, plan.synthetic_base_bytes);
            spec = spec_for(plan, point, *artifact);
        } catch (const Error& e) {
            point_failure(std::string("package-failed: ") + e.what(), {});
            continue;
        }
        const auto validation = validate(provider_.profile(), spec);
        if (!validation.accepted()) {
            point_failure("validation-failed", validation.violations);
            continue;
        }
        DeploymentHandle handle;
        try {
            handle = provider_.deploy(*artifact, spec);
        } catch (const Error& e) {
            point_failure(std::string("deploy-failed: ") + e.what(), {});
            continue;
        }
        note("point " + key + ": " + std::to_string(missing.size()) + " trial(s) on " + handle.function_id);

        int concurrency = plan.concurrency;
        if (const auto* v = point_value(point, kAxisConcurrency)) concurrency = std::stoi(*v);

        for (std::size_t m = 0; m < missing.size(); ++m) {
            TrialResult t;
            switch (plan.protocol) {
                case Protocol::kColdstartPair:
                    handle = provider_.force_cold(handle);
                    t = run_coldstart_trial(provider_, handle, plan.payload, plan.timeout_s);
                    break;
                case Protocol::kLatency: {
                    t.protocol = Protocol::kLatency;
                    t.records.push_back(provider_.invoke(handle, plan.payload, plan.timeout_s));
                    const auto& r = t.records.front();
                    t.valid = r.ok();
                    if (!t.valid) t.reason = invalid_reason("invocation", r);
                    break;
                }
                case Protocol::kThroughput: {
                    t.protocol = Protocol::kThroughput;
                    provider_.invoke(handle, plan.payload, plan.timeout_s);  // warm prime, not recorded
                    t.records = run_throughput(provider_, handle, concurrency, plan.duration_s, plan.payload,
                                               plan.timeout_s);
                    t.duration_s = plan.duration_s;
                    std::vector<double> ok_ms;
                    for (const auto& r : t.records) {
                        if (r.ok()) ok_ms.push_back(r.response_ms());
                    }
                    if (plan.duration_s > 0) t.derived["req_s"] = static_cast<double>(ok_ms.size()) / plan.duration_s;
                    if (!ok_ms.empty()) t.derived["median_response_ms"] = median_of(ok_ms);
                    t.valid = !ok_ms.empty();
                    if (!t.valid) t.reason = "no-successful-invocations";
                    break;
                }
            }
            t.plan_id = plan.id;
            t.point = point;
            t.trial_index = missing[m];
            t.function_id = handle.function_id;
            for (auto& r : t.records) r.seq = seq++;
            persist(t);
            results.push_back(t);
            if (options_.after_trial) options_.after_trial(t);
            if (m + 1 < missing.size() && plan.pacing_s > 0) {
                provider_.clock().sleep_for_ns(static_cast<std::int64_t>(plan.pacing_s * 1e9));
            }
        }
        if (plan.teardown_after_point) {
            try {
                provider_.teardown(handle);
            } catch (const Error&) {
                // Already gone.
            }
        }
        mark_done(key);
    }

    // Present trials in point order, then trial order.
    std::map<std::string, std::size_t> rank;
    for (const auto& p : plan.points()) rank.emplace(point_key(p), rank.size());
    std::stable_sort(results.begin(), results.end(), [&](const TrialResult& a, const TrialResult& b) {
        const auto ra = rank[point_key(a.point)], rb = rank[point_key(b.point)];
        return ra != rb ? ra < rb : a.trial_index < b.trial_index;
    });
    return results;
}

std::vector<TrialResult> load_run_results(const fs::path& run_dir, const ExperimentPlan& plan) {
    const auto digest = plan_digest(plan);
    Journal journal(run_dir / "journal.jsonl");
    std::map<std::string, std::map<int, TrialResult>> by_point;
    for (const auto& e : journal.load()) {
        if (e.value("kind", std::string()) != "trial" || e.value("plan_digest", std::string()) != digest) continue;
        auto t = trial_from_json(e.at("trial"));
        by_point[point_key(t.point)][t.trial_index] = std::move(t);
    }
    std::vector<TrialResult> out;
    for (const auto& p : plan.points()) {
        for (auto& [idx, t] : by_point[point_key(p)]) out.push_back(std::move(t));
    }
    return out;
}

std::vector<SizeVariant> package_sweep_variants() {
    struct Size {
        const char* label;
        std::int64_t bytes;
    };
    // Pillow, Numpy and OpenCV-python sized padding.
    const Size sizes[] = {{"2.8MB", 2936013}, {"21.9MB", 22963814}, {"48.6MB", 50960794}};
    std::vector<SizeVariant> out;
    for (bool import : {false, true}) {
        for (const auto& s : sizes) {
            out.push_back({std::string(s.label) + (import ? "-with-import" : "-no-import"), s.bytes, import});
        }
    }
    return out;
}

std::vector<ExperimentPlan> builtin_sweeps() {
    const std::vector<std::string> memory = {"128", "256", "512", "1024", "2048"};
    std::vector<ExperimentPlan> out;

    ExperimentPlan lang;
    lang.id = "coldstart-language";
    lang.axes = {{kAxisLanguage, {"python", "nodejs", "java"}}};
    lang.memory_mb = 128;
    out.push_back(lang);

    ExperimentPlan mem;
    mem.id = "coldstart-memory";
    mem.axes = {{kAxisMemory, memory}};
    out.push_back(mem);

    ExperimentPlan pkg;
    pkg.id = "coldstart-package";
    pkg.package_variants = package_sweep_variants();
    pkg.synthetic_base_bytes = kPackageSweepBaseBytes;
    Axis variants{kAxisPackage, {"base"}};
    for (const auto& v : pkg.package_variants) variants.values.push_back(v.label);
    pkg.axes = {variants};
    pkg.memory_mb = 128;
    out.push_back(pkg);

    struct Bench {
        const char* id;
        const char* workload;
        const char* metric;
        json payload;
    };
    const Bench benches[] = {
        {"micro-linpack-memory", "sls-linpack", "mflops", json::object()},
        {"micro-matrixmul-memory", "sls-matrixMul", "", json::object()},
        {"micro-fib-memory", "sls-fib", "", {{"k", 25}}},
        {"micro-dd-memory", "sls-dd", "", json::object()},
        {"micro-randomio-read-memory", "sls-randomIO", "read_mb_s", {{"op", "read"}}},
        {"micro-randomio-write-memory", "sls-randomIO", "write_mb_s", {{"op", "write"}}},
        {"micro-sequentialio-read-memory", "sls-sequentialIO", "read_mb_s", {{"op", "read"}}},
        {"micro-sequentialio-write-memory", "sls-sequentialIO", "write_mb_s", {{"op", "write"}}},
        {"micro-http-memory", "sls-http", "", json::object()},
        {"micro-cloudstorage-memory", "sls-cloudstorage", "", json::object()},
        {"macro-image-memory", "sls-image", "", json::object()},
        {"macro-video-memory", "sls-video", "", json::object()},
        {"macro-mapreduce-memory", "sls-mapreduce", "", json::object()},
        {"macro-lr-training-memory", "sls-lr-training", "", json::object()},
        {"macro-lr-serving-memory", "sls-lr-serving", "", json::object()},
    };
    for (const auto& b : benches) {
        ExperimentPlan p;
        p.id = b.id;
        p.workload = b.workload;
        p.protocol = Protocol::kLatency;
        p.metric = b.metric;
        p.payload = b.payload;
        p.axes = {{kAxisMemory, memory}};
        p.timeout_s = 300;
        out.push_back(p);
    }

    ExperimentPlan tput;
    tput.id = "throughput-http";
    tput.workload = "sls-http";
    tput.protocol = Protocol::kThroughput;
    tput.axes = {{kAxisConcurrency, {"1", "2", "4", "8"}}};
    tput.duration_s = 30;
    tput.pacing_s = 0;
    out.push_back(tput);

    for (auto& p : out) p.repetitions = 20;
    return out;
}

ExperimentPlan builtin_sweep(const std::string& name) {
    for (auto& p : builtin_sweeps()) {
        if (p.id == name) return p;
    }
    fail(ErrorCode::kNotFound, "unknown built-in sweep '" + name + "'");
}

}  // namespace slsbench
