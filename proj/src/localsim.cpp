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

#include "slsbench/localsim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "slsbench/error.hpp"
#include "slsbench/subprocess.hpp"
#include "slsbench/zip_archive.hpp"

namespace slsbench {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kSentinelFile = ".slsbench-first-run";

// Marks the scratch dir as used; true on the first call for that directory.
bool probe_first_run(const fs::path& scratch) {
    const auto marker = scratch / kSentinelFile;
    std::error_code ec;
    if (fs::exists(marker, ec)) return false;
    std::ofstream(marker) << "used\n";
    return true;
}

fs::path make_temp_root() {
    auto templ = (fs::temp_directory_path() / "slsbench-sim-XXXXXX").string();
    if (::mkdtemp(templ.data()) == nullptr) fail(ErrorCode::kIo, "cannot create simulator scratch root");
    return templ;
}

}  // namespace

double SimModel::base_for(const std::string& platform) const {
    if (auto it = base_ms.find(platform); it != base_ms.end()) return it->second;
    if (auto it = base_ms.find("default"); it != base_ms.end()) return it->second;
    return 0.0;
}

void SimModel::check() const {
    auto non_negative = [](double v, const std::string& what) {
        if (!(v >= 0) || !std::isfinite(v)) fail(ErrorCode::kInvalidArgument, "sim model: " + what + " must be >= 0");
    };
    for (const auto& [k, v] : base_ms) non_negative(v, "base_ms[" + k + "]");
    for (const auto& [k, v] : runtime_init_ms) non_negative(v, "runtime_init_ms[" + k + "]");
    non_negative(load_bandwidth_bytes_per_ms, "load_bandwidth_bytes_per_ms");
    non_negative(mem_coeff_ms_mb, "mem_coeff_ms_mb");
    non_negative(warm_overhead_ms, "warm_overhead_ms");
    non_negative(keepalive_s, "keepalive_s");
    non_negative(jitter, "jitter");
    if (jitter >= 0.5) fail(ErrorCode::kInvalidArgument, "sim model: jitter must be < 0.5");
}

json to_json(const SimModel& m) {
    return {{"base_ms", m.base_ms},
            {"runtime_init_ms", m.runtime_init_ms},
            {"load_bandwidth_bytes_per_ms", m.load_bandwidth_bytes_per_ms},
            {"mem_coeff_ms_mb", m.mem_coeff_ms_mb},
            {"warm_overhead_ms", m.warm_overhead_ms},
            {"keepalive_s", m.keepalive_s},
            {"jitter", m.jitter},
            {"seed", m.seed},
            {"interpreters", m.interpreters},
            {"instance_limit_policy", m.queue_at_instance_limit ? "queue" : "reject"}};
}

SimModel sim_model_from_json(const json& doc) {
    SimModel m;
    try {
        if (doc.contains("base_ms")) {
            if (doc.at("base_ms").is_number()) {
                m.base_ms = {{"default", doc.at("base_ms").get<double>()}};
            } else {
                m.base_ms = doc.at("base_ms").get<std::map<std::string, double>>();
            }
        }
        m.runtime_init_ms = doc.value("runtime_init_ms", m.runtime_init_ms);
        m.load_bandwidth_bytes_per_ms = doc.value("load_bandwidth_bytes_per_ms", 0.0);
        m.mem_coeff_ms_mb = doc.value("mem_coeff_ms_mb", 0.0);
        m.warm_overhead_ms = doc.value("warm_overhead_ms", 0.0);
        m.keepalive_s = doc.value("keepalive_s", m.keepalive_s);
        m.jitter = doc.value("jitter", 0.0);
        m.seed = doc.value("seed", std::uint64_t{0});
        if (doc.contains("interpreters")) {
            for (const auto& [k, v] : doc.at("interpreters").items()) m.interpreters[k] = v.get<std::string>();
        }
        const auto policy = doc.value("instance_limit_policy", std::string("queue"));
        if (policy != "queue" && policy != "reject") {
            fail(ErrorCode::kInvalidArgument, "instance_limit_policy must be queue or reject");
        }
        m.queue_at_instance_limit = policy == "queue";
    } catch (const json::exception& e) {
        fail(ErrorCode::kInvalidArgument, std::string("malformed sim model: ") + e.what());
    }
    m.check();
    return m;
}

SimModel reference_sim_model() {
    SimModel m;
    m.base_ms = {{"default", 100.0}};
    m.runtime_init_ms = {{"python", 150.0}, {"nodejs", 120.0}, {"java", 2850.0}};
    m.mem_coeff_ms_mb = 25600.0;
    // 450 ms no-import cold start at 128 MB; 3.6 x 450 ms to load 22963814 bytes.
    m.load_bandwidth_bytes_per_ms = 22963814.0 / 1620.0;
    m.warm_overhead_ms = 10.0;
    m.jitter = 0.05;
    return m;
}

SimModel load_sim_model(const fs::path& file) {
    std::ifstream in(file);
    if (!in) fail(ErrorCode::kNotFound, "sim model '" + file.string() + "' not found");
    try {
        return sim_model_from_json(json::parse(in));
    } catch (const json::parse_error& e) {
        fail(ErrorCode::kInvalidArgument, file.string() + ": " + e.what());
    }
}

double sim_cold_latency(const SimModel& model, const std::string& platform, const DeploymentSpec& spec,
                        const PackageArtifact& artifact, double jitter_draw) {
    double ms = model.base_for(platform);
    if (auto it = model.runtime_init_ms.find(spec.language.name); it != model.runtime_init_ms.end()) {
        ms += it->second;
    }
    if (model.load_bandwidth_bytes_per_ms > 0) {
        ms += static_cast<double>(artifact.imported_bytes()) / model.load_bandwidth_bytes_per_ms;
    }
    if (model.mem_coeff_ms_mb > 0) ms += model.mem_coeff_ms_mb / static_cast<double>(spec.memory_mb);
    return ms * (1.0 + jitter_draw);
}

double JitterStream::next() {
    const std::uint64_t bits = rng_() >> 11;
    const double unit = static_cast<double>(bits) * 0x1.0p-53;  // [0, 1)
    return (2.0 * unit - 1.0) * epsilon_;
}

std::string JitterStream::save() const {
    std::ostringstream os;
    os << rng_;
    return os.str();
}

void JitterStream::restore(const std::string& state) {
    std::istringstream is(state);
    is >> rng_;
}

LocalSimProvider::LocalSimProvider(PlatformProfile profile, SimModel model, Clock& clock, LocalSimOptions options)
    : profile_(std::move(profile)),
      model_(std::move(model)),
      clock_(clock),
      jitter_(model_.seed, model_.jitter) {
    model_.check();
    if (options.scratch_root.empty()) {
        scratch_root_ = make_temp_root();
        owns_scratch_root_ = true;
    } else {
        scratch_root_ = options.scratch_root;
        fs::create_directories(scratch_root_);
    }
}

LocalSimProvider::~LocalSimProvider() {
    if (owns_scratch_root_) {
        std::error_code ec;
        fs::remove_all(scratch_root_, ec);
    }
}

DeploymentHandle LocalSimProvider::do_deploy(const PackageArtifact& artifact, const DeploymentSpec& spec) {
    std::lock_guard lock(mu_);
    DeploymentSpec effective = spec;
    // Non-selectable memory: the function runs with the platform's fixed size.
    if (profile_.memory_grid.kind == MemoryGrid::Kind::kFixed) {
        effective.memory_mb = profile_.memory_grid.values.front();
    }
    const auto id = deployment_id(name(), effective);
    if (auto it = functions_.find(id); it != functions_.end()) return it->second.handle;

    Function fn;
    fn.handle.provider = name();
    fn.handle.function_id = id;
    fn.handle.spec = effective;
    fn.handle.endpoint = std::string("sim://") + id;
    fn.handle.created_at_ns = wall_now_ns();
    fn.handle.output_schema = artifact.manifest.expected_output_schema;
    fn.artifact = artifact;
    if (!artifact.manifest.builtin_handler()) {
        fn.code_dir = scratch_root_ / "code" / id;
        std::error_code ec;
        fs::remove_all(fn.code_dir, ec);
        fs::create_directories(fn.code_dir);
        zip::extract_archive(artifact.archive_path, fn.code_dir);
    } else if (artifact.manifest.handler != kSyntheticHandler) {
        fail(ErrorCode::kProvider, "local-sim has no built-in handler '" + artifact.manifest.handler + "'");
    }
    auto handle = fn.handle;
    functions_.emplace(id, std::move(fn));
    return handle;
}

LocalSimProvider::Function& LocalSimProvider::function_locked(const std::string& function_id) {
    auto it = functions_.find(function_id);
    if (it == functions_.end()) fail(ErrorCode::kNotFound, "unknown function '" + function_id + "'");
    return it->second;
}

void LocalSimProvider::remove_instance_locked(Function& fn, SimInstance* inst) {
    std::error_code ec;
    fs::remove_all(inst->scratch_dir, ec);
    std::erase_if(fn.instances, [&](const auto& p) { return p.get() == inst; });
}

void LocalSimProvider::reap_expired_locked(Function& fn, std::int64_t now) {
    const auto keepalive_ns = static_cast<std::int64_t>(model_.keepalive_s * 1e9);
    std::vector<SimInstance*> expired;
    for (const auto& inst : fn.instances) {
        if (inst->busy_slots == 0 && inst->busy_until_ns.empty() && now - inst->last_used_at_ns > keepalive_ns) {
            expired.push_back(inst.get());
        }
    }
    for (auto* inst : expired) remove_instance_locked(fn, inst);
}

LocalSimProvider::Admission LocalSimProvider::admit(const std::string& function_id, InvocationRecord& record) {
    std::unique_lock lock(mu_);
    for (;;) {
        auto& fn = function_locked(function_id);
        const auto now = clock_.now_ns();
        // Admissions happen in non-decreasing virtual time, so slots that
        // were released at or before now stay released.
        for (const auto& inst : fn.instances) {
            std::erase_if(inst->busy_until_ns, [now](std::int64_t t) { return t <= now; });
        }
        reap_expired_locked(fn, now);

        SimInstance* best = nullptr;
        for (const auto& inst : fn.instances) {
            if (inst->state != InstanceState::kWarm ||
                inst->busy_slots + inst->busy_until_ns.size() >= profile_.instance_concurrency) {
                continue;
            }
            if (best == nullptr || inst->last_used_at_ns > best->last_used_at_ns) best = inst.get();
        }
        if (best != nullptr) {
            ++best->busy_slots;
            return {best, false, 0.0, fn.next_seq++};
        }

        if (fn.instances.size() < profile_.instance_limit) {
            auto inst = std::make_unique<SimInstance>();
            inst->instance_id = "i-" + std::to_string(next_instance_++);
            inst->scratch_dir = scratch_root_ / "instances" / function_id / inst->instance_id;
            fs::create_directories(inst->scratch_dir);
            inst->born_at_ns = now;
            inst->last_used_at_ns = now;
            inst->busy_slots = 1;
            const double cold_ms =
                sim_cold_latency(model_, profile_.name, fn.handle.spec, fn.artifact, jitter_.next());
            fn.logs.push_back({now, function_id, "instance-created " + inst->instance_id, std::nullopt});
            auto* raw = inst.get();
            fn.instances.push_back(std::move(inst));
            fn.peak_instances = std::max(fn.peak_instances, fn.instances.size());
            return {raw, true, cold_ms, fn.next_seq++};
        }

        if (!model_.queue_at_instance_limit) {
            record.status = InvocationStatus::kError;
            record.error = "instance limit of " + std::to_string(profile_.instance_limit) + " reached";
            return {};
        }
        // Queue. On a virtual clock instances that finished "in the future"
        // become free once the clock reaches them.
        std::int64_t earliest = std::numeric_limits<std::int64_t>::max();
        for (const auto& inst : fn.instances) {
            if (inst->busy_slots >= profile_.instance_concurrency) continue;
            for (auto t : inst->busy_until_ns) earliest = std::min(earliest, t);
        }
        if (clock_.is_virtual() && earliest != std::numeric_limits<std::int64_t>::max()) {
            clock_.sleep_for_ns(earliest - now);
            continue;
        }
        slot_freed_.wait(lock);
    }
}

InvocationRecord LocalSimProvider::invoke(const DeploymentHandle& handle, const json& payload, double timeout_s) {
    InvocationRecord rec;
    rec.function_id = handle.function_id;
    rec.wall_start_ns = wall_now_ns();
    rec.t_start_ns = clock_.now_ns();

    const auto admission = admit(handle.function_id, rec);
    if (admission.instance == nullptr) {
        rec.t_end_ns = clock_.now_ns();
        return rec;
    }
    rec.seq = admission.seq;
    SimInstance* inst = admission.instance;

    const Function* fn = nullptr;
    {
        std::lock_guard lock(mu_);
        fn = &function_locked(handle.function_id);
    }
    const auto budget_ns = static_cast<std::int64_t>(timeout_s * 1e9);
    const auto deadline = rec.t_start_ns + budget_ns;
    const auto overhead_ns = ms_to_ns(admission.cold ? admission.cold_ms : model_.warm_overhead_ms);

    bool timed_out = false;
    std::string body;
    std::string error;
    std::optional<double> logged_exec_ms;
    const auto before_overhead = clock_.now_ns();
    if (before_overhead + overhead_ns >= deadline) {
        clock_.sleep_for_ns(deadline - before_overhead);
        timed_out = true;
    } else {
        clock_.sleep_for_ns(overhead_ns);
        if (admission.cold) {
            std::lock_guard lock(mu_);
            inst->state = InstanceState::kWarm;
            function_locked(handle.function_id)
                .logs.push_back({clock_.now_ns(), handle.function_id, "init-complete " + inst->instance_id, std::nullopt});
        }
        const auto exec_start = clock_.now_ns();
        const auto remaining = deadline - exec_start;
        if (fn->artifact.manifest.builtin_handler()) {
            body = run_synthetic(*fn, *inst, payload, remaining, timed_out);
        } else {
            body = run_subprocess(*fn, *inst, payload, remaining, timed_out, error);
        }
        logged_exec_ms = ns_to_ms(clock_.now_ns() - exec_start);
    }
    rec.t_end_ns = timed_out ? deadline : clock_.now_ns();

    {
        std::lock_guard lock(mu_);
        auto it = functions_.find(handle.function_id);
        if (it != functions_.end()) {
            auto& f = it->second;
            const auto now = clock_.now_ns();
            if (!timed_out) {
                f.logs.push_back({now, handle.function_id, "exec-complete " + inst->instance_id, logged_exec_ms});
            }
            --inst->busy_slots;
            inst->last_used_at_ns = std::max(inst->last_used_at_ns, now);
            // On a virtual clock a later admission may start before `now`.
            if (clock_.is_virtual()) inst->busy_until_ns.push_back(now);
            // A timed-out runtime is not reused.
            if (timed_out) remove_instance_locked(f, inst);
        }
    }
    slot_freed_.notify_all();

    if (timed_out) {
        rec.status = InvocationStatus::kTimeout;
        rec.error = "invocation exceeded " + std::to_string(timeout_s) + " s";
    } else if (!error.empty()) {
        rec.status = InvocationStatus::kError;
        rec.error = error;
        rec.raw_body = body;
    } else {
        apply_response_body(rec, body, handle.output_schema);
    }
    return rec;
}

std::string LocalSimProvider::run_synthetic(const Function& fn, const SimInstance& inst, const json& payload,
                                            std::int64_t budget_ns, bool& timed_out) {
    json params = fn.artifact.manifest.params.is_object() ? fn.artifact.manifest.params : json::object();
    if (payload.is_object()) params.merge_patch(payload);
    const bool first_run = probe_first_run(inst.scratch_dir);
    const double sleep_ms = params.value("sleep_ms", 0.0);
    const auto sleep_ns = ms_to_ns(sleep_ms);
    if (sleep_ns >= budget_ns) {
        clock_.sleep_for_ns(std::max<std::int64_t>(budget_ns, 0));
        timed_out = true;
        return {};
    }
    clock_.sleep_for_ns(sleep_ns);
    json out = {{"result", {{"echo", params.value("echo", json())}}}, {"exec_ms", sleep_ms}, {"first_run", first_run}};
    if (params.contains("metrics")) out["metrics"] = params.at("metrics");
    return out.dump();
}

std::string LocalSimProvider::run_subprocess(const Function& fn, const SimInstance& inst, const json& payload,
                                             std::int64_t budget_ns, bool& timed_out, std::string& error) {
    const auto& manifest = fn.artifact.manifest;
    std::vector<std::string> argv;
    if (auto it = model_.interpreters.find(manifest.language.name); it != model_.interpreters.end()) {
        std::istringstream words(it->second);
        for (std::string w; words >> w;) argv.push_back(w);
    }
    argv.push_back((fn.code_dir / manifest.handler_file()).string());

    json params = manifest.params.is_object() ? manifest.params : json::object();
    if (payload.is_object()) params.merge_patch(payload);

    const std::map<std::string, std::string> env = {
        {"SLSBENCH_SCRATCH", inst.scratch_dir.string()},
        {"TMPDIR", inst.scratch_dir.string()},
        {"SLSBENCH_CODE_DIR", fn.code_dir.string()},
        {"SLSBENCH_HANDLER", manifest.handler},
        {"SLSBENCH_MEMORY_MB", std::to_string(fn.handle.spec.memory_mb)},
        {"SLSBENCH_LOCAL_DISK_MB", std::to_string(profile_.local_disk_mb)},
    };
    auto result = run_process(argv, inst.scratch_dir, env, params.dump(), std::max<std::int64_t>(budget_ns, 1));
    // Real execution time is charged to the simulated timeline.
    if (clock_.is_virtual()) clock_.sleep_for_ns(result.elapsed_ns);
    if (result.timed_out) {
        timed_out = true;
        return {};
    }
    if (result.exit_code != 0) {
        error = "handler exited with status " + std::to_string(result.exit_code);
        if (!result.stderr_text.empty()) error += ": " + result.stderr_text;
    }
    return result.stdout_text;
}

void LocalSimProvider::teardown(const DeploymentHandle& handle) {
    std::lock_guard lock(mu_);
    auto& fn = function_locked(handle.function_id);
    std::error_code ec;
    for (const auto& inst : fn.instances) fs::remove_all(inst->scratch_dir, ec);
    fs::remove(scratch_root_ / "instances" / handle.function_id, ec);
    if (!fn.code_dir.empty()) fs::remove_all(fn.code_dir, ec);
    functions_.erase(handle.function_id);
}

void LocalSimProvider::evict(const DeploymentHandle& handle) {
    std::lock_guard lock(mu_);
    auto& fn = function_locked(handle.function_id);
    std::vector<SimInstance*> idle;
    for (const auto& inst : fn.instances) {
        if (inst->busy_slots == 0) idle.push_back(inst.get());
    }
    for (auto* inst : idle) remove_instance_locked(fn, inst);
}

DeploymentHandle LocalSimProvider::force_cold(const DeploymentHandle& handle) {
    evict(handle);
    return handle;
}

std::vector<LogLine> LocalSimProvider::fetch_logs(const DeploymentHandle& handle, std::int64_t since_ns) {
    std::lock_guard lock(mu_);
    const auto& fn = function_locked(handle.function_id);
    std::vector<LogLine> out;
    for (const auto& l : fn.logs) {
        if (l.timestamp_ns >= since_ns) out.push_back(l);
    }
    return out;
}

std::size_t LocalSimProvider::live_instances(const std::string& function_id) const {
    std::lock_guard lock(mu_);
    auto it = functions_.find(function_id);
    return it == functions_.end() ? 0 : it->second.instances.size();
}

std::size_t LocalSimProvider::peak_instances(const std::string& function_id) const {
    std::lock_guard lock(mu_);
    auto it = functions_.find(function_id);
    return it == functions_.end() ? 0 : it->second.peak_instances;
}

std::vector<fs::path> LocalSimProvider::scratch_dirs(const std::string& function_id) const {
    std::lock_guard lock(mu_);
    std::vector<fs::path> out;
    if (auto it = functions_.find(function_id); it != functions_.end()) {
        for (const auto& inst : it->second.instances) out.push_back(inst->scratch_dir);
    }
    return out;
}

std::vector<DeploymentHandle> LocalSimProvider::deployments() const {
    std::lock_guard lock(mu_);
    std::vector<DeploymentHandle> out;
    for (const auto& [id, fn] : functions_) out.push_back(fn.handle);
    return out;
}

DeploymentHandle LocalSimProvider::find(const std::string& function_id) const {
    std::lock_guard lock(mu_);
    auto it = functions_.find(function_id);
    if (it == functions_.end()) fail(ErrorCode::kNotFound, "unknown function '" + function_id + "'");
    return it->second.handle;
}

json LocalSimProvider::save_state() const {
    std::lock_guard lock(mu_);
    json fns = json::array();
    for (const auto& [id, fn] : functions_) {
        json insts = json::array();
        for (const auto& inst : fn.instances) {
            insts.push_back({{"instance_id", inst->instance_id},
                             {"scratch_dir", inst->scratch_dir.string()},
                             {"born_at_ns", inst->born_at_ns},
                             {"last_used_at_ns", inst->last_used_at_ns},
                             {"busy_until_ns", inst->busy_until_ns},
                             {"warm", inst->state == InstanceState::kWarm}});
        }
        json logs = json::array();
        for (const auto& l : fn.logs) logs.push_back(to_json(l));
        fns.push_back({{"handle", to_json(fn.handle)},
                       {"artifact", to_json(fn.artifact)},
                       {"code_dir", fn.code_dir.string()},
                       {"instances", insts},
                       {"logs", logs},
                       {"peak_instances", fn.peak_instances},
                       {"next_seq", fn.next_seq}});
    }
    json state = {{"functions", fns}, {"jitter", jitter_.save()}, {"next_instance", next_instance_}};
    if (clock_.is_virtual()) state["virtual_now_ns"] = clock_.now_ns();
    return state;
}

void LocalSimProvider::restore_state(const json& state) {
    std::lock_guard lock(mu_);
    functions_.clear();
    for (const auto& f : state.value("functions", json::array())) {
        Function fn;
        fn.handle = handle_from_json(f.at("handle"));
        fn.artifact = artifact_from_json(f.at("artifact"));
        fn.code_dir = f.value("code_dir", std::string());
        fn.peak_instances = f.value("peak_instances", std::size_t{0});
        fn.next_seq = f.value("next_seq", std::uint64_t{0});
        for (const auto& i : f.value("instances", json::array())) {
            auto inst = std::make_unique<SimInstance>();
            inst->instance_id = i.at("instance_id").get<std::string>();
            inst->scratch_dir = i.at("scratch_dir").get<std::string>();
            inst->born_at_ns = i.at("born_at_ns").get<std::int64_t>();
            inst->last_used_at_ns = i.at("last_used_at_ns").get<std::int64_t>();
            inst->busy_until_ns = i.value("busy_until_ns", std::vector<std::int64_t>{});
            inst->state = i.value("warm", true) ? InstanceState::kWarm : InstanceState::kInitializing;
            // Instances whose scratch dir vanished cannot be reused.
            std::error_code ec;
            if (fs::is_directory(inst->scratch_dir, ec)) fn.instances.push_back(std::move(inst));
        }
        for (const auto& l : f.value("logs", json::array())) {
            LogLine line{l.at("timestamp_ns").get<std::int64_t>(), l.at("function_id").get<std::string>(),
                         l.at("message").get<std::string>(), std::nullopt};
            if (l.contains("exec_ms")) line.exec_ms = l.at("exec_ms").get<double>();
            fn.logs.push_back(std::move(line));
        }
        std::lock_guard art_lock(artifacts_mu_);
        deployed_artifacts_[fn.handle.function_id] = fn.artifact;
        functions_.emplace(fn.handle.function_id, std::move(fn));
    }
    if (state.contains("jitter")) jitter_.restore(state.at("jitter").get<std::string>());
    next_instance_ = state.value("next_instance", std::uint64_t{0});
    if (state.contains("virtual_now_ns") && clock_.is_virtual()) {
        static_cast<VirtualClock&>(clock_).jump_to(state.at("virtual_now_ns").get<std::int64_t>());
    }
}

WorkloadManifest synthetic_manifest() {
    WorkloadManifest m;
    m.id = "synthetic";
    m.language = {"python", ""};
    m.handler = kSyntheticHandler;
    m.trigger = Trigger::kHttp;
    m.params = {{"sleep_ms", 0}};
    m.expected_output_schema = {"result", "exec_ms", "first_run"};
    return m;
}

void write_synthetic_workload(const fs::path& dir, std::uint64_t target_unzipped_bytes) {
    fs::create_directories(dir);
    const auto manifest = synthetic_manifest();
    const auto text = serialize_manifest(manifest);
    std::ofstream(dir / kManifestFileName, std::ios::binary) << text;
    std::error_code ec;
    fs::remove(dir / "filler.bin", ec);
    if (target_unzipped_bytes > text.size()) {
        const auto filler = padding_bytes(target_unzipped_bytes - text.size());
        std::ofstream os(dir / "filler.bin", std::ios::binary);
        os.write(reinterpret_cast<const char*>(filler.data()), static_cast<std::streamsize>(filler.size()));
    }
}

}  // namespace slsbench
