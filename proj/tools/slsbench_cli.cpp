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

// slsbench: package, deploy, invoke, sweep and report serverless benchmarks.

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "slsbench/clock.hpp"
#include "slsbench/engine.hpp"
#include "slsbench/error.hpp"
#include "slsbench/experiment.hpp"
#include "slsbench/http_provider.hpp"
#include "slsbench/localsim.hpp"
#include "slsbench/metrics.hpp"
#include "slsbench/packaging.hpp"
#include "slsbench/platform.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace slsbench;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitViolations = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitUsage = 3;

json read_json_file(const fs::path& file) {
    std::ifstream in(file);
    if (!in) fail(ErrorCode::kNotFound, "cannot read '" + file.string() + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        fail(ErrorCode::kInvalidArgument, file.string() + ": " + e.what());
    }
}

void write_json_file(const fs::path& file, const json& doc) {
    fs::create_directories(file.parent_path());
    const auto tmp = file.string() + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) fail(ErrorCode::kIo, "cannot write '" + file.string() + "'");
        os << doc.dump(2) << "\n";
    }
    fs::rename(tmp, file);
}

// Global settings after layering flags over the config file.
struct Settings {
    fs::path output = "slsbench-out";
    std::optional<std::uint64_t> seed;
    fs::path profile_overlay;
    json sim_model;  // null: reference model
    fs::path workloads = "workloads";
    json http = json::object();
    bool real_clock = false;
    bool quiet = false;
};

struct GlobalFlags {
    std::string config;
    std::string output;
    std::uint64_t seed = 0;
    CLI::Option* seed_opt = nullptr;
    std::string profile_overlay;
    std::string sim_model;
    std::string workloads;
    bool real_clock = false;
    bool quiet = false;
};

Settings resolve_settings(const GlobalFlags& flags) {
    Settings s;
    std::string config = flags.config;
    if (config.empty()) {
        if (const char* env = std::getenv("SLSBENCH_CONFIG")) config = env;
    }
    if (!config.empty()) {
        const auto doc = read_json_file(config);
        const auto base = fs::path(config).parent_path();
        auto rel = [&](const std::string& p) { return fs::path(p).is_absolute() ? fs::path(p) : base / p; };
        if (doc.contains("output")) s.output = rel(doc.at("output").get<std::string>());
        if (doc.contains("seed")) s.seed = doc.at("seed").get<std::uint64_t>();
        if (doc.contains("profile_overlay")) s.profile_overlay = rel(doc.at("profile_overlay").get<std::string>());
        if (doc.contains("sim_model")) {
            const auto& m = doc.at("sim_model");
            s.sim_model = m.is_string() ? read_json_file(rel(m.get<std::string>())) : m;
        }
        if (doc.contains("workloads")) s.workloads = rel(doc.at("workloads").get<std::string>());
        if (doc.contains("http")) s.http = doc.at("http");
        if (doc.contains("clock")) s.real_clock = doc.at("clock").get<std::string>() == "real";
        s.quiet = doc.value("quiet", false);
    }
    if (!flags.output.empty()) {
        s.output = flags.output;
    } else if (const char* env = std::getenv("SLSBENCH_OUTPUT"); env != nullptr && config.empty()) {
        s.output = env;
    }
    if (flags.seed_opt != nullptr && flags.seed_opt->count() > 0) s.seed = flags.seed;
    if (!flags.profile_overlay.empty()) s.profile_overlay = flags.profile_overlay;
    if (!flags.sim_model.empty()) s.sim_model = read_json_file(flags.sim_model);
    if (!flags.workloads.empty()) s.workloads = flags.workloads;
    if (flags.real_clock) s.real_clock = true;
    if (flags.quiet) s.quiet = true;
    return s;
}

class Cli {
public:
    explicit Cli(Settings settings) : s_(std::move(settings)) {}

    void progress(const std::string& message) const {
        if (!s_.quiet) std::cerr << "slsbench: " << message << "\n";
    }

    std::vector<PlatformProfile> profiles() const {
        auto all = builtin_profiles();
        if (!s_.profile_overlay.empty()) all = apply_overlay(all, read_json_file(s_.profile_overlay));
        return all;
    }

    PlatformProfile profile(const std::string& name) const {
        for (auto& p : profiles()) {
            if (p.name == name) return p;
        }
        fail(ErrorCode::kInvalidArgument, "unknown platform '" + name + "'");
    }

    SimModel sim_model(const json& override_doc = nullptr) const {
        SimModel m = reference_sim_model();
        if (!override_doc.is_null()) {
            m = sim_model_from_json(override_doc);
        } else if (!s_.sim_model.is_null()) {
            m = sim_model_from_json(s_.sim_model);
        }
        if (s_.seed) m.seed = *s_.seed;
        return m;
    }

    WorkloadCatalog catalog() const { return WorkloadCatalog(s_.workloads, s_.output / "packages"); }

    Clock& clock_for(const std::string& provider) {
        if (provider == kLocalSimProvider && !s_.real_clock) return virtual_clock_;
        return steady_clock_;
    }

    std::unique_ptr<Provider> make_provider(const std::string& provider, const PlatformProfile& profile,
                                            const fs::path& scratch, const json& model_doc = nullptr) {
        if (provider == kLocalSimProvider) {
            return std::make_unique<LocalSimProvider>(profile, sim_model(model_doc), clock_for(provider),
                                                      LocalSimOptions{scratch});
        }
        if (provider == kHttpProvider) {
            return std::make_unique<HttpProvider>(profile, http_config_from_json(s_.http), clock_for(provider));
        }
        fail(ErrorCode::kInvalidArgument, "unknown provider '" + provider + "' (local-sim, http)");
    }

    // Provider state shared by deploy/invoke/logs/clean across processes.
    fs::path state_dir() const { return s_.output / "state"; }
    fs::path registry_file() const { return state_dir() / "registry.json"; }
    fs::path sim_state_file(const std::string& platform) const {
        return state_dir() / ("sim-" + platform + ".json");
    }
    fs::path sim_scratch(const std::string& platform) const { return state_dir() / ("sim-" + platform); }

    json registry() const { return fs::exists(registry_file()) ? read_json_file(registry_file()) : json::object(); }

    std::unique_ptr<Provider> open_persistent(const std::string& provider, const std::string& platform) {
        auto p = make_provider(provider, profile(platform), sim_scratch(platform));
        if (auto* sim = dynamic_cast<LocalSimProvider*>(p.get()); sim && fs::exists(sim_state_file(platform))) {
            sim->restore_state(read_json_file(sim_state_file(platform)));
        }
        if (auto* http = dynamic_cast<HttpProvider*>(p.get())) {
            for (const auto& [id, entry] : registry().items()) {
                if (entry.at("provider") == kHttpProvider) http->adopt(handle_from_json(entry.at("handle")));
            }
        }
        return p;
    }

    void save_persistent(Provider& provider, const std::string& platform) {
        if (auto* sim = dynamic_cast<LocalSimProvider*>(&provider)) {
            write_json_file(sim_state_file(platform), sim->save_state());
        }
    }

    const Settings& settings() const { return s_; }

private:
    Settings s_;
    VirtualClock virtual_clock_;
    SteadyClock steady_clock_;
};

DeploymentSpec spec_from_flags(const PackageArtifact& artifact, const std::string& language, unsigned memory,
                               double timeout, const std::string& region) {
    DeploymentSpec spec;
    spec.language = language.empty() ? artifact.manifest.language : LanguageRef::parse(language);
    spec.memory_mb = memory;
    spec.timeout_s = timeout;
    spec.region = region;
    spec.package = artifact.ref();
    spec.trigger = artifact.manifest.trigger;
    return spec;
}

void print_violations(const ValidationReport& report, const Cli& cli) {
    for (const auto& v : report.violations) std::cout << v.kind << "\t" << v.message << "\n";
    for (const auto& w : report.warnings) cli.progress("warning: " + w);
}

SizeVariant parse_variant(const std::string& text) {
    // label=bytes[:import]
    const auto eq = text.find('=');
    if (eq == std::string::npos || eq == 0) {
        fail(ErrorCode::kInvalidArgument, "variant '" + text + "' is not label=bytes[:import]");
    }
    SizeVariant v;
    v.label = text.substr(0, eq);
    auto rest = text.substr(eq + 1);
    if (const auto colon = rest.find(':'); colon != std::string::npos) {
        if (rest.substr(colon + 1) != "import") fail(ErrorCode::kInvalidArgument, "unknown variant flag in '" + text + "'");
        v.import_at_init = true;
        rest = rest.substr(0, colon);
    }
    try {
        std::size_t used = 0;
        v.padding_bytes = std::stoll(rest, &used);
        if (used != rest.size()) throw std::invalid_argument(rest);
    } catch (const std::logic_error&) {
        fail(ErrorCode::kInvalidArgument, "variant size '" + rest + "' is not an integer");
    }
    return v;
}

// Executes a plan in runs/<id>, resuming from its journal, and writes the
// report next to it.
int execute_plan(Cli& cli, ExperimentPlan plan, const fs::path& plan_base, bool fresh, const std::string& provider_flag,
                 const std::string& platform_flag) {
    if (!provider_flag.empty()) plan.provider = provider_flag;
    if (!platform_flag.empty()) plan.platform = platform_flag;
    json model_doc = nullptr;
    if (!plan.sim_model.empty() && cli.settings().sim_model.is_null()) {
        auto p = fs::path(plan.sim_model);
        if (p.is_relative() && !fs::exists(p)) p = plan_base / p;
        model_doc = read_json_file(p);
    }
    plan.check();

    const auto run_dir = cli.settings().output / "runs" / plan.id;
    if (fresh) fs::remove_all(run_dir);
    json meta = {{"plan_digest", plan_digest(plan)},
                 {"provider", plan.provider},
                 {"platform", plan.platform},
                 {"clock", cli.clock_for(plan.provider).is_virtual() ? "virtual" : "real"}};
    if (plan.provider == kLocalSimProvider) meta["sim_model"] = to_json(cli.sim_model(model_doc));
    const auto meta_file = run_dir / "run.json";
    if (fs::exists(meta_file) && read_json_file(meta_file) != meta) {
        fail(ErrorCode::kInvalidArgument,
             "run directory '" + run_dir.string() + "' holds a different configuration; pass --fresh to replace it");
    }
    write_json_file(meta_file, meta);

    auto provider = cli.make_provider(plan.provider, cli.profile(plan.platform), run_dir / "sim", model_doc);
    auto catalog = cli.catalog();
    EngineOptions options;
    options.run_dir = run_dir;
    options.progress = [&](const std::string& m) { cli.progress(m); };
    // Fault injection for crash-recovery testing: SIGKILL after N new trials.
    if (const char* crash = std::getenv("SLSBENCH_KILL_AFTER_TRIALS")) {
        const long limit = std::atol(crash);
        options.after_trial = [limit, n = 0L](const TrialResult&) mutable {
            if (++n >= limit) std::raise(SIGKILL);
        };
    }
    ExperimentEngine engine(*provider, options);
    const auto results = engine.run_plan(plan, catalog);
    const auto files = report(plan, results, run_dir / "report");

    std::size_t valid = 0, failed_points = 0, trials = 0;
    for (const auto& t : results) {
        if (t.point_failed) {
            ++failed_points;
            continue;
        }
        ++trials;
        if (t.valid) ++valid;
    }
    json out = {{"plan", plan.id},
                {"run_dir", run_dir.string()},
                {"trials", trials},
                {"valid", valid},
                {"failed_points", failed_points},
                {"files", json::array()}};
    for (const auto& f : files) out["files"].push_back(f.string());
    std::cout << out.dump(2) << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"slsbench: serverless benchmark harness"};
    app.require_subcommand(1);
    // Global flags may follow the subcommand.
    app.fallthrough();
    GlobalFlags g;
    app.add_option("--config", g.config, "Settings document (env SLSBENCH_CONFIG)");
    app.add_option("--output", g.output, "Output directory (env SLSBENCH_OUTPUT)");
    g.seed_opt = app.add_option("--seed", g.seed, "Seed for every stochastic component");
    app.add_option("--profile-overlay", g.profile_overlay, "Partial profile documents merged over the builtins");
    app.add_option("--sim-model", g.sim_model, "Simulator model document");
    app.add_option("--workloads", g.workloads, "Directory holding workload directories");
    app.add_flag("--real-clock", g.real_clock, "Run the simulator on the wall clock");
    app.add_flag("--quiet", g.quiet, "Suppress progress on stderr");

    auto* platforms = app.add_subcommand("platforms", "List or show platform profiles");
    platforms->require_subcommand(1);
    platforms->add_subcommand("list", "Profile names, alphabetical");
    std::string show_name;
    platforms->add_subcommand("show", "One profile document")->add_option("name", show_name)->required();

    std::string workload, platform = "aws", language, region, provider_name = kLocalSimProvider;
    unsigned memory = 128;
    double timeout = 60;

    auto* validate_cmd = app.add_subcommand("validate", "Check a workload against a platform's limits");
    validate_cmd->add_option("workload", workload)->required();
    validate_cmd->add_option("--platform", platform);
    validate_cmd->add_option("--language", language);
    validate_cmd->add_option("--memory", memory);
    validate_cmd->add_option("--timeout", timeout);
    validate_cmd->add_option("--region", region);
    bool validate_json = false;
    validate_cmd->add_flag("--json", validate_json, "Print the full report document");

    auto* package_cmd = app.add_subcommand("package", "Build a reproducible workload archive");
    package_cmd->add_option("workload", workload)->required();
    std::vector<std::string> variants;
    package_cmd->add_option("--variant", variants, "Size variant label=bytes[:import]");

    auto* deploy_cmd = app.add_subcommand("deploy", "Deploy a workload");
    deploy_cmd->add_option("workload", workload)->required();
    deploy_cmd->add_option("--provider", provider_name);
    deploy_cmd->add_option("--platform", platform);
    deploy_cmd->add_option("--language", language);
    deploy_cmd->add_option("--memory", memory);
    deploy_cmd->add_option("--timeout", timeout);
    deploy_cmd->add_option("--region", region);

    std::string function_id, payload_file;
    auto* invoke_cmd = app.add_subcommand("invoke", "Invoke a deployed function");
    invoke_cmd->add_option("function", function_id)->required();
    invoke_cmd->add_option("--payload", payload_file, "Payload document");
    invoke_cmd->add_option("--timeout", timeout);

    std::int64_t since_ns = 0;
    auto* logs_cmd = app.add_subcommand("logs", "Fetch execution logs of a function");
    logs_cmd->add_option("function", function_id)->required();
    logs_cmd->add_option("--since", since_ns, "Only lines at or after this timestamp (ns)");

    std::string plan_file, run_provider, run_platform;
    bool fresh = false;
    auto* run_cmd = app.add_subcommand("run", "Run an experiment plan");
    run_cmd->add_option("plan", plan_file)->required();
    run_cmd->add_option("--provider", run_provider);
    run_cmd->add_option("--platform", run_platform);
    run_cmd->add_flag("--fresh", fresh, "Discard an earlier run of the plan");

    std::string sweep_name;
    bool sweep_list = false;
    int repetitions = 0;
    auto* sweep_cmd = app.add_subcommand("sweep", "Run a built-in sweep");
    sweep_cmd->add_option("name", sweep_name);
    sweep_cmd->add_option("--provider", run_provider);
    sweep_cmd->add_option("--platform", run_platform);
    sweep_cmd->add_option("--repetitions", repetitions, "Override the repetition count");
    sweep_cmd->add_flag("--fresh", fresh, "Discard an earlier run of the sweep");
    sweep_cmd->add_flag("--list", sweep_list, "List the built-in sweeps");

    std::string run_dir, format = "all";
    auto* report_cmd = app.add_subcommand("report", "Summarize a run directory");
    report_cmd->add_option("run-dir", run_dir)->required();
    report_cmd->add_option("--format", format)->check(CLI::IsMember({"csv", "figures", "all"}));

    bool clean_all = false;
    std::string clean_run;
    auto* clean_cmd = app.add_subcommand("clean", "Tear down deployments and remove outputs");
    clean_cmd->add_flag("--all", clean_all, "Also remove runs and packages");
    clean_cmd->add_option("--run", clean_run, "Remove one run directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        std::cout << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        std::cerr << "slsbench: " << e.what() << "\n\n" << app.help();
        return kExitUsage;
    }

    try {
        Cli cli(resolve_settings(g));

        if (platforms->parsed()) {
            if (platforms->got_subcommand("list")) {
                for (const auto& p : cli.profiles()) std::cout << p.name << "\n";
            } else {
                std::cout << to_json(cli.profile(show_name)).dump(2) << "\n";
            }
            return kExitOk;
        }

        if (validate_cmd->parsed()) {
            const auto profile = cli.profile(platform);
            auto catalog = cli.catalog();
            const auto& artifact = catalog.base(workload);
            const auto report = validate(profile, spec_from_flags(artifact, language, memory, timeout, region));
            if (validate_json) {
                std::cout << to_json(report).dump(2) << "\n";
            } else {
                print_violations(report, cli);
                if (report.accepted()) std::cout << "accepted\n";
            }
            return report.accepted() ? kExitOk : kExitViolations;
        }

        if (package_cmd->parsed()) {
            auto catalog = cli.catalog();
            json out = json::array();
            const auto& base = catalog.base(workload);
            out.push_back(to_json(base));
            for (const auto& v : variants) out.push_back(to_json(catalog.variant(workload, parse_variant(v))));
            std::cout << out.dump(2) << "\n";
            return kExitOk;
        }

        if (deploy_cmd->parsed()) {
            const auto profile = cli.profile(platform);
            auto catalog = cli.catalog();
            const auto& artifact = catalog.base(workload);
            const auto spec = spec_from_flags(artifact, language, memory, timeout, region);
            const auto report = validate(profile, spec);
            if (!report.accepted()) {
                print_violations(report, cli);
                return kExitViolations;
            }
            auto provider = cli.open_persistent(provider_name, platform);
            const auto handle = provider->deploy(artifact, spec);
            cli.save_persistent(*provider, platform);
            auto reg = cli.registry();
            reg[handle.function_id] = {{"provider", provider_name}, {"platform", platform}, {"handle", to_json(handle)}};
            write_json_file(cli.registry_file(), reg);
            cli.progress("deployed " + handle.function_id);
            std::cout << to_json(handle).dump(2) << "\n";
            return kExitOk;
        }

        if (invoke_cmd->parsed() || logs_cmd->parsed()) {
            const auto reg = cli.registry();
            if (!reg.contains(function_id)) fail(ErrorCode::kNotFound, "no deployed function '" + function_id + "'");
            const auto& entry = reg.at(function_id);
            const auto plat = entry.at("platform").get<std::string>();
            auto provider = cli.open_persistent(entry.at("provider").get<std::string>(), plat);
            const auto handle = handle_from_json(entry.at("handle"));
            if (invoke_cmd->parsed()) {
                const json payload = payload_file.empty() ? json::object() : read_json_file(payload_file);
                const auto record = provider->invoke(handle, payload, timeout);
                cli.save_persistent(*provider, plat);
                std::cout << to_json(record).dump(2) << "\n";
                return record.ok() ? kExitOk : kExitRuntime;
            }
            for (const auto& line : provider->fetch_logs(handle, since_ns)) std::cout << to_json(line).dump() << "\n";
            return kExitOk;
        }

        if (run_cmd->parsed()) {
            return execute_plan(cli, load_plan(plan_file), fs::path(plan_file).parent_path(), fresh, run_provider,
                                run_platform);
        }

        if (sweep_cmd->parsed()) {
            if (sweep_list) {
                for (const auto& p : builtin_sweeps()) std::cout << p.id << "\n";
                return kExitOk;
            }
            if (sweep_name.empty()) {
                std::cerr << "slsbench: sweep needs a name (see sweep --list)\n\n" << sweep_cmd->help();
                return kExitUsage;
            }
            auto plan = builtin_sweep(sweep_name);
            if (repetitions > 0) plan.repetitions = repetitions;
            return execute_plan(cli, plan, fs::current_path(), fresh, run_provider, run_platform);
        }

        if (report_cmd->parsed()) {
            const auto plan = plan_from_json(read_json_file(fs::path(run_dir) / "plan.json"));
            const auto results = load_run_results(run_dir, plan);
            ReportOptions options;
            options.csv = format != "figures";
            options.figures = format != "csv";
            for (const auto& f : report(plan, results, fs::path(run_dir) / "report", options)) {
                std::cout << f.string() << "\n";
            }
            return kExitOk;
        }

        if (clean_cmd->parsed()) {
            const auto out = cli.settings().output;
            if (!clean_run.empty()) {
                fs::remove_all(out / "runs" / clean_run);
                std::cout << "removed run " << clean_run << "\n";
                return kExitOk;
            }
            // Tear down everything in the registry, then drop provider state.
            const auto reg = cli.registry();
            std::map<std::pair<std::string, std::string>, std::unique_ptr<Provider>> open;
            for (const auto& [id, entry] : reg.items()) {
                const auto key = std::make_pair(entry.at("provider").get<std::string>(),
                                                entry.at("platform").get<std::string>());
                auto& p = open[key];
                if (!p) p = cli.open_persistent(key.first, key.second);
                try {
                    p->teardown(handle_from_json(entry.at("handle")));
                    std::cout << "torn down " << id << "\n";
                } catch (const Error& e) {
                    cli.progress(std::string("teardown of ") + id + ": " + e.what());
                }
            }
            open.clear();
            fs::remove_all(cli.state_dir());
            if (clean_all) {
                fs::remove_all(out / "runs");
                fs::remove_all(out / "packages");
            }
            return kExitOk;
        }
    } catch (const Error& e) {
        std::cerr << "slsbench: " << to_string(e.code()) << ": " << e.what() << "\n";
        switch (e.code()) {
            case ErrorCode::kInvalidArgument:
                return kExitUsage;
            case ErrorCode::kPrecondition:
                return kExitViolations;
            default:
                return kExitRuntime;
        }
    } catch (const std::exception& e) {
        std::cerr << "slsbench: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitUsage;
}
