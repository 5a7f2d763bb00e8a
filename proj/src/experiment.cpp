#include "gea/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "gea/errors.hpp"
#include "gea/persistence.hpp"
#include "gea/rng.hpp"

namespace gea {

namespace {

constexpr std::uint64_t kRobustnessStream = 2;

void read_stage_plan(const Json& j, ExperimentConfig& cfg) {
    ObjectReader r(j, "stage_plan");
    if (const Json* style = r.optional("style")) {
        try {
            cfg.stage_style = stage_style_from_string(style->get<std::string>());
        } catch (const std::exception& e) {
            throw ConfigError("stage_plan.style", e.what());
        }
    }
    cfg.promote_threshold = r.get_or("promote_threshold", cfg.promote_threshold);
    cfg.top_n_to_full = r.get_or("top_n_to_full", cfg.top_n_to_full);
    r.finish();
}

void read_analysis(const Json& j, AnalysisOptions& options) {
    ObjectReader r(j, "analysis");
    options.ranks = r.get_or("ranks", options.ranks);
    options.trajectory_top_n = r.get_or("trajectory_top_n", options.trajectory_top_n);
    r.finish();
}

void read_robustness(const Json& j, RobustnessOptions& options) {
    ObjectReader r(j, "robustness");
    options.trials = r.get_or("trials", options.trials);
    options.max_iterations = r.get_or("max_iterations", options.max_iterations);
    if (const Json* profile = r.optional("profile")) {
        options.profile = profile_from_json(*profile, "robustness.profile");
    }
    r.finish();
}

RemoteOperatorConfig read_operator(const Json& j) {
    ObjectReader r(j, "operator");
    RemoteOperatorConfig remote;
    remote.base_url = r.get<std::string>("base_url");
    remote.timeout = std::chrono::milliseconds(r.get_or<std::int64_t>("timeout_ms", remote.timeout.count()));
    remote.max_in_flight = r.get_or("max_in_flight", remote.max_in_flight);
    r.finish();
    return remote;
}

}  // namespace

void ExperimentConfig::validate() const {
    try {
        run.validate();
    } catch (const InvalidArgument& e) {
        throw ConfigError(run.iterations < 1 ? "iterations" : "schedule", e.what());
    }
    if (seeds.empty()) throw ConfigError("seeds", "seeds must not be empty");
    if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size()) {
        throw ConfigError("seeds", "seeds must be distinct");
    }
    if (!(promote_threshold > 0.0 && promote_threshold < 1.0)) {
        throw ConfigError("stage_plan.promote_threshold", "promote_threshold must lie in (0, 1)");
    }
    if (top_n_to_full < 1) throw ConfigError("stage_plan.top_n_to_full", "top_n_to_full must be >= 1");
    if (robustness.max_iterations < 1) {
        throw ConfigError("robustness.max_iterations", "max_iterations must be >= 1");
    }
    robustness.profile.validate();
}

StagePlan ExperimentConfig::stage_plan(const SimWorld& world) const {
    StagePlan plan = StagePlan::defaults(stage_style, world);
    plan.promote_threshold = promote_threshold;
    plan.top_n_to_full = top_n_to_full;
    return plan;
}

ExperimentConfig paper_desk_preset() {
    ExperimentConfig cfg;
    cfg.run.mode = EvolutionMode::gea;
    cfg.run.selection.K = 2;
    cfg.run.selection.M = 4;
    cfg.run.iterations = 30;
    cfg.run.schedule = PhaseSchedule::standard(30);
    cfg.run.world.D = 60;
    cfg.run.world.n_tools = 9;
    for (std::uint64_t s = 1; s <= 20; ++s) cfg.seeds.push_back(s);
    return cfg;
}

ExperimentConfig preset(const std::string& name) {
    if (name == "paper-desk") return paper_desk_preset();
    throw ConfigError("preset", "unknown preset '" + name + "'");
}

ExperimentConfig experiment_config_from_json(const Json& j) {
    if (!j.is_object()) throw ConfigError("<root>", "configuration must be a JSON object");
    ExperimentConfig cfg = paper_desk_preset();
    Json run_part = Json::object();
    for (const auto& [key, value] : j.items()) {
        if (key == "preset") {
            if (!value.is_string()) throw ConfigError("preset", "preset must be a string");
            cfg = preset(value.get<std::string>());
        }
    }
    for (const auto& [key, value] : j.items()) {
        try {
            if (key == "preset") {
                continue;
            } else if (key == "seeds") {
                cfg.seeds = value.get<std::vector<std::uint64_t>>();
            } else if (key == "out") {
                cfg.out = value.get<std::string>();
            } else if (key == "stage_plan") {
                read_stage_plan(value, cfg);
            } else if (key == "analysis") {
                read_analysis(value, cfg.analysis);
            } else if (key == "robustness") {
                read_robustness(value, cfg.robustness);
            } else if (key == "operator") {
                cfg.remote = read_operator(value);
            } else {
                run_part[key] = value;
            }
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(key, key + ": " + e.what());
        }
    }
    try {
        cfg.run = run_config_from_json(run_part, cfg.run, "config");
    } catch (const ConfigError& e) {
        // Report keys relative to the file root.
        std::string key = e.key();
        if (key.rfind("config.", 0) == 0) key = key.substr(7);
        throw ConfigError(key, e.what());
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
    Json j;
    try {
        j = Json::parse(read_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("<file>", path.string() + ": " + e.what());
    }
    return experiment_config_from_json(j);
}

RunTranscript run_with(const ExperimentConfig& experiment, const RunConfig& cfg) {
    if (experiment.remote) {
        RemoteOperator op(*experiment.remote);
        return run(cfg, world_for(cfg), op);
    }
    ScriptedOperator op;
    return run(cfg, world_for(cfg), op);
}

std::vector<SeedPair> run_pairs(const ExperimentConfig& experiment, std::size_t jobs,
                                const std::function<void(const SeedPair&)>& on_pair) {
    std::vector<SeedPair> pairs(experiment.seeds.size());
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex mutex;

    const auto worker = [&] {
        while (!failed) {
            const std::size_t i = next++;
            if (i >= pairs.size()) return;
            try {
                RunConfig gea_cfg = experiment.run;
                gea_cfg.mode = EvolutionMode::gea;
                gea_cfg.seed = experiment.seeds[i];
                SeedPair pair{gea_cfg.seed, run_with(experiment, gea_cfg), {}};
                pair.tree = run_with(experiment, matched_baseline(gea_cfg, pair.gea.evolved_agents()));
                std::lock_guard lock(mutex);
                if (on_pair && !failed) on_pair(pair);
                pairs[i] = std::move(pair);
            } catch (...) {
                std::lock_guard lock(mutex);
                if (!failed.exchange(true)) first_error = std::current_exception();
            }
        }
    };

    const std::size_t threads = std::clamp<std::size_t>(jobs, 1, pairs.size());
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
    return pairs;
}

double RobustnessSummary::mean(EvolutionMode mode) const {
    if (trials.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& t : trials) {
        const auto& r = mode == EvolutionMode::gea ? t.gea : t.tree;
        sum += static_cast<double>(r.value_or(max_iterations + 1));
    }
    return sum / static_cast<double>(trials.size());
}

std::size_t RobustnessSummary::unrepaired(EvolutionMode mode) const {
    return static_cast<std::size_t>(std::count_if(trials.begin(), trials.end(), [&](const auto& t) {
        return !(mode == EvolutionMode::gea ? t.gea : t.tree);
    }));
}

std::string RobustnessSummary::to_csv() const {
    std::ostringstream out;
    out << "method";
    for (std::size_t i = 0; i < trials.size(); ++i) out << ",E" << i + 1;
    out << ",Avg\n";
    out.setf(std::ios::fixed);
    out.precision(2);
    for (auto mode : {EvolutionMode::gea, EvolutionMode::tree}) {
        out << to_string(mode);
        for (const auto& t : trials) {
            const auto& r = mode == EvolutionMode::gea ? t.gea : t.tree;
            out << ',' << (r ? std::to_string(*r) : "NONE");
        }
        out << ',' << mean(mode) << '\n';
    }
    return out.str();
}

std::string RobustnessSummary::to_json() const {
    Json rows = Json::array();
    const auto cell = [](const std::optional<std::uint64_t>& r) { return r ? Json(*r) : Json(nullptr); };
    for (const auto& t : trials) {
        rows.push_back({{"source", t.source.value},
                        {"partner", t.partner.value},
                        {"bug", t.bug},
                        {"seed", t.seed},
                        {"gea", cell(t.gea)},
                        {"tree", cell(t.tree)}});
    }
    Json j{{"max_iterations", max_iterations},
           {"trials", rows},
           {"gea_mean", mean(EvolutionMode::gea)},
           {"tree_mean", mean(EvolutionMode::tree)},
           {"gea_unrepaired", unrepaired(EvolutionMode::gea)},
           {"tree_unrepaired", unrepaired(EvolutionMode::tree)}};
    return j.dump(2) + "\n";
}

RobustnessSummary run_robustness_experiment(const RunTranscript& source_run,
                                            const RobustnessOptions& options, std::uint64_t seed) {
    if (options.trials == 0) throw InvalidArgument("robustness: trials must be >= 1");
    const Archive archive = source_run.final_archive();
    const SimWorld& world = source_run.world;

    std::vector<std::pair<AgentId, AgentId>> groups;
    for (const auto& it : source_run.iterations) {
        if (it.group.size() < 2) continue;
        const AgentRecord& a = archive.at(it.group[0].id);
        const AgentRecord& b = archive.at(it.group[1].id);
        if (a.broken_bugs.empty() && b.broken_bugs.empty()) groups.emplace_back(a.id, b.id);
    }
    if (groups.empty()) throw InvalidArgument("robustness: source run has no bug-free parent group");

    RobustnessSummary summary;
    summary.max_iterations = options.max_iterations;
    for (std::size_t trial = 0; trial < options.trials; ++trial) {
        Rng rng(derive_seed(seed, trial, 0, kRobustnessStream));
        // Retry the group draw until it admits a bug with a visible footprint.
        std::optional<std::pair<AgentId, AgentId>> chosen;
        std::vector<std::string> bugs;
        for (std::size_t attempt = 0; attempt < 4 * groups.size() && !chosen; ++attempt) {
            const auto group = groups[rng.uniform_index(groups.size())];
            const AgentRecord& source = archive.at(group.first);
            bugs.clear();
            for (const auto& bug : world.bug_catalog) {
                const AgentRecord broken = inject_bug(source, bug, world);
                if (solved_count(broken, world, source_run.config.probe_tasks(world)) <
                    source.z.count()) {
                    bugs.push_back(bug);
                }
            }
            if (!bugs.empty()) chosen = group;
        }
        if (!chosen) throw InvalidArgument("robustness: no injectable bug lowers a sampled agent");

        RobustnessTrial result;
        result.source = chosen->first;
        result.partner = chosen->second;
        result.bug = bugs[rng.uniform_index(bugs.size())];
        result.seed = derive_seed(seed, trial, 1, kRobustnessStream);

        RobustnessTrialConfig trial_cfg;
        trial_cfg.profile = options.profile;
        trial_cfg.max_iterations = options.max_iterations;
        trial_cfg.seed = result.seed;
        trial_cfg.mode = EvolutionMode::gea;
        result.gea_transcript =
            run_robustness_trial(source_run, result.source, result.partner, result.bug, trial_cfg);
        result.gea = repair_iterations(result.gea_transcript);
        trial_cfg.mode = EvolutionMode::tree;
        result.tree_transcript =
            run_robustness_trial(source_run, result.source, std::nullopt, result.bug, trial_cfg);
        result.tree = repair_iterations(result.tree_transcript);
        summary.trials.push_back(std::move(result));
    }
    return summary;
}

}  // namespace gea
