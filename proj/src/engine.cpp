#include "gea/engine.hpp"

#include <algorithm>
#include <iostream>
#include <map>

#include "gea/errors.hpp"
#include "gea/rng.hpp"

namespace gea {

namespace {

// Sub-generator streams derived per (run seed, iteration, agent).
constexpr std::uint64_t kTraceStream = 0;
constexpr std::uint64_t kOperatorStream = 1;

constexpr std::size_t kDefaultGateSize = 10;

std::vector<std::size_t> checked_indices(const std::vector<std::size_t>& indices,
                                         const SimWorld& world, const char* what) {
    for (auto t : indices) {
        if (t >= world.size()) {
            throw InvalidArgument(std::string(what) + " task index " + std::to_string(t) +
                                  " outside the world");
        }
    }
    return indices;
}

void update_best(const Archive& archive, IterationRecord& record) {
    bool found = false;
    for (const auto& r : archive.records()) {
        if (!r.selectable()) continue;
        if (!found || r.performance > record.best_performance) {
            record.best_id = r.id;
            record.best_performance = r.performance;
            found = true;
        }
    }
}

/// Offspring pipeline for one group; the group order is the order its traces
/// are collected in. Offspring are inserted in ascending parent id order.
void evolve_group(EngineState& state, std::uint64_t step_index, const std::vector<GroupEntry>& group,
                  bool share_experience, const RunConfig& cfg, const SimWorld& world,
                  EvolutionOperator& op, IterationRecord& record) {
    const auto probe = cfg.probe_tasks(world);
    const auto gate = cfg.gate_tasks(world);
    const OperatorProfile& profile = cfg.schedule.profile_at(step_index);
    const std::uint64_t iteration = step_index + 1;
    const Archive snapshot = state.archive;

    record.iteration = iteration;
    record.profile = profile.name;
    record.group = group;

    for (const auto& member : group) {
        Rng rng(derive_seed(cfg.seed, iteration, member.id.value, kTraceStream));
        record.traces.push_back(collect_trace(snapshot.at(member.id), world, probe, rng));
    }

    std::vector<AgentId> parents;
    for (const auto& member : group) parents.push_back(member.id);
    std::sort(parents.begin(), parents.end());

    std::map<AgentId, SharedExperience> experience;
    if (share_experience) {
        const SharedExperience shared = aggregate(record.traces);
        for (auto id : parents) experience.emplace(id, shared);
        for (auto id : shared.contributors()) record.contributors.push_back(id);
    } else {
        for (const auto& trace : record.traces) experience.emplace(trace.agent, self_only(trace));
        for (auto id : parents) record.contributors.push_back(id);
    }

    for (auto parent_id : parents) {
        const AgentRecord& parent = snapshot.at(parent_id);
        const SharedExperience& s = experience.at(parent_id);
        Rng rng(derive_seed(cfg.seed, iteration, parent_id.value, kOperatorStream));

        Directive directive = op.reflect(parent, s, profile, rng);
        if (auto violation = directive_violation(directive, parent_id, s)) {
            throw InvalidArgument("operator produced an invalid directive: " + *violation);
        }
        std::vector<Patch> patches =
            op.evolve(parent, directive, s, profile, world, rng);
        for (auto& patch : patches) {
            patch.id = state.next_patch_id++;
            patch.delta_score.reset();
        }

        AgentRecord child = derive_child(parent, state.archive.next_id(), iteration);
        const bool compiles =
            std::all_of(patches.begin(), patches.end(),
                        [&](const Patch& p) { return well_formed(p, world); });
        if (compiles) {
            child = act(child, patches, world, probe).agent;
            child.gate_status = solved_count(child, world, gate) == 0 ? GateStatus::failed_basic
                                                                      : GateStatus::passed;
        } else {
            for (const auto& patch : patches) child.patches.push_back(patch);
            child.gate_status = GateStatus::failed_compile;
        }

        record.directives.push_back(std::move(directive));
        state.archive.insert(child);
        record.offspring.push_back(std::move(child));
    }

    record.archive_size = state.archive.size();
    record.selectable_size = state.archive.selectable_count();
    update_best(state.archive, record);
}

std::vector<GroupEntry> entries_for(const Archive& archive, const ParentGroup& group) {
    std::vector<GroupEntry> out;
    for (std::size_t i = 0; i < group.size(); ++i) {
        out.push_back({group.members[i], group.scores[i], group.novelties[i],
                       archive.at(group.members[i]).performance});
    }
    return out;
}

void run_trial_iterations(EngineState& state, RunTranscript& transcript) {
    const InjectionRecord& injection = *transcript.injection;
    const RunConfig& cfg = transcript.config;
    AgentId head = injection.faulty;
    std::optional<AgentId> partner_head =
        cfg.mode == EvolutionMode::gea ? injection.partner : std::optional<AgentId>{};
    ScriptedOperator op;
    for (std::uint64_t i = 0; i < cfg.iterations; ++i) {
        std::vector<GroupEntry> group{{head, 0.0, 0.0, state.archive.at(head).performance}};
        if (partner_head) {
            group.push_back({*partner_head, 0.0, 0.0, state.archive.at(*partner_head).performance});
        }
        IterationRecord record;
        evolve_group(state, i, group, cfg.mode == EvolutionMode::gea, cfg, transcript.world, op,
                     record);
        for (const auto& child : record.offspring) {
            if (child.framework_parent == head) {
                head = child.id;
            } else if (partner_head && child.framework_parent == *partner_head) {
                partner_head = child.id;
            }
        }
        transcript.iterations.push_back(std::move(record));
    }
}

}  // namespace

std::string_view to_string(EvolutionMode mode) {
    return mode == EvolutionMode::gea ? "gea" : "tree";
}

EvolutionMode evolution_mode_from_string(std::string_view text) {
    if (text == "gea") return EvolutionMode::gea;
    if (text == "tree") return EvolutionMode::tree;
    throw InvalidArgument("unknown mode '" + std::string(text) + "' (expected gea or tree)");
}

std::vector<std::size_t> RunConfig::gate_tasks(const SimWorld& world) const {
    if (!gate.empty()) return checked_indices(gate, world, "gate");
    std::vector<std::size_t> out;
    for (std::size_t t = 0; t < std::min(kDefaultGateSize, world.size()); ++t) out.push_back(t);
    return out;
}

std::vector<std::size_t> RunConfig::probe_tasks(const SimWorld& world) const {
    if (!probe.empty()) return checked_indices(probe, world, "probe");
    return all_tasks(world);
}

void RunConfig::validate() const {
    selection.validate();
    if (iterations < 1) throw InvalidArgument("run: iterations must be >= 1");
    schedule.validate(iterations);
    if (world.D < 1 || world.n_tools < 1) throw InvalidArgument("run: invalid world size");
}

RunConfig matched_baseline(const RunConfig& gea_config) {
    RunConfig tree = gea_config;
    const std::uint64_t factor = gea_config.selection.K;
    tree.mode = EvolutionMode::tree;
    tree.iterations = gea_config.iterations * factor;
    tree.schedule = gea_config.schedule.scaled(factor);
    return tree;
}

RunConfig matched_baseline(const RunConfig& gea_config, std::size_t evolved_agents) {
    RunConfig tree = matched_baseline(gea_config);
    if (evolved_agents < 1 || evolved_agents > tree.iterations) {
        throw InvalidArgument("matched_baseline: " + std::to_string(evolved_agents) +
                              " evolved agents outside 1.." + std::to_string(tree.iterations));
    }
    tree.schedule = tree.schedule.without_first(tree.iterations - evolved_agents);
    tree.iterations = evolved_agents;
    return tree;
}

SimWorld world_for(const RunConfig& cfg) {
    return generate_world(cfg.world.D, cfg.world.n_tools, cfg.world.seed.value_or(cfg.seed));
}

Archive RunTranscript::final_archive() const {
    Archive archive(initial.empty() ? 0 : initial.front().z.size(), config.seed);
    for (const auto& r : initial) archive.insert(r);
    for (const auto& it : iterations) {
        for (const auto& r : it.offspring) archive.insert(r);
    }
    return archive;
}

std::size_t RunTranscript::evolved_agents() const {
    std::size_t total = 0;
    for (const auto& it : iterations) total += it.offspring.size();
    return total;
}

IterationRecord step(EngineState& state, std::uint64_t step_index, const RunConfig& cfg,
                     const SimWorld& world, EvolutionOperator& op) {
    if (state.archive.selectable_count() == 0) {
        throw EmptyArchiveError("step: archive has no selectable agent");
    }
    SelectionConfig selection = cfg.selection;
    selection.K = cfg.effective_group_size();
    const ParentGroup group = select_parent_group(state.archive, selection);

    IterationRecord record;
    evolve_group(state, step_index, entries_for(state.archive, group),
                 cfg.mode == EvolutionMode::gea, cfg, world, op, record);
    return record;
}

RunTranscript run(const RunConfig& cfg, const SimWorld& world, EvolutionOperator& op) {
    cfg.validate();
    RunTranscript transcript;
    transcript.config = cfg;
    transcript.world = world;

    const auto probe = cfg.probe_tasks(world);
    EngineState state{Archive(probe.size(), cfg.seed), 0};
    AgentRecord seed = make_seed_agent(world, probe);
    if (solved_count(seed, world, cfg.gate_tasks(world)) == 0) {
        seed.gate_status = GateStatus::failed_basic;
    }
    state.archive.insert(seed);
    transcript.initial.push_back(std::move(seed));

    for (std::uint64_t i = 0; i < cfg.iterations; ++i) {
        transcript.iterations.push_back(step(state, i, cfg, world, op));
    }
    return transcript;
}

RunTranscript run(const RunConfig& cfg) {
    ScriptedOperator op;
    return run(cfg, world_for(cfg), op);
}

RunTranscript run_robustness_trial(const RunTranscript& source_run, AgentId source,
                                   std::optional<AgentId> partner, const std::string& bug,
                                   const RobustnessTrialConfig& trial) {
    const SimWorld& world = source_run.world;
    RunTranscript transcript;
    transcript.config = source_run.config;
    transcript.config.mode = trial.mode;
    transcript.config.seed = trial.seed;
    transcript.config.iterations = trial.max_iterations;
    transcript.config.schedule = PhaseSchedule::uniform(trial.max_iterations, trial.profile);
    transcript.config.validate();
    transcript.world = world;

    const auto probe = transcript.config.probe_tasks(world);
    EngineState state{source_run.final_archive(), 0};
    for (const auto& r : state.archive.records()) {
        for (const auto& p : r.patches) state.next_patch_id = std::max(state.next_patch_id, p.id + 1);
    }
    if (trial.mode == EvolutionMode::gea && !partner) {
        throw InvalidArgument("robustness: GEA pairing needs a bug-free partner");
    }
    if (partner && !state.archive.at(*partner).broken_bugs.empty()) {
        throw InvalidArgument("robustness: partner must be bug-free");
    }

    const AgentRecord& original = state.archive.at(source);
    AgentRecord faulty = inject_bug(derive_child(original, state.archive.next_id(), 0), bug, world);
    assign_outcome(faulty, evaluate_on(faulty, world, probe));
    faulty.gate_status = GateStatus::passed;
    state.archive.insert(faulty);

    transcript.injection = InjectionRecord{source, faulty.id, partner, bug, original.performance};
    for (const auto& r : state.archive.records()) transcript.initial.push_back(r);
    run_trial_iterations(state, transcript);
    return transcript;
}

RunTranscript reexecute(const RunTranscript& recorded) {
    if (!recorded.injection) {
        ScriptedOperator op;
        return run(recorded.config, world_for(recorded.config), op);
    }
    RunTranscript transcript;
    transcript.config = recorded.config;
    transcript.config.validate();
    transcript.world = recorded.world;
    transcript.initial = recorded.initial;
    transcript.injection = recorded.injection;
    if (recorded.initial.empty()) throw ReplayError("robustness transcript has no initial records");
    EngineState state{Archive(recorded.initial.front().z.size(), recorded.config.seed), 0};
    for (const auto& r : recorded.initial) {
        state.archive.insert(r);
        for (const auto& p : r.patches) state.next_patch_id = std::max(state.next_patch_id, p.id + 1);
    }
    run_trial_iterations(state, transcript);
    return transcript;
}

}  // namespace gea
