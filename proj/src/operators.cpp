#include "gea/operators.hpp"

#include <algorithm>
#include <set>

#include "gea/errors.hpp"

namespace gea {

namespace {

void check_probability(double p, const std::string& profile, const char* field) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw InvalidArgument("profile '" + profile + "': " + field + " must lie in [0, 1]");
    }
}

bool failed_on_missing_tool(const EvolutionTrace& trace) {
    return trace.sampled_task && !trace.outcome.passed &&
           trace.outcome.failure_mode.find("missing-tools") != std::string::npos;
}

int priority(ActionKind kind) {
    switch (kind) {
        case ActionKind::repair_bug: return 0;
        case ActionKind::adopt_tool: return 1;
        case ActionKind::discover_tool: return 2;
    }
    return 3;
}

}  // namespace

void OperatorProfile::validate() const {
    check_probability(adopt_probability, name, "adopt_probability");
    check_probability(discover_probability, name, "discover_probability");
    check_probability(repair_probability_shared, name, "repair_probability_shared");
    check_probability(repair_probability_self, name, "repair_probability_self");
    if (repair_probability_shared < repair_probability_self) {
        throw InvalidArgument("profile '" + name +
                              "': repair_probability_shared must be >= repair_probability_self");
    }
    check_probability(regression_probability, name, "regression_probability");
    if (max_actions_per_step < 1) {
        throw InvalidArgument("profile '" + name + "': max_actions_per_step must be >= 1");
    }
}

OperatorProfile early_profile() { return {"early", 0.6, 0.15, 0.5, 0.1, 3, 0.8}; }

OperatorProfile late_profile() { return {"late", 0.85, 0.25, 0.9, 0.2, 3, 0.5}; }

OperatorProfile null_profile() { return {"null", 0.0, 0.0, 0.0, 0.0, 3, 0.0}; }

OperatorProfile robustness_profile() {
    OperatorProfile p = late_profile();
    p.name = "robustness";
    p.regression_probability = 0.0;
    return p;
}

PhaseSchedule::PhaseSchedule(std::vector<Phase> phases) : phases_(std::move(phases)) {}

PhaseSchedule PhaseSchedule::standard(std::uint64_t iterations) {
    const std::uint64_t late = iterations / 3;
    std::vector<Phase> phases;
    if (iterations - late > 0) phases.push_back({0, iterations - late, early_profile()});
    if (late > 0) phases.push_back({iterations - late, iterations, late_profile()});
    return PhaseSchedule(std::move(phases));
}

PhaseSchedule PhaseSchedule::uniform(std::uint64_t iterations, OperatorProfile profile) {
    return PhaseSchedule({Phase{0, iterations, std::move(profile)}});
}

void PhaseSchedule::validate(std::uint64_t total_iterations) const {
    if (phases_.empty()) throw InvalidArgument("phase schedule is empty");
    std::uint64_t expected = 0;
    for (const auto& phase : phases_) {
        if (phase.begin != expected) {
            throw InvalidArgument("phase schedule: ranges must be contiguous from 0 (gap or overlap at " +
                                  std::to_string(phase.begin) + ")");
        }
        if (phase.end <= phase.begin) throw InvalidArgument("phase schedule: empty phase range");
        phase.profile.validate();
        expected = phase.end;
    }
    if (expected != total_iterations) {
        throw InvalidArgument("phase schedule covers " + std::to_string(expected) +
                              " iterations, run has " + std::to_string(total_iterations));
    }
}

PhaseSchedule PhaseSchedule::scaled(std::uint64_t factor) const {
    std::vector<Phase> out = phases_;
    for (auto& phase : out) {
        phase.begin *= factor;
        phase.end *= factor;
    }
    return PhaseSchedule(std::move(out));
}

PhaseSchedule PhaseSchedule::without_first(std::uint64_t steps) const {
    std::vector<Phase> out;
    for (auto phase : phases_) {
        if (phase.end <= steps) continue;
        phase.begin = phase.begin > steps ? phase.begin - steps : 0;
        phase.end -= steps;
        out.push_back(std::move(phase));
    }
    return PhaseSchedule(std::move(out));
}

const OperatorProfile& PhaseSchedule::profile_at(std::uint64_t step) const {
    for (const auto& phase : phases_) {
        if (step >= phase.begin && step < phase.end) return phase.profile;
    }
    throw InvalidArgument("no phase covers iteration " + std::to_string(step));
}

std::string_view to_string(ActionKind kind) {
    switch (kind) {
        case ActionKind::adopt_tool: return "adopt-tool";
        case ActionKind::discover_tool: return "discover-tool";
        case ActionKind::repair_bug: return "repair-bug";
    }
    return "discover-tool";
}

ActionKind action_kind_from_string(std::string_view text) {
    if (text == "adopt-tool") return ActionKind::adopt_tool;
    if (text == "discover-tool") return ActionKind::discover_tool;
    if (text == "repair-bug") return ActionKind::repair_bug;
    throw InvalidArgument("unknown directive action '" + std::string(text) + "'");
}

std::optional<std::string> directive_violation(const Directive& directive, AgentId agent,
                                               const SharedExperience& experience) {
    if (directive.agent != agent) {
        return "directive targets agent " + std::to_string(directive.agent.value) +
               ", expected " + std::to_string(agent.value);
    }
    for (const auto& action : directive.actions) {
        if (action.kind == ActionKind::adopt_tool) {
            if (action.payload.empty()) return std::string("adopt-tool without a tool");
            if (!action.origin || !experience.contains(*action.origin)) {
                return "adopt-tool " + action.payload + " has origin outside the shared experience";
            }
        }
        if (action.kind == ActionKind::repair_bug) {
            if (action.payload.empty()) return std::string("repair-bug without a bug id");
            if (action.origin && !experience.contains(*action.origin)) {
                return "repair-bug " + action.payload + " has origin outside the shared experience";
            }
        }
    }
    return std::nullopt;
}

Directive reflect(const AgentRecord& agent, const SharedExperience& experience,
                  const OperatorProfile& profile, Rng& rng) {
    Directive directive;
    directive.agent = agent.id;
    std::vector<std::string> notes;

    for (const auto& [tool, origin] : experience.visible_tools()) {
        if (agent.has_tool(tool)) continue;
        if (rng.bernoulli(profile.adopt_probability)) {
            directive.actions.push_back({ActionKind::adopt_tool, tool, origin});
            notes.push_back("adopt " + tool + " seen in agent " + std::to_string(origin.value));
        }
    }
    // Each trace that failed on a missing capability is one chance to spot
    // a new tool; a richer S therefore surfaces more gaps.
    bool discover = false;
    for (const auto& [id, trace] : experience.traces) {
        if (!failed_on_missing_tool(trace)) continue;
        if (rng.bernoulli(profile.discover_probability)) discover = true;
    }
    if (discover) {
        directive.actions.push_back({ActionKind::discover_tool, "", std::nullopt});
        notes.push_back("explore a new tool");
    }
    for (const auto& bug : agent.broken_bugs) {
        Provenance healthy;
        for (const auto& [id, trace] : experience.traces) {
            if (id == agent.id) continue;
            const auto& bugs = trace.predicted_patch.active_bugs;
            if (std::find(bugs.begin(), bugs.end(), bug) == bugs.end()) {
                healthy = id;
                break;
            }
        }
        const double p = healthy ? profile.repair_probability_shared : profile.repair_probability_self;
        if (rng.bernoulli(p)) {
            directive.actions.push_back({ActionKind::repair_bug, bug, healthy});
            notes.push_back("repair " + bug);
        }
    }

    for (std::size_t i = 0; i < notes.size(); ++i) {
        if (i > 0) directive.rationale += "; ";
        directive.rationale += notes[i];
    }
    return directive;
}

std::vector<Patch> evolve(const AgentRecord& agent, const Directive& directive,
                          const SharedExperience& experience, const OperatorProfile& profile,
                          const SimWorld& world, Rng& rng) {
    if (directive.agent != agent.id) {
        throw InvalidArgument("evolve: directive is for agent " +
                              std::to_string(directive.agent.value));
    }
    std::vector<DirectiveAction> ordered = directive.actions;
    std::stable_sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) {
        return priority(a.kind) < priority(b.kind);
    });
    if (ordered.size() > profile.max_actions_per_step) ordered.resize(profile.max_actions_per_step);

    std::set<std::string> excluded;
    for (const auto& [tool, origin] : experience.visible_tools()) excluded.insert(tool);
    for (const auto& tag : agent.tools) excluded.insert(tag.name);

    std::vector<Patch> patches;
    for (const auto& action : ordered) {
        switch (action.kind) {
            case ActionKind::repair_bug:
                patches.push_back({0, PatchKind::repair_bug, action.payload, std::nullopt,
                                   action.origin, false});
                break;
            case ActionKind::adopt_tool:
                patches.push_back({0, PatchKind::add_tool, action.payload, std::nullopt,
                                   action.origin, false});
                excluded.insert(action.payload);
                break;
            case ActionKind::discover_tool: {
                std::vector<std::string> fresh;
                for (const auto& tool : world.tool_universe) {
                    if (excluded.count(tool) == 0) fresh.push_back(tool);
                }
                if (fresh.empty()) break;
                const std::string& pick = fresh[rng.uniform_index(fresh.size())];
                Patch patch{0, PatchKind::add_tool, pick, std::nullopt, std::nullopt, false, ""};
                if (rng.bernoulli(profile.regression_probability) && !world.bug_catalog.empty()) {
                    patch.regression = world.bug_catalog[rng.uniform_index(world.bug_catalog.size())];
                }
                patches.push_back(std::move(patch));
                excluded.insert(pick);
                break;
            }
        }
    }
    if (patches.empty()) patches.push_back(Patch{});
    return patches;
}

ActResult act(const AgentRecord& before, std::span<const Patch> patches, const SimWorld& world,
              std::span<const std::size_t> probe) {
    ActResult result;
    result.agent = before;
    double previous = performance_of(evaluate_on(before, world, probe));
    for (const auto& patch : patches) {
        result.agent = apply_patch(result.agent, patch);
        TaskSuccessVector z = evaluate_on(result.agent, world, probe);
        const double now = performance_of(z);
        const double delta = now - previous;
        result.agent.patches.back().delta_score = delta;
        result.delta_scores.push_back(delta);
        previous = now;
        result.z = std::move(z);
    }
    if (patches.empty()) result.z = evaluate_on(before, world, probe);
    result.performance = performance_of(result.z);
    assign_outcome(result.agent, result.z);
    return result;
}

}  // namespace gea
