#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "gea/core.hpp"
#include "gea/rng.hpp"
#include "gea/simenv.hpp"

namespace gea {

struct LogEvent {
    std::string kind;     ///< "invoke", "missing-tool", "framework-error", "submit"
    std::string subject;  ///< tool, bug, or outcome label

    friend bool operator==(const LogEvent&, const LogEvent&) = default;
};

/// Simulated stand-in for the solution an agent produced on the sampled task.
struct PredictedPatch {
    std::vector<std::string> deployed_tools;
    std::vector<std::string> active_bugs;
    bool solved = false;

    friend bool operator==(const PredictedPatch&, const PredictedPatch&) = default;
};

struct Outcome {
    bool passed = false;
    /// "none", "missing-tools", "framework-bug" or both joined by '+'.
    std::string failure_mode = "none";

    friend bool operator==(const Outcome&, const Outcome&) = default;
};

/// Four-part evolutionary trace of one agent.
struct EvolutionTrace {
    AgentId agent;
    std::vector<Patch> applied_patches;
    /// World task index; nullopt when the agent solves every probe task.
    std::optional<std::size_t> sampled_task;
    PredictedPatch predicted_patch;
    std::vector<LogEvent> execution_log;
    Outcome outcome;

    friend bool operator==(const EvolutionTrace&, const EvolutionTrace&) = default;
};

/// Union of the parent group's traces, keyed by contributor.
struct SharedExperience {
    std::map<AgentId, EvolutionTrace> traces;

    std::set<AgentId> contributors() const;
    std::size_t size() const noexcept { return traces.size(); }
    bool contains(AgentId id) const { return traces.count(id) > 0; }

    /// Tool names visible anywhere in the experience, with the lowest
    /// contributor id that shows each one.
    std::map<std::string, AgentId> visible_tools() const;

    friend bool operator==(const SharedExperience&, const SharedExperience&) = default;
};

/// Collects the trace of `agent`. `probe` lists the world task indices behind
/// `agent.z`; the unsolved task is drawn uniformly with `rng`.
EvolutionTrace collect_trace(const AgentRecord& agent, const SimWorld& world,
                             std::span<const std::size_t> probe, Rng& rng);

/// Set union of traces. InvalidArgument on empty input or a repeated agent.
SharedExperience aggregate(std::span<const EvolutionTrace> traces);

/// Experience of the tree baseline: the agent's own trace only.
SharedExperience self_only(const EvolutionTrace& trace);

}  // namespace gea
