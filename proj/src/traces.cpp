#include "gea/traces.hpp"

#include "gea/errors.hpp"

namespace gea {

std::set<AgentId> SharedExperience::contributors() const {
    std::set<AgentId> out;
    for (const auto& [id, trace] : traces) out.insert(id);
    return out;
}

std::map<std::string, AgentId> SharedExperience::visible_tools() const {
    std::map<std::string, AgentId> out;
    // std::map iterates contributors in ascending id, so emplace keeps the lowest.
    for (const auto& [id, trace] : traces) {
        for (const auto& tool : trace.predicted_patch.deployed_tools) out.emplace(tool, id);
        for (const auto& patch : trace.applied_patches) {
            if (patch.kind == PatchKind::add_tool && !patch.payload.empty()) {
                out.emplace(patch.payload, id);
            }
        }
    }
    return out;
}

EvolutionTrace collect_trace(const AgentRecord& agent, const SimWorld& world,
                             std::span<const std::size_t> probe, Rng& rng) {
    if (probe.size() != agent.z.size()) {
        throw DimensionMismatch("collect_trace: probe set does not match the agent's vector");
    }
    EvolutionTrace trace;
    trace.agent = agent.id;
    trace.applied_patches = agent.patches;

    std::vector<std::size_t> unsolved;
    for (std::size_t i = 0; i < probe.size(); ++i) {
        if (!agent.z.test(i)) unsolved.push_back(probe[i]);
    }
    if (unsolved.empty()) return trace;

    const std::size_t task_index = unsolved[rng.uniform_index(unsolved.size())];
    const TaskSpec& task = world.tasks.at(task_index);
    trace.sampled_task = task_index;

    for (const auto& tag : agent.tools) trace.predicted_patch.deployed_tools.push_back(tag.name);
    trace.predicted_patch.active_bugs.assign(agent.broken_bugs.begin(), agent.broken_bugs.end());
    trace.predicted_patch.solved = solves(agent, task);

    bool missing = false;
    bool bugged = false;
    for (const auto& tool : task.required_tools) {
        if (agent.has_tool(tool)) {
            trace.execution_log.push_back({"invoke", tool});
        } else {
            trace.execution_log.push_back({"missing-tool", tool});
            missing = true;
        }
    }
    for (const auto& bug : task.bug_sensitive) {
        if (agent.broken_bugs.count(bug) > 0) {
            trace.execution_log.push_back({"framework-error", bug});
            bugged = true;
        }
    }
    trace.outcome.passed = trace.predicted_patch.solved;
    trace.execution_log.push_back({"submit", trace.outcome.passed ? "pass" : "fail"});
    if (missing && bugged) {
        trace.outcome.failure_mode = "missing-tools+framework-bug";
    } else if (missing) {
        trace.outcome.failure_mode = "missing-tools";
    } else if (bugged) {
        trace.outcome.failure_mode = "framework-bug";
    }
    return trace;
}

SharedExperience aggregate(std::span<const EvolutionTrace> traces) {
    if (traces.empty()) throw InvalidArgument("aggregate: no traces");
    SharedExperience out;
    for (const auto& trace : traces) {
        if (!out.traces.emplace(trace.agent, trace).second) {
            throw InvalidArgument("aggregate: agent " + std::to_string(trace.agent.value) +
                                  " contributed twice");
        }
    }
    return out;
}

SharedExperience self_only(const EvolutionTrace& trace) {
    SharedExperience out;
    out.traces.emplace(trace.agent, trace);
    return out;
}

}  // namespace gea
