#include "gea/simenv.hpp"

#include <algorithm>
#include <numeric>

#include "gea/errors.hpp"
#include "gea/rng.hpp"

namespace gea {

namespace {

// Percentage of tasks that only need the starter tool; keeps the seed agent
// inside the 15-45% calibration band.
constexpr std::size_t kStarterOnlyPercent = 35;
constexpr std::size_t kMaxToolsPerTask = 3;
// Every other task needs two tools (3 in 4) or three tools (1 in 4), so a
// single new tool rarely pays off on its own.
constexpr std::size_t kPairWeight = 3;
constexpr std::size_t kTripleWeight = 1;

bool is_starter_only(const TaskSpec& task, const std::string& starter) {
    return task.required_tools.size() == 1 && *task.required_tools.begin() == starter;
}

}  // namespace

bool SimWorld::has_tool(std::string_view name) const {
    return std::find(tool_universe.begin(), tool_universe.end(), name) != tool_universe.end();
}

bool SimWorld::has_bug(std::string_view id) const {
    return std::find(bug_catalog.begin(), bug_catalog.end(), id) != bug_catalog.end();
}

SimWorld generate_world(std::size_t task_count, std::size_t n_tools, std::uint64_t seed) {
    if (task_count == 0) throw InvalidArgument("generate_world: D must be at least 1");
    if (n_tools == 0) throw InvalidArgument("generate_world: need at least one tool");
    // One task stays starter-only for the gate; the others hold up to three
    // tools each.
    if (n_tools > 1 && (n_tools - 1) > (task_count - 1) * kMaxToolsPerTask) {
        throw InvalidArgument("generate_world: " + std::to_string(n_tools) +
                              " tools cannot all be required by " + std::to_string(task_count) +
                              " tasks");
    }

    SimWorld world;
    world.seed = seed;
    for (std::size_t t = 1; t <= n_tools; ++t) world.tool_universe.push_back("T" + std::to_string(t));
    for (std::size_t b = 1; b <= kBugCount; ++b) world.bug_catalog.push_back("B" + std::to_string(b));

    const std::string& starter = world.tool_universe.front();
    Rng rng(seed);
    world.tasks.resize(task_count);
    for (std::size_t t = 0; t < task_count; ++t) {
        TaskSpec& task = world.tasks[t];
        task.index = t;
        const bool starter_only = n_tools == 1 || rng.uniform_index(100) < kStarterOnlyPercent;
        if (starter_only) {
            task.required_tools.insert(starter);
            continue;
        }
        const std::size_t k =
            rng.uniform_index(kPairWeight + kTripleWeight) < kPairWeight ? 2 : 3;
        // First requirement is always a non-starter tool.
        task.required_tools.insert(world.tool_universe[1 + rng.uniform_index(n_tools - 1)]);
        while (task.required_tools.size() < std::min(k, n_tools)) {
            task.required_tools.insert(world.tool_universe[rng.uniform_index(n_tools)]);
        }
    }

    // The seed agent must pass the default gate, so one of the first ten
    // tasks has to be solvable with the starter tool alone.
    const std::size_t gate_prefix = std::min<std::size_t>(10, task_count);
    const auto prefix_end = world.tasks.begin() + static_cast<std::ptrdiff_t>(gate_prefix);
    const auto starter_only = [&](const TaskSpec& t) { return is_starter_only(t, starter); };
    if (std::none_of(world.tasks.begin(), prefix_end, starter_only)) {
        auto donor = std::find_if(prefix_end, world.tasks.end(), starter_only);
        TaskSpec& target = world.tasks[rng.uniform_index(gate_prefix)];
        if (donor != world.tasks.end()) {
            std::swap(target.required_tools, donor->required_tools);
        } else {
            target.required_tools = {starter};
        }
    }

    if (n_tools > 1) {
        const std::size_t gate_task = static_cast<std::size_t>(
            std::find_if(world.tasks.begin(), prefix_end, starter_only) - world.tasks.begin());
        const auto demand = [&](const std::string& tool) {
            return std::count_if(world.tasks.begin(), world.tasks.end(),
                                 [&](const auto& t) { return t.required_tools.count(tool) > 0; });
        };
        // Attach every unused tool to some non-starter task.
        for (std::size_t u = 1; u < n_tools; ++u) {
            const std::string& tool = world.tool_universe[u];
            if (demand(tool) > 0) continue;
            std::vector<std::size_t> open;
            for (const auto& t : world.tasks) {
                if (!is_starter_only(t, starter) && t.required_tools.size() < kMaxToolsPerTask) {
                    open.push_back(t.index);
                }
            }
            if (!open.empty()) {
                world.tasks[open[rng.uniform_index(open.size())]].required_tools.insert(tool);
                continue;
            }
            // Tiny worlds: take over a spare starter-only task, else a slot
            // whose tool is also required elsewhere (the gate task keeps T1).
            bool placed = false;
            for (auto it = world.tasks.rbegin(); it != world.tasks.rend() && !placed; ++it) {
                if (it->index != gate_task && is_starter_only(*it, starter)) {
                    it->required_tools = {tool};
                    placed = true;
                }
            }
            for (auto it = world.tasks.rbegin(); it != world.tasks.rend() && !placed; ++it) {
                if (it->index == gate_task) continue;
                for (const auto& held : it->required_tools) {
                    if (demand(held) > 1) {
                        it->required_tools.erase(held);
                        it->required_tools.insert(tool);
                        placed = true;
                        break;
                    }
                }
            }
        }
    }

    const std::size_t slice = std::max<std::size_t>(1, task_count / 10);
    for (std::size_t b = 0; b < kBugCount; ++b) {
        const std::size_t begin = b * task_count / kBugCount;
        for (std::size_t t = begin; t < std::min(task_count, begin + slice); ++t) {
            world.tasks[t].bug_sensitive.insert(world.bug_catalog[b]);
        }
    }
    return world;
}

bool solves(const AgentRecord& agent, const TaskSpec& task) {
    for (const auto& tool : task.required_tools) {
        if (!agent.has_tool(tool)) return false;
    }
    for (const auto& bug : task.bug_sensitive) {
        if (agent.broken_bugs.count(bug) > 0) return false;
    }
    return true;
}

TaskSuccessVector evaluate(const AgentRecord& agent, const SimWorld& world) {
    TaskSuccessVector z(world.size());
    for (std::size_t t = 0; t < world.size(); ++t) z.set(t, solves(agent, world.tasks[t]));
    return z;
}

TaskSuccessVector evaluate_on(const AgentRecord& agent, const SimWorld& world,
                              std::span<const std::size_t> task_indices) {
    TaskSuccessVector z(task_indices.size());
    for (std::size_t i = 0; i < task_indices.size(); ++i) {
        z.set(i, solves(agent, world.tasks.at(task_indices[i])));
    }
    return z;
}

std::size_t solved_count(const AgentRecord& agent, const SimWorld& world,
                         std::span<const std::size_t> task_indices) {
    return evaluate_on(agent, world, task_indices).count();
}

bool well_formed(const Patch& patch, const SimWorld& world) {
    switch (patch.kind) {
        case PatchKind::add_tool:
            return world.has_tool(patch.payload) &&
                   (patch.regression.empty() || world.has_bug(patch.regression));
        case PatchKind::remove_tool:
            return world.has_tool(patch.payload) && patch.regression.empty();
        case PatchKind::repair_bug:
            return world.has_bug(patch.payload) && patch.regression.empty();
        case PatchKind::noop: return patch.payload.empty() && patch.regression.empty();
    }
    return false;
}

AgentRecord apply_patch(const AgentRecord& agent, const Patch& patch) {
    AgentRecord out = agent;
    Patch recorded = patch;
    switch (patch.kind) {
        case PatchKind::add_tool:
            if (out.has_tool(patch.payload)) {
                recorded.ineffective = true;
            } else {
                out.put_tool(ToolTag{patch.payload, patch.source_agent});
                if (!patch.regression.empty()) out.broken_bugs.insert(patch.regression);
            }
            break;
        case PatchKind::remove_tool:
            if (!out.erase_tool(patch.payload)) recorded.ineffective = true;
            break;
        case PatchKind::repair_bug:
            if (out.broken_bugs.erase(patch.payload) == 0) recorded.ineffective = true;
            break;
        case PatchKind::noop: break;
    }
    out.patches.push_back(std::move(recorded));
    return out;
}

AgentRecord inject_bug(const AgentRecord& agent, const std::string& bug_id, const SimWorld& world) {
    if (!world.has_bug(bug_id)) throw InvalidArgument("unknown bug '" + bug_id + "'");
    AgentRecord out = agent;
    out.broken_bugs.insert(bug_id);
    return out;
}

AgentRecord make_seed_agent(const SimWorld& world, std::span<const std::size_t> probe) {
    AgentRecord seed;
    seed.id = AgentId{0};
    seed.put_tool(ToolTag{world.starter_tool(), std::nullopt});
    assign_outcome(seed, evaluate_on(seed, world, probe));
    return seed;
}

std::vector<std::size_t> all_tasks(const SimWorld& world) {
    std::vector<std::size_t> out(world.size());
    std::iota(out.begin(), out.end(), std::size_t{0});
    return out;
}

}  // namespace gea
