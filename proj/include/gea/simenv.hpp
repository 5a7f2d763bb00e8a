#pragma once

#include <cstddef>
#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "gea/core.hpp"

namespace gea {

struct TaskSpec {
    std::size_t index = 0;
    std::set<std::string> required_tools;
    std::set<std::string> bug_sensitive;

    friend bool operator==(const TaskSpec&, const TaskSpec&) = default;
};

/// Synthetic coding environment. Immutable after generation.
struct SimWorld {
    std::uint64_t seed = 0;
    std::vector<std::string> tool_universe;
    std::vector<std::string> bug_catalog;
    std::vector<TaskSpec> tasks;

    std::size_t size() const noexcept { return tasks.size(); }
    bool has_tool(std::string_view name) const;
    bool has_bug(std::string_view id) const;

    /// Name of the tool every seed agent starts with.
    const std::string& starter_tool() const { return tool_universe.front(); }

    friend bool operator==(const SimWorld&, const SimWorld&) = default;
};

/// Number of framework bugs each generated world exposes.
inline constexpr std::size_t kBugCount = 4;

/// Generates a world of `task_count` tasks over tools "T1".."Tn".
///
/// Integer-only construction: 35% of tasks require just the starter tool T1;
/// the rest require 2 tools (weight 3) or 3 tools (weight 1), the first of
/// them a non-starter. One starter-only task always lies in the first
/// min(10, D) tasks.
/// Tools no task requires are then attached to non-starter tasks. Bug Bk
/// suppresses a contiguous slice of max(1, D/10) tasks starting at k*D/4.
SimWorld generate_world(std::size_t task_count, std::size_t n_tools, std::uint64_t seed);

/// Does `agent` solve `task`? Required tools present and no sensitive bug active.
bool solves(const AgentRecord& agent, const TaskSpec& task);

/// Success vector over the whole world.
TaskSuccessVector evaluate(const AgentRecord& agent, const SimWorld& world);

/// Success vector over the listed task indices, in the given order.
TaskSuccessVector evaluate_on(const AgentRecord& agent, const SimWorld& world,
                              std::span<const std::size_t> task_indices);

std::size_t solved_count(const AgentRecord& agent, const SimWorld& world,
                         std::span<const std::size_t> task_indices);

/// Is the patch structurally valid for this world (payload populated as its
/// kind requires and naming a known tool or bug)?
bool well_formed(const Patch& patch, const SimWorld& world);

/// Applies one patch to a phenotype and appends it to the patch history.
/// Removing an absent tool or repairing an absent bug leaves the phenotype
/// unchanged and marks the appended patch ineffective.
AgentRecord apply_patch(const AgentRecord& agent, const Patch& patch);

/// Copy of `agent` with `bug_id` active. InvalidArgument for unknown bugs.
AgentRecord inject_bug(const AgentRecord& agent, const std::string& bug_id,
                       const SimWorld& world);

/// Seed agent: id 0, starter tool with SELF origin, evaluated on `probe`.
AgentRecord make_seed_agent(const SimWorld& world, std::span<const std::size_t> probe);

std::vector<std::size_t> all_tasks(const SimWorld& world);

}  // namespace gea
