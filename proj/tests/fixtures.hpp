#pragma once

#include <initializer_list>
#include <string>

#include "gea/core.hpp"
#include "gea/engine.hpp"
#include "gea/simenv.hpp"

namespace fixture {

inline gea::AgentRecord agent(std::uint64_t id, gea::Provenance parent, const std::string& z,
                              std::initializer_list<gea::ToolTag> tools = {}) {
    gea::AgentRecord r;
    r.id = gea::AgentId{id};
    r.framework_parent = parent;
    for (const auto& t : tools) r.put_tool(t);
    gea::assign_outcome(r, gea::TaskSuccessVector::from_string(z));
    return r;
}

inline gea::Provenance of(std::uint64_t id) { return gea::AgentId{id}; }

/// World with explicit tasks; tools T1..Tn, bugs B1..B4.
inline gea::SimWorld world(std::size_t n_tools,
                           std::initializer_list<std::initializer_list<const char*>> required) {
    gea::SimWorld w;
    for (std::size_t t = 1; t <= n_tools; ++t) w.tool_universe.push_back("T" + std::to_string(t));
    for (std::size_t b = 1; b <= gea::kBugCount; ++b) w.bug_catalog.push_back("B" + std::to_string(b));
    std::size_t index = 0;
    for (const auto& req : required) {
        gea::TaskSpec task;
        task.index = index++;
        for (const char* tool : req) task.required_tools.insert(tool);
        w.tasks.push_back(task);
    }
    return w;
}

/// Small but non-trivial run configuration used across engine tests.
inline gea::RunConfig small_config(std::uint64_t seed, gea::EvolutionMode mode = gea::EvolutionMode::gea) {
    gea::RunConfig cfg;
    cfg.seed = seed;
    cfg.mode = mode;
    return cfg;
}

/// Provenance graph: 6 descends from 3 and took T4 from 5, a cousin line.
inline gea::Archive six_node_graph() {
    gea::Archive a(1, 0);
    a.insert(agent(0, std::nullopt, "1"));
    a.insert(agent(1, of(0), "1"));
    a.insert(agent(2, of(0), "1"));
    a.insert(agent(3, of(1), "1"));
    a.insert(agent(4, of(1), "1"));
    a.insert(agent(5, of(2), "1", {{"T4", std::nullopt}}));
    a.insert(agent(6, of(3), "1", {{"T4", of(5)}}));
    return a;
}

}  // namespace fixture
