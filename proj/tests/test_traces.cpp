#include "doctest.h"

#include "fixtures.hpp"

#include "gea/engine.hpp"
#include "gea/errors.hpp"
#include "gea/rng.hpp"
#include "gea/traces.hpp"

using namespace gea;

namespace {

const SimWorld& world() {
    static const SimWorld w =
        fixture::world(3, {{"T1"}, {"T2"}, {"T3"}, {"T1"}, {"T1"}, {"T2", "T3"}, {"T1"}, {"T3"}});
    return w;
}

AgentRecord evaluated(std::uint64_t id, std::initializer_list<const char*> tools) {
    AgentRecord r;
    r.id = AgentId{id};
    for (const char* t : tools) r.put_tool({t, std::nullopt});
    assign_outcome(r, evaluate(r, world()));
    return r;
}

}  // namespace

TEST_CASE("all-solving agent yields the NONE trace") {
    const auto a = evaluated(0, {"T1", "T2", "T3"});
    Rng rng(1);
    const auto t = collect_trace(a, world(), all_tasks(world()), rng);
    CHECK(!t.sampled_task);
    CHECK(t.execution_log.empty());
    CHECK(t.predicted_patch.deployed_tools.empty());
}

TEST_CASE("single unsolved task is always sampled") {
    const auto a = evaluated(0, {"T1", "T2"});
    // Unsolved: 2 (T3), 5 (T2+T3), 7 (T3); narrow the probe to one of them.
    const std::vector<std::size_t> probe{0, 1, 2};
    AgentRecord b = a;
    assign_outcome(b, evaluate_on(b, world(), probe));
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng(seed);
        CHECK(collect_trace(b, world(), probe, rng).sampled_task == std::optional<std::size_t>(2));
    }
}

TEST_CASE("seeded draw over several unsolved tasks replays independently") {
    const auto a = evaluated(0, {"T1", "T2"});
    const std::vector<std::size_t> unsolved{2, 5, 7};
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng(seed);
        const auto t = collect_trace(a, world(), all_tasks(world()), rng);
        Rng replay(seed);
        CHECK(t.sampled_task == unsolved[replay.uniform_index(unsolved.size())]);
        CHECK(!t.outcome.passed);
        CHECK(t.outcome.failure_mode == "missing-tools");
        CHECK(t.execution_log.back().kind == "submit");
    }
}

TEST_CASE("framework bug shows in the log") {
    SimWorld w = world();
    w.tasks[0].bug_sensitive.insert("B1");
    AgentRecord a;
    a.put_tool({"T1", std::nullopt});
    a.broken_bugs.insert("B1");
    assign_outcome(a, evaluate_on(a, w, std::vector<std::size_t>{0}));
    Rng rng(0);
    const auto t = collect_trace(a, w, std::vector<std::size_t>{0}, rng);
    CHECK(t.outcome.failure_mode == "framework-bug");
    CHECK(t.predicted_patch.active_bugs == std::vector<std::string>{"B1"});
}

TEST_CASE("aggregate and self_only") {
    EvolutionTrace a, b;
    a.agent = AgentId{3};
    b.agent = AgentId{7};
    const std::vector<EvolutionTrace> ab{a, b}, ba{b, a}, one{a};
    CHECK(aggregate(ab).contributors() == std::set<AgentId>{AgentId{3}, AgentId{7}});
    CHECK(aggregate(ab) == aggregate(ba));
    CHECK(aggregate(one).size() == 1);
    CHECK(self_only(a) == aggregate(one));
    CHECK(self_only(a).contributors() == std::set<AgentId>{AgentId{3}});
    const std::vector<EvolutionTrace> dup{a, a};
    CHECK_THROWS_AS(aggregate(dup), InvalidArgument);
    CHECK_THROWS_AS(aggregate(std::vector<EvolutionTrace>{}), InvalidArgument);
}

TEST_CASE("visible tools keep the lowest contributor") {
    EvolutionTrace a, b;
    a.agent = AgentId{2};
    a.predicted_patch.deployed_tools = {"T1", "T4"};
    b.agent = AgentId{5};
    b.predicted_patch.deployed_tools = {"T4", "T6"};
    const std::vector<EvolutionTrace> both{b, a};
    const auto tools = aggregate(both).visible_tools();
    CHECK(tools.at("T4") == AgentId{2});
    CHECK(tools.at("T6") == AgentId{5});
}

TEST_CASE("trace collection is reproducible") {
    const auto a = evaluated(4, {"T1"});
    Rng r1(derive_seed(9, 3, 4)), r2(derive_seed(9, 3, 4));
    CHECK(collect_trace(a, world(), all_tasks(world()), r1) == collect_trace(a, world(), all_tasks(world()), r2));
}

TEST_CASE("baseline transcripts have single-contributor experience") {
    const auto t = run(fixture::small_config(4, EvolutionMode::tree));
    for (const auto& it : t.iterations) {
        CHECK(it.contributors.size() == 1);
        CHECK(it.contributors.front() == it.group.front().id);
    }
}
