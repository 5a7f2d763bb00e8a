#pragma once

// Random instances shared by the property tests and the acceptance run.

#include "oracles.hpp"

#include "gea/core.hpp"
#include "gea/engine.hpp"
#include "gea/simenv.hpp"

namespace gen {

using namespace gea;

inline Archive archive_of(const std::vector<oracle::Agent>& agents, std::size_t d) {
    Archive a(d, 0);
    for (const auto& ag : agents) {
        AgentRecord r;
        r.id = AgentId{ag.id};
        if (ag.id > 0) r.framework_parent = AgentId{0};
        r.z = oracle::to_vector(ag.z);
        r.performance = ag.alpha;
        a.insert(r);
    }
    return a;
}

inline std::vector<oracle::Agent> random_agents(oracle::Gen& gen, std::size_t n, std::size_t d) {
    std::vector<oracle::Agent> out;
    for (std::uint64_t i = 0; i < n; ++i) {
        auto bits = gen.bits(d, gen.real(0.1, 0.9));
        // Duplicate an earlier vector now and then to exercise ties.
        if (i > 0 && gen.coin(0.2)) bits = out[gen.index(i)].z;
        std::size_t ones = 0;
        for (int b : bits) ones += b;
        out.push_back({i, bits, static_cast<double>(ones) / static_cast<double>(d)});
    }
    return out;
}

inline Provenance random_origin(oracle::Gen& g, std::uint64_t below) {
    if (below == 0 || g.coin(0.3)) return std::nullopt;
    return AgentId{g.index(below)};
}

inline Archive random_archive(oracle::Gen& g) {
    const std::size_t d = 1 + g.index(40);
    Archive a(d, g.engine()());
    const std::size_t n = g.index(30);
    std::uint64_t patch_id = 0;
    for (std::uint64_t id = 0; id < n; ++id) {
        AgentRecord r;
        r.id = AgentId{id};
        if (id > 0) r.framework_parent = AgentId{g.index(id)};
        for (std::size_t t = 1; t <= 9; ++t) {
            if (g.coin(0.4)) r.put_tool({"T" + std::to_string(t), random_origin(g, id)});
        }
        for (std::size_t b = 1; b <= 4; ++b) {
            if (g.coin(0.15)) r.broken_bugs.insert("B" + std::to_string(b));
        }
        const std::size_t patches = g.index(5);
        for (std::size_t p = 0; p < patches; ++p) {
            Patch patch;
            patch.id = patch_id++;
            patch.kind = static_cast<PatchKind>(g.index(4));
            if (patch.kind != PatchKind::noop) patch.payload = g.coin(0.5) ? "T3" : "B2";
            if (g.coin(0.7)) patch.delta_score = g.real(-0.5, 0.5);
            patch.source_agent = random_origin(g, id);
            patch.ineffective = g.coin(0.1);
            if (patch.kind == PatchKind::add_tool && g.coin(0.2)) patch.regression = "B1";
            r.patches.push_back(patch);
        }
        assign_outcome(r, oracle::to_vector(g.bits(d, g.real(0.0, 1.0))));
        r.born_iteration = id == 0 ? 0 : 1 + g.index(50);
        r.gate_status = id == 0 ? GateStatus::passed : static_cast<GateStatus>(g.index(3));
        a.insert(r);
    }
    return a;
}

inline SimWorld random_world(oracle::Gen& g) {
    const std::size_t d = 1 + g.index(80);
    const std::size_t tools = 1 + g.index(std::min<std::size_t>(12, 3 * d - 2));
    return generate_world(d, tools, g.engine()());
}

inline RunTranscript random_transcript(oracle::Gen& g) {
    RunConfig cfg;
    cfg.seed = g.engine()();
    cfg.mode = g.coin(0.5) ? EvolutionMode::gea : EvolutionMode::tree;
    cfg.iterations = 1 + g.index(4);
    cfg.schedule = PhaseSchedule::standard(cfg.iterations);
    cfg.world.D = 10 + g.index(20);
    cfg.world.n_tools = 2 + g.index(8);
    cfg.selection.K = 1 + g.index(3);
    cfg.selection.M = 1 + g.index(4);
    return run(cfg);
}

}  // namespace gen
