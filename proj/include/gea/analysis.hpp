#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gea/core.hpp"
#include "gea/engine.hpp"

namespace gea {

/// Selectable agents by performance descending, ties by ascending id.
std::vector<AgentId> ranked_agents(const Archive& archive);

/// Best selectable agent (max performance, lowest id on ties).
AgentId best_agent(const Archive& archive);

struct AncestorRow {
    std::size_t k = 0;
    double worst_case = 0.0;
    /// Maximum ancestor count over the top-k agents.
    std::size_t ancestor_count = 0;
    /// ancestor_count / evolved agents (0 when nothing evolved).
    double fraction = 0.0;
    /// Top-k agents in rank order with their own ancestor counts.
    std::vector<std::pair<AgentId, std::size_t>> per_agent;
};

struct AncestorTable {
    std::vector<AncestorRow> rows;
    /// One line per omitted k.
    std::vector<std::string> notes;

    /// Columns: k,worst_case,ancestor_count,fraction,agents
    std::string to_csv() const;
};

AncestorTable ancestor_table(const RunTranscript& transcript, std::span<const std::size_t> ranks,
                             AncestryMode mode = AncestryMode::transitive);

struct ToolTimelineRow {
    std::string tool;
    std::optional<std::uint64_t> discovered;  ///< first iteration any agent has it
    std::optional<std::uint64_t> integrated;  ///< first iteration the then-best agent has it
};

/// One row per tool in the world's universe; iteration 0 is the initial archive.
std::vector<ToolTimelineRow> tool_timeline(const RunTranscript& transcript);
/// Columns: tool,discovered,integrated (NONE when absent)
std::string timeline_csv(std::span<const ToolTimelineRow> rows);

/// Tools held by the final best agent.
std::size_t integrated_tool_count(const RunTranscript& transcript);

/// Best selectable performance after each evolved agent; entry n - 1 covers
/// the first n offspring (offspring counted in insertion order).
std::vector<double> best_curve(const RunTranscript& transcript);

/// Worst performance among the top-k ranked agents, nullopt if fewer than k.
std::optional<double> top_k_worst_case(const Archive& archive, std::size_t k);

struct SignTest {
    std::size_t wins = 0;
    std::size_t losses = 0;
    std::size_t ties = 0;
    /// P(X >= wins) for X ~ Binomial(wins + losses, 1/2).
    double p_value = 1.0;
    /// No untied pairs: nothing to test.
    bool degenerate = true;
};

/// Exact one-sided sign test on paired differences (zero differences are ties).
SignTest sign_test(std::span<const double> differences);

/// Upper binomial tail P(X >= k), X ~ Binomial(n, 1/2).
double binomial_upper_tail(std::size_t n, std::size_t k);

struct MethodSummary {
    std::string label;
    std::vector<double> final_best;           ///< per seed
    std::vector<std::size_t> best_ancestors;  ///< per seed, best agent
    std::vector<std::size_t> integrated_tools;
    std::vector<double> top5_worst;           ///< per seed, NaN when < 5 agents
    std::vector<std::vector<double>> curves;
    std::vector<double> mean_curve;

    double mean_final_best() const;
    double mean_ancestors() const;
    double mean_integrated_tools() const;
};

struct ComparisonReport {
    MethodSummary a;
    MethodSummary b;
    std::vector<std::uint64_t> seeds;
    std::vector<double> differences;  ///< a - b final best, per seed
    SignTest sign;
    /// Seeds where a's top-5 worst case >= b's final best.
    std::size_t elevation_count = 0;

    std::string to_json() const;
    /// Columns: seed,<a>_final_best,<b>_final_best,difference,<a>_ancestors,
    /// <b>_ancestors,<a>_tools,<b>_tools,<a>_top5_worst
    std::string per_seed_csv() const;
    /// Columns: evolved_agents,<a>,<b> (mean curves)
    std::string curve_csv() const;
};

/// Pairs transcripts by position. InvalidArgument on an empty list, a length
/// mismatch, or a pair whose evolved-agent budgets differ.
ComparisonReport compare(std::span<const RunTranscript> a, std::span<const RunTranscript> b,
                         std::string label_a = "gea", std::string label_b = "tree");

/// Iterations from injection until a descendant of the faulty agent has the
/// bug inactive and performance >= the pre-injection performance.
/// InvalidArgument when the transcript has no injection record.
std::optional<std::uint64_t> repair_iterations(const RunTranscript& transcript);

struct PatchStep {
    std::size_t rank = 0;
    AgentId agent;
    std::size_t step = 0;  ///< 1-based position in the agent's patch history
    Patch patch;
};

/// Patch history with per-patch deltas of the top-n agents.
std::vector<PatchStep> patch_trajectories(const RunTranscript& transcript, std::size_t top_n);
/// Columns: rank,agent_id,step,patch_id,kind,payload,source_agent,delta_score
std::string trajectories_csv(std::span<const PatchStep> steps);

}  // namespace gea
