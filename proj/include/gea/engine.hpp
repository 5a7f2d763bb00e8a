#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gea/core.hpp"
#include "gea/operators.hpp"
#include "gea/selection.hpp"
#include "gea/simenv.hpp"
#include "gea/traces.hpp"

namespace gea {

enum class EvolutionMode { gea, tree };

std::string_view to_string(EvolutionMode mode);
EvolutionMode evolution_mode_from_string(std::string_view text);

struct WorldSpec {
    std::size_t D = 60;
    std::size_t n_tools = 9;
    /// Defaults to the run seed when absent.
    std::optional<std::uint64_t> seed;

    friend bool operator==(const WorldSpec&, const WorldSpec&) = default;
};

struct RunConfig {
    EvolutionMode mode = EvolutionMode::gea;
    SelectionConfig selection;
    PhaseSchedule schedule = PhaseSchedule::standard(30);
    /// Steps actually executed by this run.
    std::uint64_t iterations = 30;
    WorldSpec world;
    std::uint64_t seed = 0;
    /// Sanity-set task indices for the archive gate; empty means the first
    /// min(10, D) tasks.
    std::vector<std::size_t> gate;
    /// Evolution-stage probe set behind every z; empty means all tasks.
    std::vector<std::size_t> probe;

    /// K actually used by a step (1 in tree mode).
    std::size_t effective_group_size() const {
        return mode == EvolutionMode::tree ? 1 : selection.K;
    }

    std::vector<std::size_t> gate_tasks(const SimWorld& world) const;
    std::vector<std::size_t> probe_tasks(const SimWorld& world) const;

    void validate() const;

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Tree-mode counterpart of a GEA configuration with a matched evolved-agent
/// budget: iterations and phase boundaries multiplied by K.
RunConfig matched_baseline(const RunConfig& gea_config);

/// As above, matched to the number of agents a finished GEA run actually
/// evolved. Undersized early groups (fewer than K selectable agents) leave
/// that count below iterations * K; the baseline drops the same number of
/// steps from the start of its schedule.
RunConfig matched_baseline(const RunConfig& gea_config, std::size_t evolved_agents);

SimWorld world_for(const RunConfig& cfg);

struct GroupEntry {
    AgentId id;
    double score = 0.0;
    double novelty = 0.0;
    double performance = 0.0;

    friend bool operator==(const GroupEntry&, const GroupEntry&) = default;
};

struct IterationRecord {
    std::uint64_t iteration = 0;  ///< 1-based
    std::string profile;
    std::vector<GroupEntry> group;
    std::vector<EvolutionTrace> traces;
    std::vector<AgentId> contributors;
    std::vector<Directive> directives;
    std::vector<AgentRecord> offspring;
    std::size_t archive_size = 0;
    std::size_t selectable_size = 0;
    AgentId best_id;
    double best_performance = 0.0;

    friend bool operator==(const IterationRecord&, const IterationRecord&) = default;
};

/// Bug-injection bookkeeping for robustness trials.
struct InjectionRecord {
    AgentId source;                ///< archive agent that was copied and broken
    AgentId faulty;                ///< id of the broken copy
    std::optional<AgentId> partner;  ///< bug-free group member (GEA pairing)
    std::string bug;
    double pre_injection_performance = 0.0;

    friend bool operator==(const InjectionRecord&, const InjectionRecord&) = default;
};

struct RunTranscript {
    RunConfig config;
    SimWorld world;
    /// Records present before the first iteration (just the seed for runs).
    std::vector<AgentRecord> initial;
    std::vector<IterationRecord> iterations;
    std::optional<InjectionRecord> injection;

    /// Initial records plus every offspring, in id order.
    Archive final_archive() const;
    std::size_t evolved_agents() const;

    friend bool operator==(const RunTranscript&, const RunTranscript&) = default;
};

/// Mutable run state between iterations.
struct EngineState {
    Archive archive;
    std::uint64_t next_patch_id = 0;
};

/// One group-evolution iteration (or one tree-baseline step). `step_index` is
/// 0-based; offspring are born at iteration step_index + 1. All offspring are
/// produced from the archive snapshot taken before the step and inserted in
/// ascending parent id order.
IterationRecord step(EngineState& state, std::uint64_t step_index, const RunConfig& cfg,
                     const SimWorld& world, EvolutionOperator& op);

RunTranscript run(const RunConfig& cfg, const SimWorld& world, EvolutionOperator& op);
RunTranscript run(const RunConfig& cfg);

struct Divergence {
    std::uint64_t iteration = 0;  ///< 0 means the header / initial records
    std::string field;            ///< JSON pointer inside the record
    std::string expected;
    std::string actual;
};

struct ReplayReport {
    std::vector<Divergence> divergences;
    bool ok() const noexcept { return divergences.empty(); }
};

/// Runs the recorded configuration again from scratch. Robustness transcripts
/// restart from their recorded initial archive and injection.
RunTranscript reexecute(const RunTranscript& recorded);

/// Re-executes the recorded configuration and diffs every recorded field.
ReplayReport verify_replay(const RunTranscript& transcript);

/// As verify_replay, but throws ReplayError naming the first divergence.
ReplayReport replay(const RunTranscript& transcript);

/// Configuration of one bug-injection trial.
struct RobustnessTrialConfig {
    EvolutionMode mode = EvolutionMode::gea;
    OperatorProfile profile = robustness_profile();
    std::uint64_t max_iterations = 30;
    std::uint64_t seed = 0;
};

/// Breaks a copy of `source` with `bug` and evolves it: paired with
/// `partner` in GEA mode, alone in tree mode. The broken copy is appended to
/// the source archive; each iteration both group members produce offspring
/// and the offspring form the next group.
RunTranscript run_robustness_trial(const RunTranscript& source_run, AgentId source,
                                   std::optional<AgentId> partner, const std::string& bug,
                                   const RobustnessTrialConfig& trial);

}  // namespace gea
