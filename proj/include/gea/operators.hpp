#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gea/core.hpp"
#include "gea/rng.hpp"
#include "gea/simenv.hpp"
#include "gea/traces.hpp"

namespace gea {

struct OperatorProfile {
    std::string name;
    double adopt_probability = 0.0;
    double discover_probability = 0.0;
    double repair_probability_shared = 0.0;
    double repair_probability_self = 0.0;
    std::size_t max_actions_per_step = 3;
    /// Chance that a self-discovered tool ships with a framework bug.
    double regression_probability = 0.0;

    void validate() const;

    friend bool operator==(const OperatorProfile&, const OperatorProfile&) = default;
};

/// Weaker-model phase.
OperatorProfile early_profile();
/// Stronger-model phase.
OperatorProfile late_profile();
/// Every probability zero: evolution is the identity process.
OperatorProfile null_profile();
/// Late profile without regressions, so a bug-injection trial measures the
/// repair of the injected fault only.
OperatorProfile robustness_profile();

struct Phase {
    std::uint64_t begin = 0;  ///< inclusive step index
    std::uint64_t end = 0;    ///< exclusive step index
    OperatorProfile profile;

    friend bool operator==(const Phase&, const Phase&) = default;
};

class PhaseSchedule {
public:
    PhaseSchedule() = default;
    explicit PhaseSchedule(std::vector<Phase> phases);

    /// Early profile for the first N - N/3 steps, late for the rest.
    static PhaseSchedule standard(std::uint64_t iterations);
    static PhaseSchedule uniform(std::uint64_t iterations, OperatorProfile profile);

    /// Checks contiguity from 0 and coverage of [0, total).
    void validate(std::uint64_t total_iterations) const;

    /// Every boundary multiplied by `factor` (matched-budget baseline).
    PhaseSchedule scaled(std::uint64_t factor) const;

    /// Drops the first `steps` steps and renumbers the rest from 0.
    PhaseSchedule without_first(std::uint64_t steps) const;

    const OperatorProfile& profile_at(std::uint64_t step) const;
    std::span<const Phase> phases() const noexcept { return phases_; }
    std::uint64_t total() const noexcept { return phases_.empty() ? 0 : phases_.back().end; }

    friend bool operator==(const PhaseSchedule&, const PhaseSchedule&) = default;

private:
    std::vector<Phase> phases_;
};

enum class ActionKind { adopt_tool, discover_tool, repair_bug };

std::string_view to_string(ActionKind kind);
ActionKind action_kind_from_string(std::string_view text);

struct DirectiveAction {
    ActionKind kind = ActionKind::discover_tool;
    std::string payload;  ///< tool for adopt, bug for repair, empty for discover
    Provenance origin;    ///< contributor the experience came from, SELF if own

    friend bool operator==(const DirectiveAction&, const DirectiveAction&) = default;
};

struct Directive {
    AgentId agent;
    std::vector<DirectiveAction> actions;
    std::string rationale;

    friend bool operator==(const Directive&, const Directive&) = default;
};

/// Boundary check shared by every operator implementation: the directive
/// targets `agent` and every adopt/repair origin is an S contributor.
/// Returns a description of the first violation, or nullopt.
std::optional<std::string> directive_violation(const Directive& directive, AgentId agent,
                                               const SharedExperience& experience);

/// Scripted reflection. Draw order: one Bernoulli per foreign tool (by name),
/// one discovery draw per contributor trace that failed on a missing tool
/// (ascending contributor id; at most one discover action results), one per
/// broken bug (by id).
Directive reflect(const AgentRecord& agent, const SharedExperience& experience,
                  const OperatorProfile& profile, Rng& rng);

/// Scripted evolution: priority repair > adopt > discover, truncated to
/// `max_actions_per_step`; an empty result becomes a single noop.
std::vector<Patch> evolve(const AgentRecord& agent, const Directive& directive,
                          const SharedExperience& experience, const OperatorProfile& profile,
                          const SimWorld& world, Rng& rng);

struct ActResult {
    AgentRecord agent;  ///< patched phenotype with deltas recorded on new patches
    TaskSuccessVector z;
    double performance = 0.0;
    std::vector<double> delta_scores;
};

/// Applies `patches` one at a time to `before`, re-evaluating on `probe` after
/// each, so every patch carries its own marginal delta.
ActResult act(const AgentRecord& before, std::span<const Patch> patches, const SimWorld& world,
              std::span<const std::size_t> probe);

/// Pluggable Reflect/Evolve pair.
class EvolutionOperator {
public:
    virtual ~EvolutionOperator() = default;

    virtual Directive reflect(const AgentRecord& agent, const SharedExperience& experience,
                              const OperatorProfile& profile, Rng& rng) = 0;

    virtual std::vector<Patch> evolve(const AgentRecord& agent, const Directive& directive,
                                      const SharedExperience& experience,
                                      const OperatorProfile& profile,
                                      const SimWorld& world, Rng& rng) = 0;

    /// Whether transcripts produced with this operator can be replayed.
    virtual bool replayable() const { return true; }
};

class ScriptedOperator final : public EvolutionOperator {
public:
    Directive reflect(const AgentRecord& agent, const SharedExperience& experience,
                      const OperatorProfile& profile, Rng& rng) override {
        return gea::reflect(agent, experience, profile, rng);
    }

    std::vector<Patch> evolve(const AgentRecord& agent, const Directive& directive,
                              const SharedExperience& experience, const OperatorProfile& profile,
                              const SimWorld& world, Rng& rng) override {
        return gea::evolve(agent, directive, experience, profile, world, rng);
    }
};

}  // namespace gea
