#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gea/core.hpp"
#include "gea/simenv.hpp"

namespace gea {

enum class StageStyle { funnel, promotion };

std::string_view to_string(StageStyle style);
StageStyle stage_style_from_string(std::string_view text);

struct StagePlan {
    StageStyle style = StageStyle::funnel;
    std::vector<std::size_t> sanity_set;
    std::vector<std::size_t> mid_set;
    std::vector<std::size_t> full_set;
    /// Promotion needs a small-set score strictly above this.
    double promote_threshold = 0.40;
    std::size_t top_n_to_full = 2;

    /// Sanity = first min(10, D) tasks, mid = the next 50 (all tasks when
    /// none are left), full = all tasks.
    static StagePlan defaults(StageStyle style, const SimWorld& world);

    /// Task set behind selection-time z: mid for funnel, small for promotion.
    const std::vector<std::size_t>& evolution_set() const;

    /// InvalidArgument for out-of-range indices, empty sets or a threshold
    /// outside (0, 1). Returns warnings (sanity/mid overlap).
    std::vector<std::string> validate(const SimWorld& world) const;
};

/// Scores agents on task sets. Subclass to observe which sets are touched.
class StageEvaluator {
public:
    virtual ~StageEvaluator() = default;
    virtual std::size_t solved(const AgentRecord& agent, const SimWorld& world,
                               std::span<const std::size_t> tasks, std::string_view set_name);
};

struct StageRow {
    AgentId agent;
    int stage = 1;
    std::string set_name;
    std::size_t solved = 0;
    std::size_t total = 0;
    double score = 0.0;
    bool advanced = false;

    friend bool operator==(const StageRow&, const StageRow&) = default;
};

struct StageReport {
    StageStyle style = StageStyle::funnel;
    std::vector<StageRow> rows;  ///< stage order, then ascending id

    std::vector<StageRow> stage(int n) const;
    const StageRow* find(AgentId agent, int stage) const;

    /// Columns: agent_id,stage,set_name,solved,total,score,advanced
    std::string to_csv() const;
    std::string to_json() const;
};

/// Fails compile-broken agents and agents solving no sanity task.
bool sanity_gate(const AgentRecord& agent, const StagePlan& plan, const SimWorld& world,
                 StageEvaluator& evaluator);
bool sanity_gate(const AgentRecord& agent, const StagePlan& plan, const SimWorld& world);

/// Sanity -> mid -> top_n_to_full on the full set (ties by ascending id).
/// EmptyArchiveError on an empty archive.
StageReport run_funnel(const Archive& archive, const StagePlan& plan, const SimWorld& world,
                       StageEvaluator& evaluator);
StageReport run_funnel(const Archive& archive, const StagePlan& plan, const SimWorld& world);

/// Small set, then the medium set for agents strictly above the threshold.
/// EmptyArchiveError on an empty archive.
StageReport run_promotion(const Archive& archive, const StagePlan& plan, const SimWorld& world,
                          StageEvaluator& evaluator);
StageReport run_promotion(const Archive& archive, const StagePlan& plan, const SimWorld& world);

}  // namespace gea
