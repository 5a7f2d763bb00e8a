#include "gea/evaluation.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

#include "json.hpp"

#include "gea/errors.hpp"

namespace gea {

namespace {

constexpr std::size_t kSanitySize = 10;
constexpr std::size_t kMidSize = 50;

StageRow score_row(const AgentRecord& agent, int stage, std::string name,
                   const std::vector<std::size_t>& tasks, const SimWorld& world,
                   StageEvaluator& evaluator) {
    StageRow row;
    row.agent = agent.id;
    row.stage = stage;
    row.set_name = std::move(name);
    row.solved = evaluator.solved(agent, world, tasks, row.set_name);
    row.total = tasks.size();
    row.score = row.total == 0 ? 0.0 : static_cast<double>(row.solved) / static_cast<double>(row.total);
    return row;
}

void check_set(const std::vector<std::size_t>& tasks, const SimWorld& world, const char* name) {
    if (tasks.empty()) throw InvalidArgument(std::string("stage plan: ") + name + " set is empty");
    for (auto t : tasks) {
        if (t >= world.size()) {
            throw InvalidArgument(std::string("stage plan: ") + name + " index " + std::to_string(t) +
                                  " outside the world");
        }
    }
}

}  // namespace

std::string_view to_string(StageStyle style) {
    return style == StageStyle::funnel ? "funnel" : "promotion";
}

StageStyle stage_style_from_string(std::string_view text) {
    if (text == "funnel") return StageStyle::funnel;
    if (text == "promotion") return StageStyle::promotion;
    throw InvalidArgument("unknown stage style '" + std::string(text) + "'");
}

StagePlan StagePlan::defaults(StageStyle style, const SimWorld& world) {
    StagePlan plan;
    plan.style = style;
    const std::size_t d = world.size();
    const std::size_t sanity = std::min(kSanitySize, d);
    for (std::size_t t = 0; t < sanity; ++t) plan.sanity_set.push_back(t);
    for (std::size_t t = sanity; t < std::min(d, sanity + kMidSize); ++t) plan.mid_set.push_back(t);
    if (plan.mid_set.empty()) plan.mid_set = all_tasks(world);
    plan.full_set = all_tasks(world);
    return plan;
}

const std::vector<std::size_t>& StagePlan::evolution_set() const {
    return style == StageStyle::funnel ? mid_set : sanity_set;
}

std::vector<std::string> StagePlan::validate(const SimWorld& world) const {
    check_set(sanity_set, world, "sanity");
    check_set(mid_set, world, "mid");
    if (style == StageStyle::funnel) check_set(full_set, world, "full");
    if (!(promote_threshold > 0.0 && promote_threshold < 1.0)) {
        throw InvalidArgument("stage plan: promote_threshold must lie in (0, 1)");
    }
    if (top_n_to_full < 1) throw InvalidArgument("stage plan: top_n_to_full must be >= 1");
    std::vector<std::string> warnings;
    const std::set<std::size_t> sanity(sanity_set.begin(), sanity_set.end());
    if (std::any_of(mid_set.begin(), mid_set.end(), [&](auto t) { return sanity.count(t) > 0; })) {
        warnings.push_back("mid set overlaps the sanity set");
    }
    return warnings;
}

std::size_t StageEvaluator::solved(const AgentRecord& agent, const SimWorld& world,
                                   std::span<const std::size_t> tasks, std::string_view) {
    return solved_count(agent, world, tasks);
}

std::vector<StageRow> StageReport::stage(int n) const {
    std::vector<StageRow> out;
    for (const auto& row : rows) {
        if (row.stage == n) out.push_back(row);
    }
    return out;
}

const StageRow* StageReport::find(AgentId agent, int stage) const {
    for (const auto& row : rows) {
        if (row.agent == agent && row.stage == stage) return &row;
    }
    return nullptr;
}

std::string StageReport::to_csv() const {
    std::ostringstream out;
    out << "agent_id,stage,set_name,solved,total,score,advanced\n";
    out.setf(std::ios::fixed);
    out.precision(6);
    for (const auto& r : rows) {
        out << r.agent.value << ',' << r.stage << ',' << r.set_name << ',' << r.solved << ','
            << r.total << ',' << r.score << ',' << (r.advanced ? "true" : "false") << '\n';
    }
    return out.str();
}

std::string StageReport::to_json() const {
    nlohmann::json j;
    j["style"] = std::string(gea::to_string(style));
    j["rows"] = nlohmann::json::array();
    for (const auto& r : rows) {
        j["rows"].push_back({{"agent_id", r.agent.value},
                             {"stage", r.stage},
                             {"set_name", r.set_name},
                             {"solved", r.solved},
                             {"total", r.total},
                             {"score", r.score},
                             {"advanced", r.advanced}});
    }
    return j.dump(2) + "\n";
}

bool sanity_gate(const AgentRecord& agent, const StagePlan& plan, const SimWorld& world,
                 StageEvaluator& evaluator) {
    if (agent.gate_status == GateStatus::failed_compile) return false;
    return evaluator.solved(agent, world, plan.sanity_set, "sanity") > 0;
}

bool sanity_gate(const AgentRecord& agent, const StagePlan& plan, const SimWorld& world) {
    StageEvaluator evaluator;
    return sanity_gate(agent, plan, world, evaluator);
}

StageReport run_funnel(const Archive& archive, const StagePlan& plan, const SimWorld& world,
                       StageEvaluator& evaluator) {
    if (archive.empty()) throw EmptyArchiveError("run_funnel: empty archive");
    if (plan.style != StageStyle::funnel) throw InvalidArgument("run_funnel: plan is not funnel style");
    plan.validate(world);

    StageReport report;
    report.style = StageStyle::funnel;
    std::vector<const AgentRecord*> survivors;
    for (const auto& agent : archive.records()) {
        StageRow row;
        if (agent.gate_status == GateStatus::failed_compile) {
            row = {agent.id, 1, "sanity", 0, plan.sanity_set.size(), 0.0, false};
        } else {
            row = score_row(agent, 1, "sanity", plan.sanity_set, world, evaluator);
            row.advanced = row.solved > 0;
        }
        if (row.advanced) survivors.push_back(&agent);
        report.rows.push_back(row);
    }

    std::vector<StageRow> mid;
    for (const auto* agent : survivors) mid.push_back(score_row(*agent, 2, "mid", plan.mid_set, world, evaluator));
    std::vector<std::size_t> order(mid.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    // Survivors are in ascending id already; stable sort keeps id order on ties.
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return mid[a].solved * mid[b].total > mid[b].solved * mid[a].total; });
    const std::size_t cut = std::min(plan.top_n_to_full, mid.size());
    for (std::size_t i = 0; i < cut; ++i) mid[order[i]].advanced = true;
    report.rows.insert(report.rows.end(), mid.begin(), mid.end());

    for (std::size_t i = 0; i < mid.size(); ++i) {
        if (mid[i].advanced) {
            report.rows.push_back(score_row(*survivors[i], 3, "full", plan.full_set, world, evaluator));
        }
    }
    return report;
}

StageReport run_funnel(const Archive& archive, const StagePlan& plan, const SimWorld& world) {
    StageEvaluator evaluator;
    return run_funnel(archive, plan, world, evaluator);
}

StageReport run_promotion(const Archive& archive, const StagePlan& plan, const SimWorld& world,
                          StageEvaluator& evaluator) {
    if (archive.empty()) throw EmptyArchiveError("run_promotion: empty archive");
    if (plan.style != StageStyle::promotion) {
        throw InvalidArgument("run_promotion: plan is not promotion style");
    }
    plan.validate(world);

    StageReport report;
    report.style = StageStyle::promotion;
    std::vector<const AgentRecord*> promoted;
    for (const auto& agent : archive.records()) {
        StageRow row = score_row(agent, 1, "small", plan.sanity_set, world, evaluator);
        row.advanced = row.score > plan.promote_threshold;
        if (row.advanced) promoted.push_back(&agent);
        report.rows.push_back(row);
    }
    for (const auto* agent : promoted) {
        report.rows.push_back(score_row(*agent, 2, "medium", plan.mid_set, world, evaluator));
    }
    return report;
}

StageReport run_promotion(const Archive& archive, const StagePlan& plan, const SimWorld& world) {
    StageEvaluator evaluator;
    return run_promotion(archive, plan, world, evaluator);
}

}  // namespace gea
