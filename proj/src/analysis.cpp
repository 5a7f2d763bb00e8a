#include "gea/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include "json.hpp"

#include "gea/errors.hpp"

namespace gea {

namespace {

std::string fixed(double v) {
    if (std::isnan(v)) return "NA";
    std::ostringstream out;
    out.setf(std::ios::fixed);
    out.precision(6);
    out << v;
    return out.str();
}

template <typename T>
double mean_of(const std::vector<T>& v) {
    if (v.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& x : v) sum += static_cast<double>(x);
    return sum / static_cast<double>(v.size());
}

std::string iteration_cell(const std::optional<std::uint64_t>& it) {
    return it ? std::to_string(*it) : "NONE";
}

MethodSummary summarize(std::span<const RunTranscript> runs, std::string label) {
    MethodSummary s;
    s.label = std::move(label);
    for (const auto& t : runs) {
        const Archive archive = t.final_archive();
        const AgentId best = best_agent(archive);
        s.final_best.push_back(archive.at(best).performance);
        s.best_ancestors.push_back(experience_ancestors(archive, best).size());
        s.integrated_tools.push_back(archive.at(best).tools.size());
        s.top5_worst.push_back(top_k_worst_case(archive, 5).value_or(std::nan("")));
        s.curves.push_back(best_curve(t));
    }
    const std::size_t len = s.curves.front().size();
    s.mean_curve.assign(len, 0.0);
    for (const auto& c : s.curves) {
        for (std::size_t i = 0; i < len; ++i) s.mean_curve[i] += c[i];
    }
    for (auto& v : s.mean_curve) v /= static_cast<double>(s.curves.size());
    return s;
}

}  // namespace

std::vector<AgentId> ranked_agents(const Archive& archive) {
    std::vector<const AgentRecord*> agents;
    for (const auto& r : archive.records()) {
        if (r.selectable()) agents.push_back(&r);
    }
    std::stable_sort(agents.begin(), agents.end(), [](const AgentRecord* x, const AgentRecord* y) {
        return x->performance > y->performance;
    });
    std::vector<AgentId> out;
    for (const auto* r : agents) out.push_back(r->id);
    return out;
}

AgentId best_agent(const Archive& archive) {
    const auto ranked = ranked_agents(archive);
    if (ranked.empty()) throw EmptyArchiveError("no selectable agent");
    return ranked.front();
}

std::optional<double> top_k_worst_case(const Archive& archive, std::size_t k) {
    const auto ranked = ranked_agents(archive);
    if (k == 0 || ranked.size() < k) return std::nullopt;
    return archive.at(ranked[k - 1]).performance;
}

std::string AncestorTable::to_csv() const {
    std::ostringstream out;
    out << "k,worst_case,ancestor_count,fraction,agents\n";
    for (const auto& row : rows) {
        out << row.k << ',' << fixed(row.worst_case) << ',' << row.ancestor_count << ','
            << fixed(row.fraction) << ',';
        for (std::size_t i = 0; i < row.per_agent.size(); ++i) {
            if (i) out << ' ';
            out << row.per_agent[i].first.value << ':' << row.per_agent[i].second;
        }
        out << '\n';
    }
    return out.str();
}

AncestorTable ancestor_table(const RunTranscript& transcript, std::span<const std::size_t> ranks,
                             AncestryMode mode) {
    const Archive archive = transcript.final_archive();
    const auto ranked = ranked_agents(archive);
    const std::size_t evolved = transcript.evolved_agents();
    AncestorTable table;
    for (std::size_t k : ranks) {
        if (k == 0 || ranked.size() < k) {
            table.notes.push_back("top-" + std::to_string(k) + " omitted: only " +
                                  std::to_string(ranked.size()) + " selectable agents");
            continue;
        }
        AncestorRow row;
        row.k = k;
        row.worst_case = archive.at(ranked[k - 1]).performance;
        for (std::size_t i = 0; i < k; ++i) {
            const std::size_t count = experience_ancestors(archive, ranked[i], mode).size();
            row.per_agent.emplace_back(ranked[i], count);
            row.ancestor_count = std::max(row.ancestor_count, count);
        }
        row.fraction = evolved == 0 ? 0.0
                                    : static_cast<double>(row.ancestor_count) / static_cast<double>(evolved);
        table.rows.push_back(std::move(row));
    }
    return table;
}

std::vector<ToolTimelineRow> tool_timeline(const RunTranscript& transcript) {
    std::map<std::string, ToolTimelineRow> rows;
    for (const auto& tool : transcript.world.tool_universe) rows[tool].tool = tool;

    const auto note = [&](const AgentRecord& agent, std::uint64_t iteration, bool is_best) {
        for (const auto& tag : agent.tools) {
            auto& row = rows[tag.name];
            row.tool = tag.name;
            if (!row.discovered) row.discovered = iteration;
            if (is_best && !row.integrated) row.integrated = iteration;
        }
    };

    Archive archive(transcript.initial.empty() ? 0 : transcript.initial.front().z.size(),
                    transcript.config.seed);
    for (const auto& r : transcript.initial) archive.insert(r);
    for (const auto& r : transcript.initial) note(r, 0, false);
    if (archive.selectable_count() > 0) note(archive.at(best_agent(archive)), 0, true);

    for (const auto& it : transcript.iterations) {
        for (const auto& r : it.offspring) {
            archive.insert(r);
            note(r, it.iteration, false);
        }
        if (archive.selectable_count() > 0) note(archive.at(best_agent(archive)), it.iteration, true);
    }

    std::vector<ToolTimelineRow> out;
    for (const auto& tool : transcript.world.tool_universe) out.push_back(rows.at(tool));
    return out;
}

std::string timeline_csv(std::span<const ToolTimelineRow> rows) {
    std::ostringstream out;
    out << "tool,discovered,integrated\n";
    for (const auto& r : rows) {
        out << r.tool << ',' << iteration_cell(r.discovered) << ',' << iteration_cell(r.integrated) << '\n';
    }
    return out.str();
}

std::size_t integrated_tool_count(const RunTranscript& transcript) {
    const Archive archive = transcript.final_archive();
    return archive.at(best_agent(archive)).tools.size();
}

std::vector<double> best_curve(const RunTranscript& transcript) {
    double best = -1.0;
    for (const auto& r : transcript.initial) {
        if (r.selectable()) best = std::max(best, r.performance);
    }
    std::vector<double> curve;
    for (const auto& it : transcript.iterations) {
        for (const auto& r : it.offspring) {
            if (r.selectable()) best = std::max(best, r.performance);
            curve.push_back(std::max(best, 0.0));
        }
    }
    return curve;
}

double binomial_upper_tail(std::size_t n, std::size_t k) {
    if (k == 0) return 1.0;
    if (k > n) return 0.0;
    // log-sum-exp over log C(n, i) - n log 2.
    const double log_half_n = static_cast<double>(n) * std::log(0.5);
    std::vector<double> terms;
    for (std::size_t i = k; i <= n; ++i) {
        terms.push_back(std::lgamma(n + 1.0) - std::lgamma(i + 1.0) - std::lgamma(n - i + 1.0) + log_half_n);
    }
    const double peak = *std::max_element(terms.begin(), terms.end());
    double sum = 0.0;
    for (double t : terms) sum += std::exp(t - peak);
    return std::min(1.0, std::exp(peak) * sum);
}

SignTest sign_test(std::span<const double> differences) {
    SignTest out;
    for (double d : differences) {
        if (d > 0) {
            ++out.wins;
        } else if (d < 0) {
            ++out.losses;
        } else {
            ++out.ties;
        }
    }
    const std::size_t n = out.wins + out.losses;
    out.degenerate = n == 0;
    out.p_value = out.degenerate ? 1.0 : binomial_upper_tail(n, out.wins);
    return out;
}

double MethodSummary::mean_final_best() const { return mean_of(final_best); }
double MethodSummary::mean_ancestors() const { return mean_of(best_ancestors); }
double MethodSummary::mean_integrated_tools() const { return mean_of(integrated_tools); }

ComparisonReport compare(std::span<const RunTranscript> a, std::span<const RunTranscript> b,
                         std::string label_a, std::string label_b) {
    if (a.empty()) throw InvalidArgument("compare: need at least one seed pair");
    if (a.size() != b.size()) {
        throw InvalidArgument("compare: " + std::to_string(a.size()) + " vs " +
                              std::to_string(b.size()) + " transcripts");
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].evolved_agents() != b[i].evolved_agents()) {
            throw InvalidArgument("compare: pair " + std::to_string(i) + " budgets differ (" +
                                  std::to_string(a[i].evolved_agents()) + " vs " +
                                  std::to_string(b[i].evolved_agents()) + " evolved agents)");
        }
    }
    ComparisonReport report;
    report.a = summarize(a, std::move(label_a));
    report.b = summarize(b, std::move(label_b));
    for (std::size_t i = 0; i < a.size(); ++i) {
        report.seeds.push_back(a[i].config.seed);
        report.differences.push_back(report.a.final_best[i] - report.b.final_best[i]);
        if (!std::isnan(report.a.top5_worst[i]) && report.a.top5_worst[i] >= report.b.final_best[i]) {
            ++report.elevation_count;
        }
    }
    report.sign = sign_test(report.differences);
    return report;
}

std::string ComparisonReport::to_json() const {
    using nlohmann::json;
    const auto method = [](const MethodSummary& m) {
        json top5 = json::array();
        for (double v : m.top5_worst) top5.push_back(std::isnan(v) ? json(nullptr) : json(v));
        return json{{"label", m.label},
                    {"final_best", m.final_best},
                    {"mean_final_best", m.mean_final_best()},
                    {"best_ancestors", m.best_ancestors},
                    {"mean_ancestors", m.mean_ancestors()},
                    {"integrated_tools", m.integrated_tools},
                    {"mean_integrated_tools", m.mean_integrated_tools()},
                    {"top5_worst", top5},
                    {"mean_curve", m.mean_curve}};
    };
    json j{{"seeds", seeds},
           {"methods", {method(a), method(b)}},
           {"differences", differences},
           {"sign_test",
            {{"wins", sign.wins},
             {"losses", sign.losses},
             {"ties", sign.ties},
             {"p_value", sign.p_value},
             {"degenerate", sign.degenerate}}},
           {"elevation_count", elevation_count}};
    return j.dump(2) + "\n";
}

std::string ComparisonReport::per_seed_csv() const {
    std::ostringstream out;
    out << "seed," << a.label << "_final_best," << b.label << "_final_best,difference," << a.label
        << "_ancestors," << b.label << "_ancestors," << a.label << "_tools," << b.label << "_tools,"
        << a.label << "_top5_worst\n";
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        out << seeds[i] << ',' << fixed(a.final_best[i]) << ',' << fixed(b.final_best[i]) << ','
            << fixed(differences[i]) << ',' << a.best_ancestors[i] << ',' << b.best_ancestors[i] << ','
            << a.integrated_tools[i] << ',' << b.integrated_tools[i] << ',' << fixed(a.top5_worst[i])
            << '\n';
    }
    return out.str();
}

std::string ComparisonReport::curve_csv() const {
    std::ostringstream out;
    out << "evolved_agents," << a.label << ',' << b.label << '\n';
    for (std::size_t i = 0; i < a.mean_curve.size(); ++i) {
        out << i + 1 << ',' << fixed(a.mean_curve[i]) << ',' << fixed(b.mean_curve[i]) << '\n';
    }
    return out.str();
}

std::optional<std::uint64_t> repair_iterations(const RunTranscript& transcript) {
    if (!transcript.injection) throw InvalidArgument("repair_iterations: transcript has no injection record");
    const InjectionRecord& injection = *transcript.injection;
    std::set<AgentId> lineage{injection.faulty};
    for (const auto& it : transcript.iterations) {
        for (const auto& child : it.offspring) {
            if (!child.framework_parent || lineage.count(*child.framework_parent) == 0) continue;
            lineage.insert(child.id);
            if (child.broken_bugs.count(injection.bug) == 0 &&
                child.performance >= injection.pre_injection_performance) {
                return it.iteration;
            }
        }
    }
    return std::nullopt;
}

std::vector<PatchStep> patch_trajectories(const RunTranscript& transcript, std::size_t top_n) {
    const Archive archive = transcript.final_archive();
    const auto ranked = ranked_agents(archive);
    std::vector<PatchStep> out;
    for (std::size_t rank = 0; rank < std::min(top_n, ranked.size()); ++rank) {
        const AgentRecord& agent = archive.at(ranked[rank]);
        for (std::size_t i = 0; i < agent.patches.size(); ++i) {
            out.push_back({rank + 1, agent.id, i + 1, agent.patches[i]});
        }
    }
    return out;
}

std::string trajectories_csv(std::span<const PatchStep> steps) {
    std::ostringstream out;
    out << "rank,agent_id,step,patch_id,kind,payload,source_agent,delta_score\n";
    for (const auto& s : steps) {
        out << s.rank << ',' << s.agent.value << ',' << s.step << ',' << s.patch.id << ','
            << to_string(s.patch.kind) << ',' << s.patch.payload << ','
            << (s.patch.source_agent ? std::to_string(s.patch.source_agent->value) : "self") << ','
            << (s.patch.delta_score ? fixed(*s.patch.delta_score) : "NA") << '\n';
    }
    return out.str();
}

}  // namespace gea
