// Acceptance run: one PASS/FAIL line per criterion, exit 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "fixtures.hpp"
#include "generators.hpp"
#include "oracles.hpp"
#include "stub_server.hpp"

#include "gea/analysis.hpp"
#include "gea/engine.hpp"
#include "gea/errors.hpp"
#include "gea/evaluation.hpp"
#include "gea/experiment.hpp"
#include "gea/json_codec.hpp"
#include "gea/persistence.hpp"
#include "gea/remote_operator.hpp"
#include "gea/selection.hpp"

using namespace gea;

namespace {

constexpr double kEps = 1e-8;
constexpr double kTol = 1e-12;

// FNV-1a over the encoded paper-desk seed-1 GEA transcript. A build on a
// different platform or toolchain must reproduce it bit for bit.
constexpr std::uint64_t kFrozenDigest = 0x776d1ae925d53fc1ULL;

struct Verdict {
    bool pass = false;
    std::string detail;
};

/// Collects violations; the detail names the first few.
class Tally {
public:
    void check(bool ok, const std::string& what) {
        ++checks_;
        if (ok) return;
        ++failures_;
        if (failures_ <= 3) first_ += (first_.empty() ? "" : "; ") + what;
    }
    std::size_t failures() const { return failures_; }
    Verdict verdict(const std::string& summary) const {
        if (failures_ == 0) return {true, summary};
        return {false, std::to_string(failures_) + "/" + std::to_string(checks_) + " violations: " + first_};
    }

private:
    std::size_t checks_ = 0;
    std::size_t failures_ = 0;
    std::string first_;
};

std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex(std::uint64_t v) {
    char buf[19];
    std::snprintf(buf, sizeof buf, "0x%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string fmt(double v, int digits = 3) {
    std::ostringstream out;
    out.precision(digits);
    out << std::fixed << v;
    return out.str();
}

std::vector<std::uint64_t> ids(const std::vector<AgentId>& v) {
    std::vector<std::uint64_t> out;
    for (auto id : v) out.push_back(id.value);
    return out;
}

// Paper-desk pairs are shared by criteria 6-9 and computed once.
const std::vector<SeedPair>& desk_pairs() {
    static const std::vector<SeedPair> pairs = [] {
        const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
        return run_pairs(paper_desk_preset(), std::min<std::size_t>(hw, 8));
    }();
    return pairs;
}

const ComparisonReport& desk_report() {
    static const ComparisonReport report = [] {
        std::vector<RunTranscript> a, b;
        for (const auto& p : desk_pairs()) {
            a.push_back(p.gea);
            b.push_back(p.tree);
        }
        return compare(a, b);
    }();
    return report;
}

Verdict selection_oracle() {
    oracle::Gen g(2024);
    Tally t;
    for (int round = 0; round < 200; ++round) {
        const std::size_t d = g.range(1, 16);
        const auto agents = gen::random_agents(g, g.range(1, 20), d);
        const std::size_t K = g.range(1, 4), M = g.range(1, 5);
        const auto got = ids(select_parent_group(gen::archive_of(agents, d), {K, M, kEps}).members);
        t.check(got == oracle::select(agents, K, M, kEps), "archive " + std::to_string(round));
    }
    return t.verdict("200/200 archives match the exhaustive oracle");
}

Verdict metric_properties() {
    oracle::Gen g(5);
    Tally t;
    for (int i = 0; i < 1000; ++i) {
        const std::size_t d = g.range(1, 24);
        const auto a = oracle::to_vector(g.bits(d)), b = oracle::to_vector(g.bits(d));
        const double ab = cosine_distance(a, b, kEps);
        t.check(ab == cosine_distance(b, a, kEps), "symmetry");
        t.check(ab >= 0.0 && ab <= 1.0, "distance bounds");
        if (a.count() > 0) {
            t.check(cosine_distance(a, a, kEps) <= kEps / double(a.count()) + kTol, "identity residual");
        }
        const TaskSuccessVector zero(d);
        t.check(std::abs(cosine_distance(zero, b, kEps) - 1.0) <= kTol, "zero vector");
    }
    for (int i = 0; i < 1000; ++i) {
        const std::size_t d = g.range(2, 12);
        const auto agents = gen::random_agents(g, g.range(2, 10), d);
        const std::size_t K = g.range(1, 4), M = g.range(1, 5);
        std::vector<TaskSuccessVector> zs;
        for (const auto& a : agents) zs.push_back(oracle::to_vector(a.z));
        std::vector<Candidate> base;
        double top = 0.0;
        for (std::size_t j = 0; j < agents.size(); ++j) {
            const double nov = knn_novelty(zs, j, M, kEps);
            t.check(nov >= 0.0 && nov <= 1.0, "novelty bounds");
            const double s = pn_score(agents[j].alpha, nov);
            t.check(s >= 0.0 && s <= 1.0, "score bounds");
            base.push_back({AgentId{agents[j].id}, zs[j], agents[j].alpha});
            top = std::max(top, agents[j].alpha);
        }
        const auto ref = select_from_candidates(base, {K, M, kEps}).members;
        for (double c : {0.1, 10.0}) {
            const double factor = top * c > 1.0 ? 1.0 / top : c;
            if (factor * top == 0.0) continue;
            auto scaled = base;
            for (auto& cand : scaled) cand.performance = std::min(1.0, cand.performance * factor);
            t.check(select_from_candidates(scaled, {K, M, kEps}).members == ref, "alpha scaling");
        }
        const std::size_t who = g.index(base.size());
        const auto rank = [&](const std::vector<Candidate>& cands) {
            const auto order = select_from_candidates(cands, {cands.size(), M, kEps}).members;
            return std::find(order.begin(), order.end(), base[who].id) - order.begin();
        };
        auto raised = base;
        raised[who].performance = std::min(1.0, raised[who].performance + g.real(0.0, 0.5));
        t.check(rank(raised) <= rank(base), "rank monotonicity");
    }
    return t.verdict("1000 cases per property, zero violations");
}

Verdict determinism() {
    RunConfig cfg = paper_desk_preset().run;
    cfg.seed = 1;
    Tally t;
    double slowest = 0.0;
    std::string first_transcript, first_archive;
    for (int pass = 0; pass < 2; ++pass) {
        const auto started = std::chrono::steady_clock::now();
        const auto run_t = run(cfg);
        slowest = std::max(slowest, std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count());
        const std::string transcript = encode_transcript(run_t);
        const std::string archive = encode_archive(run_t.final_archive());
        if (pass == 0) {
            first_transcript = transcript;
            first_archive = archive;
            t.check(verify_replay(run_t).ok(), "replay diff not empty");
        } else {
            t.check(transcript == first_transcript, "transcript bytes differ");
            t.check(archive == first_archive, "archive bytes differ");
        }
    }
    const std::uint64_t digest = fnv1a(first_transcript);
    t.check(digest == kFrozenDigest, "digest " + hex(digest) + " != frozen " + hex(kFrozenDigest));
    t.check(slowest < 10.0, "run took " + fmt(slowest) + " s");
    return t.verdict("byte-identical twice, replay clean, digest " + hex(digest) + ", slowest run " +
                     fmt(slowest) + " s");
}

Verdict loop_invariants() {
    Tally t;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        for (auto mode : {EvolutionMode::gea, EvolutionMode::tree}) {
            RunConfig cfg = paper_desk_preset().run;
            cfg.seed = seed;
            if (mode == EvolutionMode::tree) cfg = matched_baseline(cfg);
            const auto tr = run(cfg);
            const std::string tag = std::string(to_string(mode)) + " seed " + std::to_string(seed);
            std::size_t size = tr.initial.size();
            double best = tr.initial.front().performance;
            for (const auto& it : tr.iterations) {
                t.check(it.offspring.size() == it.group.size(), tag + ": offspring != group");
                t.check(it.archive_size == size + it.offspring.size(), tag + ": archive not append-only");
                t.check(it.best_performance >= best, tag + ": best curve fell");
                const std::size_t expected = mode == EvolutionMode::gea ? it.group.size() : 1;
                t.check(it.contributors.size() == expected, tag + ": contributor count");
                for (const auto& d : it.directives) {
                    for (const auto& action : d.actions) {
                        if (action.kind != ActionKind::adopt_tool) continue;
                        t.check(action.origin && std::find(it.contributors.begin(), it.contributors.end(),
                                                           *action.origin) != it.contributors.end(),
                                tag + ": adopt origin outside S");
                    }
                }
                size = it.archive_size;
                best = it.best_performance;
            }
            const Archive a = tr.final_archive();
            t.check(a.at(AgentId{0}) == tr.initial.front(), tag + ": seed record changed");
            const auto curve = best_curve(tr);
            t.check(std::is_sorted(curve.begin(), curve.end()), tag + ": best curve not monotone");
        }
    }
    return t.verdict("40 runs (20 seeds x gea/tree), zero violations");
}

class CountingEvaluator final : public StageEvaluator {
public:
    std::size_t solved(const AgentRecord& agent, const SimWorld& world, std::span<const std::size_t> tasks,
                       std::string_view set_name) override {
        ++calls[{agent.id.value, std::string(set_name)}];
        return StageEvaluator::solved(agent, world, tasks, set_name);
    }
    std::map<std::pair<std::uint64_t, std::string>, int> calls;
};

AgentRecord evaluated(std::uint64_t id, std::initializer_list<const char*> tools, const SimWorld& w) {
    AgentRecord r;
    r.id = AgentId{id};
    if (id > 0) r.framework_parent = AgentId{0};
    for (const char* tool : tools) r.put_tool({tool, std::nullopt});
    assign_outcome(r, evaluate(r, w));
    return r;
}

std::vector<std::size_t> range_of(std::size_t begin, std::size_t end) {
    std::vector<std::size_t> out;
    for (std::size_t i = begin; i < end; ++i) out.push_back(i);
    return out;
}

SimWorld world_by_tool(const std::vector<std::string>& required, std::size_t n_tools) {
    SimWorld w = fixture::world(n_tools, {});
    for (std::size_t i = 0; i < required.size(); ++i) {
        TaskSpec task;
        task.index = i;
        task.required_tools = {required[i]};
        w.tasks.push_back(task);
    }
    return w;
}

Verdict staged_evaluation() {
    Tally t;
    // Sanity: 10 tasks needing T2, then one of them relaxed to T1.
    SimWorld sanity_world = world_by_tool(std::vector<std::string>(10, "T2"), 2);
    StagePlan sanity;
    sanity.sanity_set = range_of(0, 10);
    const AgentRecord starter = evaluated(0, {"T1"}, sanity_world);
    t.check(!sanity_gate(starter, sanity, sanity_world), "0/10 sanity passed");
    sanity_world.tasks[4].required_tools = {"T1"};
    t.check(sanity_gate(starter, sanity, sanity_world), "1/10 sanity discarded");

    // Promotion: 100-task small set, 40 or 41 solved.
    std::vector<std::string> req;
    for (std::size_t i = 0; i < 110; ++i) req.push_back(i < 40 ? "T1" : i == 40 ? "T2" : "T3");
    const SimWorld promo_world = world_by_tool(req, 3);
    StagePlan promo;
    promo.style = StageStyle::promotion;
    promo.sanity_set = range_of(0, 100);
    promo.mid_set = range_of(100, 110);
    Archive promo_archive(110, 0);
    promo_archive.insert(evaluated(0, {"T1"}, promo_world));
    promo_archive.insert(evaluated(1, {"T1", "T2"}, promo_world));
    CountingEvaluator counting;
    const auto pr = run_promotion(promo_archive, promo, promo_world, counting);
    t.check(!pr.find(AgentId{0}, 1)->advanced, "0.40 promoted");
    t.check(pr.find(AgentId{1}, 1)->advanced, "0.41 not promoted");
    t.check(counting.calls.count({0, "medium"}) == 0, "unpromoted agent touched the medium set");
    t.check(counting.calls.count({1, "medium"}) == 1, "promoted agent skipped the medium set");

    // Funnel: agents 1, 3 and 6 tie on mid; the two lowest ids advance.
    std::vector<std::string> freq(10, "T1");
    for (const char* tool : {"T2", "T2", "T2", "T2", "T3", "T3", "T4", "T4", "T4", "T4"}) freq.push_back(tool);
    const SimWorld funnel_world = world_by_tool(freq, 4);
    StagePlan funnel;
    funnel.sanity_set = range_of(0, 10);
    funnel.mid_set = range_of(10, 20);
    funnel.full_set = range_of(0, 20);
    Archive fa(20, 0);
    fa.insert(evaluated(0, {"T1"}, funnel_world));
    fa.insert(evaluated(1, {"T1", "T2"}, funnel_world));
    fa.insert(evaluated(2, {"T1", "T3"}, funnel_world));
    fa.insert(evaluated(3, {"T1", "T2"}, funnel_world));
    fa.insert(evaluated(4, {"T2"}, funnel_world));
    fa.insert(evaluated(5, {"T1", "T2"}, funnel_world));
    const auto fr = run_funnel(fa, funnel, funnel_world);
    std::vector<std::uint64_t> full;
    for (const auto& row : fr.stage(3)) full.push_back(row.agent.value);
    t.check(full == std::vector<std::uint64_t>{1, 3}, "funnel advanced the wrong agents");
    t.check(!fr.find(AgentId{4}, 1)->advanced, "0/10 sanity agent survived the funnel");
    return t.verdict("sanity 0/10 and 1/10, promotion 0.40/0.41, funnel top-2 by id, medium-set call counts");
}

Verdict main_result() {
    const auto& r = desk_report();
    const bool ok = r.sign.wins >= 15 && r.sign.p_value < 0.05 && r.seeds.size() == 20;
    std::size_t budget = desk_pairs().front().gea.evolved_agents();
    return {ok, "GEA wins " + std::to_string(r.sign.wins) + "/20 (losses " + std::to_string(r.sign.losses) +
                    ", ties " + std::to_string(r.sign.ties) + "), sign-test p = " + fmt(r.sign.p_value, 8) +
                    ", mean best " + fmt(r.a.mean_final_best()) + " vs " + fmt(r.b.mean_final_best()) + ", " +
                    std::to_string(budget) + " evolved agents per run"};
}

Verdict ancestor_direction() {
    const auto& r = desk_report();
    Tally t;
    t.check(r.a.mean_ancestors() > r.b.mean_ancestors(), "GEA ancestors not above tree");
    const Archive fixture_graph = fixture::six_node_graph();
    const auto edges = oracle::edges_of(fixture_graph);
    for (const auto& rec : fixture_graph.records()) {
        std::set<std::uint64_t> got;
        for (auto id : experience_ancestors(fixture_graph, rec.id)) got.insert(id.value);
        t.check(got == oracle::reachable(edges, rec.id.value), "fixture agent " + std::to_string(rec.id.value));
    }
    // Random provenance graphs as well.
    oracle::Gen g(77);
    for (int round = 0; round < 100; ++round) {
        const Archive a = gen::random_archive(g);
        const auto e = oracle::edges_of(a);
        for (const auto& rec : a.records()) {
            std::set<std::uint64_t> got;
            for (auto id : experience_ancestors(a, rec.id)) got.insert(id.value);
            t.check(got == oracle::reachable(e, rec.id.value), "random graph " + std::to_string(round));
        }
    }
    return t.verdict("mean ancestors of best agent " + fmt(r.a.mean_ancestors(), 2) + " vs " +
                     fmt(r.b.mean_ancestors(), 2) + "; fixture and 100 random graphs match reachability");
}

Verdict elevation() {
    const auto& r = desk_report();
    return {r.elevation_count >= 11, "GEA top-5 worst case >= tree best in " + std::to_string(r.elevation_count) +
                                         "/20 seeds"};
}

Verdict tool_direction() {
    const auto& r = desk_report();
    Tally t;
    t.check(r.a.mean_integrated_tools() > r.b.mean_integrated_tools(), "GEA tools not above tree");
    for (const auto& p : desk_pairs()) {
        for (const auto* tr : {&p.gea, &p.tree}) {
            for (const auto& row : tool_timeline(*tr)) {
                if (!row.integrated) continue;
                t.check(row.discovered && *row.integrated >= *row.discovered,
                        row.tool + " integrated before discovery, seed " + std::to_string(p.seed));
            }
        }
    }
    return t.verdict("mean tools of best agent " + fmt(r.a.mean_integrated_tools(), 2) + " vs " +
                     fmt(r.b.mean_integrated_tools(), 2) + "; integrated >= discovered everywhere");
}

Verdict robustness_direction() {
    const ExperimentConfig cfg = paper_desk_preset();
    RunConfig source_cfg = cfg.run;
    source_cfg.mode = EvolutionMode::gea;
    const RunTranscript source = run(source_cfg);
    Tally t;
    const auto summary = run_robustness_experiment(source, cfg.robustness, source_cfg.seed);
    t.check(summary.trials.size() >= 20, "fewer than 20 trials");
    t.check(summary.mean(EvolutionMode::gea) < summary.mean(EvolutionMode::tree), "GEA not faster");

    RobustnessOptions certain = cfg.robustness;
    certain.profile.repair_probability_shared = 1.0;
    const auto sure = run_robustness_experiment(source, certain, source_cfg.seed);
    for (std::size_t i = 0; i < sure.trials.size(); ++i) {
        t.check(sure.trials[i].gea == std::optional<std::uint64_t>(1),
                "p_shared = 1 trial E" + std::to_string(i + 1) + " not repaired in 1 iteration");
    }
    return t.verdict(std::to_string(summary.trials.size()) + " trials, mean repair iterations GEA " +
                     fmt(summary.mean(EvolutionMode::gea), 2) + " vs tree " +
                     fmt(summary.mean(EvolutionMode::tree), 2) + " (unrepaired GEA " +
                     std::to_string(summary.unrepaired(EvolutionMode::gea)) + ", tree " +
                     std::to_string(summary.unrepaired(EvolutionMode::tree)) +
                     "); p_shared = 1 repairs in exactly 1 iteration in all " +
                     std::to_string(sure.trials.size()) + " trials");
}

std::string replace_line(const std::string& text, std::size_t line, const std::string& with) {
    std::string out;
    std::size_t start = 0, n = 1;
    while (start < text.size()) {
        const std::size_t end = text.find('\n', start);
        out += (n == line ? with : text.substr(start, end - start)) + "\n";
        start = end + 1;
        ++n;
    }
    return out;
}

template <typename Fn>
std::size_t error_line(Fn&& fn) {
    try {
        fn();
    } catch (const ParseError& e) {
        return e.line();
    } catch (const Error&) {
        return 0;
    }
    return 0;
}

Verdict persistence() {
    Tally t;
    oracle::Gen g(101);
    for (int i = 0; i < 500; ++i) {
        const Archive a = gen::random_archive(g);
        t.check(decode_archive(encode_archive(a)) == a, "archive round trip " + std::to_string(i));
        const SimWorld w = gen::random_world(g);
        t.check(decode_world(encode_world(w)) == w, "world round trip " + std::to_string(i));
        const RunTranscript tr = gen::random_transcript(g);
        t.check(decode_transcript(encode_transcript(tr)) == tr, "transcript round trip " + std::to_string(i));
    }

    const RunTranscript tr = run(fixture::small_config(4));
    const std::string archive = encode_archive(tr.final_archive());
    const std::size_t lines = std::count(archive.begin(), archive.end(), '\n');
    t.check(error_line([&] { decode_archive(archive.substr(0, archive.size() - 7)); }) == lines,
            "truncated last line");
    t.check(error_line([&] { decode_archive(replace_line(archive, 5, "{\"id\": 3,")); }) == 5, "malformed line 5");
    t.check(error_line([&] { decode_archive(replace_line(archive, 9, "{}")); }) == 9, "incomplete record line 9");
    t.check(error_line([&] { decode_world(archive); }) == 1, "wrong kind");
    bool version = false;
    try {
        std::string header = archive.substr(0, archive.find('\n'));
        const auto at = header.find("\"format_version\":1");
        header.replace(at, 18, "\"format_version\":7");
        decode_archive(replace_line(archive, 1, header));
    } catch (const VersionError&) {
        version = true;
    }
    t.check(version, "version mismatch not reported");
    const std::string transcript = encode_transcript(tr);
    t.check(error_line([&] { decode_transcript(replace_line(transcript, 12, "[1, 2")); }) == 12,
            "malformed transcript line 12");
    return t.verdict("500 random archives, worlds and transcripts round-trip; corrupt files report the right line");
}

Verdict remote_boundary() {
    using Cause = RemoteOperatorError::Cause;
    Tally t;
    stub::Server server;
    const SimWorld w = fixture::world(3, {{"T1"}, {"T2"}, {"T3"}});
    const AgentRecord agent = fixture::agent(0, std::nullopt, "100", {{"T1", std::nullopt}});
    const std::vector<std::size_t> probe{0, 1, 2};
    Rng trace_rng(2), rng(1);
    const SharedExperience s = self_only(collect_trace(agent, w, probe, trace_rng));
    RemoteOperatorConfig cfg;
    cfg.base_url = server.base_url();
    cfg.timeout = std::chrono::milliseconds(2000);
    cfg.token = "secret";
    Directive empty;
    empty.agent = AgentId{0};

    const auto cause = [&](RemoteOperator& op, bool evolve) -> std::optional<Cause> {
        try {
            if (evolve) {
                op.evolve(agent, empty, s, late_profile(), w, rng);
            } else {
                op.reflect(agent, s, late_profile(), rng);
            }
        } catch (const RemoteOperatorError& e) {
            return e.cause();
        }
        return std::nullopt;
    };

    Json request;
    std::string auth;
    server.on([&](const std::string&, const httplib::Request& req, httplib::Response& res) {
        request = Json::parse(req.body);
        auth = req.get_header_value("Authorization");
        res.set_content(Json{{"directive", to_json_value(empty)}}.dump(), "application/json");
    });
    RemoteOperator op(cfg);
    t.check(!cause(op, false), "valid reflect rejected");
    t.check(request.value("schema", "") == kOperatorSchema, "request schema tag");
    t.check(request.contains("agent") && request.contains("shared_experience") && request.contains("profile"),
            "request fields");
    t.check(!request.at("agent").contains("z"), "request leaks z");
    t.check(auth == "Bearer secret", "bearer token");
    t.check(!op.replayable(), "remote operator claims replayability");

    server.on([&](const std::string&, const httplib::Request&, httplib::Response& res) {
        Directive d = empty;
        d.actions.push_back({ActionKind::adopt_tool, "T2", AgentId{9}});
        res.set_content(Json{{"directive", to_json_value(d)}}.dump(), "application/json");
    });
    t.check(cause(op, false) == Cause::schema, "directive origin outside S accepted");

    server.on([&](const std::string&, const httplib::Request&, httplib::Response& res) {
        res.set_content(R"({"patches":[{"kind":"add-tool","payload":"T2","source_agent":4}]})", "application/json");
    });
    t.check(cause(op, true) == Cause::schema, "patch source outside S accepted");

    server.on([&](const std::string&, const httplib::Request&, httplib::Response& res) {
        res.set_content(R"({"patches":[{"kind":"add-tool","payload":"T2","source_agent":"self"}]})",
                        "application/json");
    });
    t.check(!cause(op, true), "valid evolve rejected");

    server.on([&](const std::string&, const httplib::Request&, httplib::Response& res) {
        res.set_content("{\"directive\":", "application/json");
    });
    t.check(cause(op, false) == Cause::schema, "malformed body");

    server.on([&](const std::string&, const httplib::Request&, httplib::Response& res) { res.status = 503; });
    t.check(cause(op, false) == Cause::http_status, "HTTP 503");

    server.on([&](const std::string&, const httplib::Request&, httplib::Response& res) {
        std::this_thread::sleep_for(std::chrono::milliseconds(1200));
        res.set_content("{}", "application/json");
    });
    RemoteOperatorConfig fast = cfg;
    fast.timeout = std::chrono::milliseconds(250);
    RemoteOperator slow(fast);
    t.check(cause(slow, false) == Cause::timeout, "timeout");

    server.stop();
    t.check(cause(op, false) == Cause::transport, "closed port");
    return t.verdict("schemas, auth, origin checks, timeout, HTTP status and transport failures");
}

struct Criterion {
    const char* name;
    double budget_s;  ///< 0 means no runtime bound
    Verdict (*fn)();
};

}  // namespace

int main() {
    const Criterion criteria[] = {
        {"selection matches brute-force oracle", 5.0, selection_oracle},
        {"metric properties", 0.0, metric_properties},
        {"determinism and replay", 0.0, determinism},
        {"loop invariants", 0.0, loop_invariants},
        {"staged evaluation", 0.0, staged_evaluation},
        {"GEA beats tree baseline", 60.0, main_result},
        {"ancestor integration", 0.0, ancestor_direction},
        {"population elevation", 0.0, elevation},
        {"tool consolidation", 0.0, tool_direction},
        {"bug repair speed", 30.0, robustness_direction},
        {"persistence", 0.0, persistence},
        {"remote operator boundary", 0.0, remote_boundary},
    };
    int failed = 0;
    int n = 0;
    for (const auto& c : criteria) {
        ++n;
        const auto started = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = c.fn();
        } catch (const std::exception& e) {
            v = {false, std::string("threw: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        if (c.budget_s > 0.0 && secs >= c.budget_s) {
            v.pass = false;
            v.detail += "; over the " + fmt(c.budget_s, 0) + " s budget";
        }
        if (!v.pass) ++failed;
        std::printf("%s %2d %-38s %7.2f s  %s\n", v.pass ? "PASS" : "FAIL", n, c.name, secs, v.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%d criteria passed\n", n - failed, n);
    return failed == 0 ? 0 : 1;
}
