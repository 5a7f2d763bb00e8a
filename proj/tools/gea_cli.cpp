#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "gea/analysis.hpp"
#include "gea/errors.hpp"
#include "gea/experiment.hpp"
#include "gea/persistence.hpp"

using namespace gea;
namespace fs = std::filesystem;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;

struct Common {
    std::string config;
    std::string preset = "paper-desk";
};

ExperimentConfig load_config(const Common& common) {
    if (!common.config.empty()) return load_experiment_config(common.config);
    return preset(common.preset);
}

std::string run_name(EvolutionMode mode, std::uint64_t seed) {
    return std::string(to_string(mode)) + "_seed" + std::to_string(seed) + ".ndjson";
}

std::string curve_csv(const std::vector<double>& curve) {
    std::ostringstream out;
    out << "evolved_agents,best\n";
    out.setf(std::ios::fixed);
    out.precision(6);
    for (std::size_t i = 0; i < curve.size(); ++i) out << i + 1 << ',' << curve[i] << '\n';
    return out.str();
}

/// Writes a run's transcript and archive; returns the paths written.
std::vector<fs::path> write_run(const fs::path& out, const RunTranscript& t) {
    const std::string name = run_name(t.config.mode, t.config.seed);
    std::vector<fs::path> paths{out / "transcripts" / name, out / "archives" / name,
                                out / "curves" / (name.substr(0, name.size() - 7) + ".csv")};
    save_transcript(t, paths[0]);
    save_archive(t.final_archive(), paths[1]);
    write_file_atomic(paths[2], curve_csv(best_curve(t)));
    return paths;
}

void print_run(const RunTranscript& t) {
    const Archive archive = t.final_archive();
    const AgentId best = best_agent(archive);
    std::printf("%s seed %llu: %zu evolved agents, best agent %llu at %.4f\n",
                std::string(to_string(t.config.mode)).c_str(),
                static_cast<unsigned long long>(t.config.seed), t.evolved_agents(),
                static_cast<unsigned long long>(best.value), archive.at(best).performance);
}

int cmd_run(const Common& common, const std::string& mode, std::optional<std::uint64_t> seed,
            const std::string& out, bool match_budget) {
    ExperimentConfig cfg = load_config(common);
    RunConfig run_cfg = cfg.run;
    if (seed) run_cfg.seed = *seed;
    run_cfg.mode = EvolutionMode::gea;
    if (evolution_mode_from_string(mode) == EvolutionMode::tree) {
        if (match_budget) {
            // Match the agents the GEA run with this seed actually evolves;
            // with a remote operator that would mean a second paid run.
            const RunConfig tree = cfg.remote ? matched_baseline(run_cfg)
                                              : matched_baseline(run_cfg, run(run_cfg).evolved_agents());
            std::cerr << "warning: tree mode: iterations scaled from " << run_cfg.iterations << " to "
                      << tree.iterations << " (K = " << run_cfg.selection.K << ") to match the budget\n";
            run_cfg = tree;
        } else {
            run_cfg.mode = EvolutionMode::tree;
        }
    }
    const RunTranscript t = run_with(cfg, run_cfg);
    const fs::path dir = out.empty() ? cfg.out : fs::path(out);
    save_world(t.world, dir / "archives" / ("world_seed" + std::to_string(run_cfg.seed) + ".ndjson"));
    for (const auto& p : write_run(dir, t)) std::printf("wrote %s\n", p.string().c_str());
    print_run(t);
    return 0;
}

int cmd_compare(const Common& common, const std::vector<std::uint64_t>& seeds, const std::string& out,
                std::size_t jobs) {
    ExperimentConfig cfg = load_config(common);
    if (!seeds.empty()) cfg.seeds = seeds;
    cfg.validate();
    const fs::path dir = out.empty() ? cfg.out : fs::path(out);

    std::vector<fs::path> written;
    std::vector<SeedPair> pairs;
    try {
        pairs = run_pairs(cfg, jobs, [&](const SeedPair& pair) {
            for (const auto& p : write_run(dir, pair.gea)) written.push_back(p);
            for (const auto& p : write_run(dir, pair.tree)) written.push_back(p);
        });
    } catch (...) {
        std::error_code ec;
        for (const auto& p : written) fs::remove(p, ec);
        throw;
    }

    std::vector<RunTranscript> gea_runs, tree_runs;
    for (auto& pair : pairs) {
        gea_runs.push_back(std::move(pair.gea));
        tree_runs.push_back(std::move(pair.tree));
    }
    const ComparisonReport report = compare(gea_runs, tree_runs);
    write_file_atomic(dir / "reports" / "comparison.json", report.to_json());
    write_file_atomic(dir / "reports" / "per_seed.csv", report.per_seed_csv());
    write_file_atomic(dir / "curves" / "mean_curve.csv", report.curve_csv());

    std::printf("seeds: %zu, evolved agents per run: %zu\n", report.seeds.size(),
                gea_runs.front().evolved_agents());
    std::printf("final best  gea %.4f  tree %.4f\n", report.a.mean_final_best(), report.b.mean_final_best());
    std::printf("ancestors   gea %.2f  tree %.2f\n", report.a.mean_ancestors(), report.b.mean_ancestors());
    std::printf("tools       gea %.2f  tree %.2f\n", report.a.mean_integrated_tools(),
                report.b.mean_integrated_tools());
    std::printf("gea wins %zu, losses %zu, ties %zu; sign test p = %.3g%s\n", report.sign.wins,
                report.sign.losses, report.sign.ties, report.sign.p_value,
                report.sign.degenerate ? " (degenerate: no untied pairs)" : "");
    std::printf("gea top-5 worst case >= tree best in %zu/%zu seeds\n", report.elevation_count,
                report.seeds.size());
    return 0;
}

int cmd_robustness(const Common& common, std::optional<std::size_t> trials, const std::string& source,
                   const std::string& out) {
    ExperimentConfig cfg = load_config(common);
    if (trials) {
        if (*trials == 0) throw ConfigError("trials", "trials must be >= 1");
        cfg.robustness.trials = *trials;
    }
    const fs::path dir = out.empty() ? cfg.out : fs::path(out);
    RunTranscript source_run;
    if (!source.empty()) {
        source_run = load_transcript(source);
    } else {
        RunConfig gea_cfg = cfg.run;
        gea_cfg.mode = EvolutionMode::gea;
        source_run = run_with(cfg, gea_cfg);
        save_transcript(source_run, dir / "transcripts" / "robustness_source.ndjson");
    }
    const RobustnessSummary summary =
        run_robustness_experiment(source_run, cfg.robustness, source_run.config.seed);
    for (std::size_t i = 0; i < summary.trials.size(); ++i) {
        const std::string stem = "robustness_E" + std::to_string(i + 1);
        save_transcript(summary.trials[i].gea_transcript, dir / "transcripts" / (stem + "_gea.ndjson"));
        save_transcript(summary.trials[i].tree_transcript, dir / "transcripts" / (stem + "_tree.ndjson"));
    }
    write_file_atomic(dir / "reports" / "robustness.csv", summary.to_csv());
    write_file_atomic(dir / "reports" / "robustness.json", summary.to_json());
    std::fputs(summary.to_csv().c_str(), stdout);
    return 0;
}

int cmd_analyze(const Common& common, const std::string& transcript_path, const std::string& out) {
    const ExperimentConfig cfg = load_config(common);
    const RunTranscript t = load_transcript(transcript_path);
    const fs::path dir = out.empty() ? cfg.out : fs::path(out);
    const std::string stem = fs::path(transcript_path).stem().string();

    const AncestorTable ancestors = ancestor_table(t, cfg.analysis.ranks);
    for (const auto& note : ancestors.notes) std::cerr << "note: " << note << '\n';
    write_file_atomic(dir / "reports" / (stem + "_ancestors.csv"), ancestors.to_csv());
    write_file_atomic(dir / "reports" / (stem + "_tool_timeline.csv"), timeline_csv(tool_timeline(t)));
    write_file_atomic(dir / "reports" / (stem + "_trajectories.csv"),
                      trajectories_csv(patch_trajectories(t, cfg.analysis.trajectory_top_n)));
    write_file_atomic(dir / "curves" / (stem + ".csv"), curve_csv(best_curve(t)));

    const Archive archive = t.final_archive();
    const StagePlan plan = cfg.stage_plan(t.world);
    for (const auto& w : plan.validate(t.world)) std::cerr << "warning: " << w << '\n';
    const StageReport stages = plan.style == StageStyle::funnel ? run_funnel(archive, plan, t.world)
                                                                : run_promotion(archive, plan, t.world);
    write_file_atomic(dir / "reports" / (stem + "_stages.csv"), stages.to_csv());
    write_file_atomic(dir / "reports" / (stem + "_stages.json"), stages.to_json());

    if (t.injection) {
        const auto repaired = repair_iterations(t);
        std::printf("repair iterations: %s\n", repaired ? std::to_string(*repaired).c_str() : "NONE");
    }
    std::fputs(ancestors.to_csv().c_str(), stdout);
    std::printf("integrated tools of best agent: %zu\n", integrated_tool_count(t));
    return 0;
}

int cmd_replay(const std::string& transcript_path) {
    const RunTranscript t = load_transcript(transcript_path);
    const ReplayReport report = verify_replay(t);
    if (report.ok()) {
        std::printf("replay ok: %zu iterations match\n", t.iterations.size());
        return 0;
    }
    for (const auto& d : report.divergences) {
        std::fprintf(stderr, "divergence at iteration %llu, field %s: recorded %s, replayed %s\n",
                     static_cast<unsigned long long>(d.iteration), d.field.c_str(), d.expected.c_str(),
                     d.actual.c_str());
    }
    return kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Group-evolving agents: simulated experiments"};
    app.require_subcommand(1);

    Common common;
    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", common.config, "JSON configuration file");
        sub->add_option("--preset", common.preset, "Preset used when no --config is given")
            ->capture_default_str();
    };

    std::string mode = "gea", out, transcript, source;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> trials;
    std::vector<std::uint64_t> seeds;
    std::size_t jobs = 1;
    bool no_match = false;

    auto* run = app.add_subcommand("run", "Run one evolution");
    add_common(run);
    run->add_option("--mode", mode, "gea or tree")->check(CLI::IsMember({"gea", "tree"}));
    run->add_option("--seed", seed, "Run seed");
    run->add_option("--out", out, "Output directory");
    run->add_flag("--no-match-budget", no_match, "Keep the configured iterations in tree mode");

    auto* cmp = app.add_subcommand("compare", "Matched GEA/tree pairs over several seeds");
    add_common(cmp);
    cmp->add_option("--seeds", seeds, "Comma-separated seeds")->delimiter(',');
    cmp->add_option("--out", out, "Output directory");
    cmp->add_option("--jobs", jobs, "Seed pairs run concurrently")->check(CLI::PositiveNumber);

    auto* rob = app.add_subcommand("robustness", "Bug-injection repair trials");
    add_common(rob);
    rob->add_option("--trials", trials, "Trials per method");
    rob->add_option("--source", source, "GEA transcript to sample agents from");
    rob->add_option("--out", out, "Output directory");

    auto* ana = app.add_subcommand("analyze", "Tables for one transcript");
    add_common(ana);
    ana->add_option("--transcript", transcript, "Transcript file")->required();
    ana->add_option("--out", out, "Output directory");

    auto* rep = app.add_subcommand("replay", "Re-execute a transcript and diff it");
    rep->add_option("--transcript", transcript, "Transcript file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (*run) return cmd_run(common, mode, seed, out, !no_match);
        if (*cmp) return cmd_compare(common, seeds, out, jobs);
        if (*rob) return cmd_robustness(common, trials, source, out);
        if (*ana) return cmd_analyze(common, transcript, out);
        if (*rep) return cmd_replay(transcript);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: key '%s': %s\n", e.key().c_str(), e.what());
        return kExitConfig;
    } catch (const ReplayError& e) {
        std::fprintf(stderr, "replay failed: %s\n", e.what());
        return kExitFailure;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitFailure;
    }
    return kExitFailure;
}
