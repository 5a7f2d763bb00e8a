#pragma once

// Multi-seed orchestration behind the command line: configuration files,
// presets, matched GEA/tree pairs and the bug-injection experiment.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gea/analysis.hpp"
#include "gea/engine.hpp"
#include "gea/evaluation.hpp"
#include "gea/json_codec.hpp"
#include "gea/remote_operator.hpp"

namespace gea {

struct RobustnessOptions {
    std::size_t trials = 20;
    std::uint64_t max_iterations = 30;
    OperatorProfile profile = robustness_profile();
};

struct AnalysisOptions {
    std::vector<std::size_t> ranks{1, 3, 5};
    std::size_t trajectory_top_n = 3;
};

struct ExperimentConfig {
    RunConfig run;
    std::vector<std::uint64_t> seeds;
    std::filesystem::path out = "out";
    StageStyle stage_style = StageStyle::funnel;
    double promote_threshold = 0.40;
    std::size_t top_n_to_full = 2;
    AnalysisOptions analysis;
    RobustnessOptions robustness;
    /// Scripted when absent.
    std::optional<RemoteOperatorConfig> remote;

    void validate() const;
    StagePlan stage_plan(const SimWorld& world) const;
};

/// D = 60, 9 tools, K = 2, M = 4, 30 GEA iterations, seeds 1..20.
ExperimentConfig paper_desk_preset();

/// Known presets by name; ConfigError("preset") for anything else.
ExperimentConfig preset(const std::string& name);

/// Strict decode. A "preset" key picks the base; every other key overrides
/// it. ConfigError names the offending key.
ExperimentConfig experiment_config_from_json(const Json& j);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

/// Runs `cfg` with the configured operator.
RunTranscript run_with(const ExperimentConfig& experiment, const RunConfig& cfg);

struct SeedPair {
    std::uint64_t seed = 0;
    RunTranscript gea;
    RunTranscript tree;
};

/// Runs a GEA run and its matched tree baseline for every seed, up to
/// `jobs` pairs at once. Results are in seed order. `on_pair` is called
/// (from the worker thread, serialized) as each pair completes; if it or a
/// run throws, no further pairs start and the first error is rethrown.
std::vector<SeedPair> run_pairs(const ExperimentConfig& experiment, std::size_t jobs,
                                const std::function<void(const SeedPair&)>& on_pair = {});

struct RobustnessTrial {
    AgentId source;
    AgentId partner;
    std::string bug;
    std::uint64_t seed = 0;
    std::optional<std::uint64_t> gea;
    std::optional<std::uint64_t> tree;
    RunTranscript gea_transcript;
    RunTranscript tree_transcript;
};

struct RobustnessSummary {
    std::vector<RobustnessTrial> trials;
    std::uint64_t max_iterations = 0;

    /// Unrepaired trials count as max_iterations + 1.
    double mean(EvolutionMode mode) const;
    std::size_t unrepaired(EvolutionMode mode) const;
    /// Rows gea and tree; columns method,E1..EN,Avg (NONE for unrepaired).
    std::string to_csv() const;
    std::string to_json() const;
};

/// Each trial draws, from its own stream, a recorded parent group whose two
/// members are both bug-free and a catalog bug that lowers the first
/// member's performance; the first member is broken and evolved paired with
/// the second (GEA) and alone (tree). InvalidArgument for zero trials or a
/// source run without such a group.
RobustnessSummary run_robustness_experiment(const RunTranscript& source_run,
                                            const RobustnessOptions& options, std::uint64_t seed);

}  // namespace gea
