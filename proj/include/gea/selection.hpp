#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "gea/core.hpp"

namespace gea {

struct SelectionConfig {
    std::size_t K = 2;        ///< parent group size
    std::size_t M = 4;        ///< KNN neighbourhood size
    double epsilon = 1e-8;    ///< denominator stabiliser

    /// InvalidArgument unless K >= 1, M >= 1, epsilon > 0.
    void validate() const;

    friend bool operator==(const SelectionConfig&, const SelectionConfig&) = default;
};

struct ParentGroup {
    std::vector<AgentId> members;   ///< descending score, ties by ascending id
    std::vector<double> scores;
    std::vector<double> novelties;

    std::size_t size() const noexcept { return members.size(); }
};

/// d(i,j) = 1 - z_i.z_j / (|z_i| |z_j| + eps).
/// The norm product is computed as sqrt(|z_i|^2 |z_j|^2) over exact integer
/// counts, so the result is bitwise symmetric and never negative.
double cosine_distance(const TaskSuccessVector& a, const TaskSuccessVector& b, double epsilon);

/// Mean distance of `vectors[index]` to its min(M, n-1) nearest neighbours
/// (ties by ascending position). 1.0 when there is no neighbour.
/// The chosen distances are summed in ascending position order.
double knn_novelty(std::span<const TaskSuccessVector> vectors, std::size_t index, std::size_t M,
                   double epsilon);

/// Novelty of a gate-passed archive member against the selectable set.
double knn_novelty(const Archive& archive, AgentId id, std::size_t M, double epsilon);

/// performance * sqrt(novelty). Both arguments must lie in [0, 1].
double pn_score(double performance, double novelty);

struct Candidate {
    AgentId id;
    TaskSuccessVector z;
    double performance = 0.0;
};

/// Top-min(K, n) candidates by Performance-Novelty score.
ParentGroup select_from_candidates(std::span<const Candidate> candidates,
                                   const SelectionConfig& cfg);

/// Performance-Novelty selection over the gate-passed agents of the archive.
ParentGroup select_parent_group(const Archive& archive, const SelectionConfig& cfg);

/// Single-parent baseline: the PN criterion with K forced to 1.
AgentId select_single_parent(const Archive& archive, const SelectionConfig& cfg);

}  // namespace gea
