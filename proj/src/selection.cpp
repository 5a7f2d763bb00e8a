#include "gea/selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gea/errors.hpp"

namespace gea {

void SelectionConfig::validate() const {
    if (K < 1) throw InvalidArgument("selection: K must be >= 1");
    if (M < 1) throw InvalidArgument("selection: M must be >= 1");
    if (!(epsilon > 0.0)) throw InvalidArgument("selection: epsilon must be > 0");
}

double cosine_distance(const TaskSuccessVector& a, const TaskSuccessVector& b, double epsilon) {
    if (!(epsilon > 0.0)) throw InvalidArgument("cosine_distance: epsilon must be > 0");
    const auto dot = static_cast<double>(a.dot(b));
    const auto norms = std::sqrt(static_cast<double>(a.count()) * static_cast<double>(b.count()));
    return 1.0 - dot / (norms + epsilon);
}

double knn_novelty(std::span<const TaskSuccessVector> vectors, std::size_t index, std::size_t M,
                   double epsilon) {
    if (index >= vectors.size()) throw NotFoundError("knn_novelty: index out of range");
    if (M < 1) throw InvalidArgument("knn_novelty: M must be >= 1");
    if (vectors.size() == 1) return 1.0;

    struct Neighbour {
        double distance;
        std::size_t position;
    };
    std::vector<Neighbour> neighbours;
    neighbours.reserve(vectors.size() - 1);
    for (std::size_t j = 0; j < vectors.size(); ++j) {
        if (j == index) continue;
        neighbours.push_back({cosine_distance(vectors[index], vectors[j], epsilon), j});
    }
    const std::size_t take = std::min(M, neighbours.size());
    std::partial_sort(neighbours.begin(), neighbours.begin() + static_cast<std::ptrdiff_t>(take),
                      neighbours.end(), [](const Neighbour& x, const Neighbour& y) {
                          if (x.distance != y.distance) return x.distance < y.distance;
                          return x.position < y.position;
                      });
    neighbours.resize(take);
    std::sort(neighbours.begin(), neighbours.end(),
              [](const Neighbour& x, const Neighbour& y) { return x.position < y.position; });
    double sum = 0.0;
    for (const auto& n : neighbours) sum += n.distance;
    return sum / static_cast<double>(take);
}

namespace {

std::vector<Candidate> selectable_candidates(const Archive& archive) {
    std::vector<Candidate> out;
    for (const auto& r : archive.records()) {
        if (r.selectable()) out.push_back({r.id, r.z, r.performance});
    }
    return out;
}

}  // namespace

double knn_novelty(const Archive& archive, AgentId id, std::size_t M, double epsilon) {
    const AgentRecord& target = archive.at(id);
    if (!target.selectable()) {
        throw InvalidArgument("knn_novelty: agent " + std::to_string(id.value) +
                              " did not pass the archive gate");
    }
    std::vector<TaskSuccessVector> vectors;
    std::size_t index = 0;
    for (const auto& r : archive.records()) {
        if (!r.selectable()) continue;
        if (r.id == id) index = vectors.size();
        vectors.push_back(r.z);
    }
    return knn_novelty(vectors, index, M, epsilon);
}

double pn_score(double performance, double novelty) {
    if (!(performance >= 0.0 && performance <= 1.0)) {
        throw InvalidArgument("pn_score: performance must lie in [0, 1]");
    }
    if (!(novelty >= 0.0 && novelty <= 1.0)) {
        throw InvalidArgument("pn_score: novelty must lie in [0, 1]");
    }
    return performance * std::sqrt(novelty);
}

ParentGroup select_from_candidates(std::span<const Candidate> candidates,
                                   const SelectionConfig& cfg) {
    cfg.validate();
    if (candidates.empty()) throw EmptyArchiveError("no selectable agents");

    std::vector<TaskSuccessVector> vectors;
    vectors.reserve(candidates.size());
    for (const auto& c : candidates) vectors.push_back(c.z);

    struct Ranked {
        std::size_t position;
        double novelty;
        double score;
    };
    std::vector<Ranked> ranked;
    ranked.reserve(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const double nov = knn_novelty(vectors, i, cfg.M, cfg.epsilon);
        ranked.push_back({i, nov, pn_score(candidates[i].performance, nov)});
    }
    std::sort(ranked.begin(), ranked.end(), [&](const Ranked& a, const Ranked& b) {
        if (a.score != b.score) return a.score > b.score;
        return candidates[a.position].id < candidates[b.position].id;
    });

    ParentGroup group;
    const std::size_t take = std::min(cfg.K, ranked.size());
    for (std::size_t i = 0; i < take; ++i) {
        group.members.push_back(candidates[ranked[i].position].id);
        group.scores.push_back(ranked[i].score);
        group.novelties.push_back(ranked[i].novelty);
    }
    return group;
}

ParentGroup select_parent_group(const Archive& archive, const SelectionConfig& cfg) {
    const auto candidates = selectable_candidates(archive);
    return select_from_candidates(candidates, cfg);
}

AgentId select_single_parent(const Archive& archive, const SelectionConfig& cfg) {
    SelectionConfig single = cfg;
    single.K = 1;
    return select_parent_group(archive, single).members.front();
}

}  // namespace gea
