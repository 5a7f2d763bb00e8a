#include <sstream>

#include "gea/engine.hpp"
#include "gea/errors.hpp"
#include "gea/json_codec.hpp"

namespace gea {

namespace {

std::string render(const Json& doc, const std::string& pointer) {
    const Json::json_pointer ptr(pointer);
    return doc.contains(ptr) ? doc.at(ptr).dump() : "<absent>";
}

/// One divergence per differing path; json::diff reports the leaf paths.
void diff_into(std::uint64_t iteration, const Json& expected, const Json& actual,
               std::vector<Divergence>& out) {
    if (expected == actual) return;
    for (const auto& op : Json::diff(expected, actual)) {
        const std::string path = op.at("path").get<std::string>();
        out.push_back({iteration, path, render(expected, path), render(actual, path)});
    }
}

Json header_of(const RunTranscript& t) {
    Json initial = Json::array();
    for (const auto& r : t.initial) initial.push_back(to_json_value(r));
    return Json{{"config", to_json_value(t.config)},
                {"world", world_to_json(t.world)},
                {"initial", initial},
                {"injection", t.injection ? to_json_value(*t.injection) : Json(nullptr)}};
}

}  // namespace

ReplayReport verify_replay(const RunTranscript& transcript) {
    ReplayReport report;
    const RunTranscript fresh = reexecute(transcript);
    diff_into(0, header_of(transcript), header_of(fresh), report.divergences);

    const std::size_t n = std::max(transcript.iterations.size(), fresh.iterations.size());
    for (std::size_t i = 0; i < n; ++i) {
        const Json recorded =
            i < transcript.iterations.size() ? to_json_value(transcript.iterations[i]) : Json(nullptr);
        const Json rerun = i < fresh.iterations.size() ? to_json_value(fresh.iterations[i]) : Json(nullptr);
        diff_into(i + 1, recorded, rerun, report.divergences);
    }
    return report;
}

ReplayReport replay(const RunTranscript& transcript) {
    ReplayReport report = verify_replay(transcript);
    if (!report.ok()) {
        const Divergence& d = report.divergences.front();
        std::ostringstream msg;
        msg << "replay diverged at iteration " << d.iteration << ", field " << d.field
            << ": recorded " << d.expected << ", replayed " << d.actual;
        throw ReplayError(msg.str());
    }
    return report;
}

}  // namespace gea
