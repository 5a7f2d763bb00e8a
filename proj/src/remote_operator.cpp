#include "gea/remote_operator.hpp"

#include <cstdlib>

#include "httplib.h"

#include "gea/json_codec.hpp"

namespace gea {

namespace {

using Cause = RemoteOperatorError::Cause;

[[noreturn]] void schema_error(const std::string& what) {
    throw RemoteOperatorError(Cause::schema, "remote operator: " + what);
}

Json parse_body(const std::string& body) {
    try {
        Json j = Json::parse(body);
        if (!j.is_object()) schema_error("response is not a JSON object");
        return j;
    } catch (const nlohmann::json::parse_error& e) {
        schema_error(std::string("response is not JSON: ") + e.what());
    }
}

Json agent_without_z(const AgentRecord& agent) {
    Json j = to_json_value(agent);
    j.erase("z");
    return j;
}

Patch patch_from_response(const Json& j, const std::string& path) {
    ObjectReader r(j, path);
    Patch p;
    p.kind = patch_kind_from_string(r.get<std::string>("kind"));
    p.payload = r.get_or<std::string>("payload", "");
    const Json* source = r.optional("source_agent");
    if (source) p.source_agent = provenance_from_json(*source, "self", r.child_path("source_agent"));
    p.regression = r.get_or<std::string>("regression", "");
    r.finish();
    return p;
}

/// Runs a decoder, reporting any decoding failure as a schema violation.
template <typename Fn>
auto decoded(Fn&& fn) {
    try {
        return fn();
    } catch (const RemoteOperatorError&) {
        throw;
    } catch (const std::exception& e) {
        schema_error(e.what());
    }
}

}  // namespace

std::string_view to_string(RemoteOperatorError::Cause cause) {
    switch (cause) {
        case Cause::timeout: return "timeout";
        case Cause::http_status: return "http-status";
        case Cause::schema: return "schema";
        case Cause::transport: return "transport";
    }
    return "unknown";
}

RemoteOperator::RemoteOperator(RemoteOperatorConfig config) : config_(std::move(config)) {
    const auto scheme = config_.base_url.find("://");
    if (scheme == std::string::npos) {
        throw InvalidArgument("remote operator: base_url needs a scheme: '" + config_.base_url + "'");
    }
    const auto slash = config_.base_url.find('/', scheme + 3);
    endpoint_.origin = config_.base_url.substr(0, slash);
    if (slash != std::string::npos) endpoint_.prefix = config_.base_url.substr(slash);
    while (!endpoint_.prefix.empty() && endpoint_.prefix.back() == '/') endpoint_.prefix.pop_back();

    if (config_.max_in_flight < 1 || config_.max_in_flight > 1024) {
        throw InvalidArgument("remote operator: max_in_flight must be in 1..1024");
    }
    if (config_.timeout.count() <= 0) throw InvalidArgument("remote operator: timeout must be positive");
    if (!config_.token) {
        if (const char* env = std::getenv("GEA_OPERATOR_TOKEN")) config_.token = env;
    }
    in_flight_ = std::make_unique<std::counting_semaphore<1024>>(
        static_cast<std::ptrdiff_t>(config_.max_in_flight));
}

std::string RemoteOperator::post(const std::string& route, const std::string& body) {
    in_flight_->acquire();
    struct Release {
        std::counting_semaphore<1024>& s;
        ~Release() { s.release(); }
    } release{*in_flight_};

    httplib::Client client(endpoint_.origin);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(config_.timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());
    if (config_.token) client.set_bearer_token_auth(*config_.token);

    const auto started = std::chrono::steady_clock::now();
    auto result = client.Post(endpoint_.prefix + route, body, "application/json");
    if (!result) {
        const auto elapsed = std::chrono::steady_clock::now() - started;
        const auto err = result.error();
        if (err == httplib::Error::ConnectionTimeout ||
            (err == httplib::Error::Read && elapsed >= config_.timeout)) {
            throw RemoteOperatorError(Cause::timeout, "remote operator: " + route + " timed out after " +
                                                          std::to_string(config_.timeout.count()) + " ms");
        }
        throw RemoteOperatorError(Cause::transport,
                                  "remote operator: " + route + ": " + httplib::to_string(err));
    }
    if (result->status < 200 || result->status >= 300) {
        throw RemoteOperatorError(Cause::http_status,
                                  "remote operator: " + route + " returned HTTP " +
                                      std::to_string(result->status),
                                  result->status);
    }
    return result->body;
}

Directive RemoteOperator::reflect(const AgentRecord& agent, const SharedExperience& experience,
                                  const OperatorProfile& profile, Rng&) {
    const Json request{{"schema", kOperatorSchema},
                       {"agent", agent_without_z(agent)},
                       {"shared_experience", to_json_value(experience)},
                       {"profile", to_json_value(profile)}};
    const Json response = parse_body(post("/reflect", request.dump()));
    if (!response.contains("directive")) schema_error("reflect response lacks 'directive'");
    Directive directive =
        decoded([&] { return directive_from_json(response.at("directive"), "directive"); });
    if (auto violation = directive_violation(directive, agent.id, experience)) {
        schema_error("directive violates the shared experience: " + *violation);
    }
    return directive;
}

std::vector<Patch> RemoteOperator::evolve(const AgentRecord& agent, const Directive& directive,
                                          const SharedExperience& experience,
                                          const OperatorProfile& profile, const SimWorld&, Rng&) {
    const Json request{{"schema", kOperatorSchema},
                       {"agent", agent_without_z(agent)},
                       {"directive", to_json_value(directive)},
                       {"shared_experience", to_json_value(experience)},
                       {"profile", to_json_value(profile)}};
    const Json response = parse_body(post("/evolve", request.dump()));
    const auto found = response.find("patches");
    if (found == response.end() || !found->is_array()) schema_error("evolve response lacks a 'patches' array");

    std::vector<Patch> patches;
    for (std::size_t i = 0; i < found->size(); ++i) {
        Patch p = decoded([&] { return patch_from_response((*found)[i], "patches[" + std::to_string(i) + "]"); });
        if (p.source_agent && !experience.contains(*p.source_agent)) {
            schema_error("patches[" + std::to_string(i) + "] source " +
                         std::to_string(p.source_agent->value) + " is not a contributor");
        }
        patches.push_back(std::move(p));
    }
    if (patches.empty()) patches.push_back(Patch{});
    return patches;
}

}  // namespace gea
