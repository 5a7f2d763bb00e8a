#pragma once

// HTTP implementation of the Reflect/Evolve pair. Each call POSTs a JSON
// request to {base_url}/reflect or {base_url}/evolve:
//
//   reflect: {schema, agent, shared_experience, profile} -> {directive}
//   evolve:  {schema, agent, directive, shared_experience, profile} -> {patches}
//
// `agent` is the record without its success vector. Response patches carry
// {kind, payload, source_agent} and an optional regression. Every failure
// surfaces as RemoteOperatorError; nothing falls back to the scripted rule.

#include <chrono>
#include <memory>
#include <optional>
#include <semaphore>
#include <string>

#include "gea/errors.hpp"
#include "gea/operators.hpp"

namespace gea {

inline constexpr const char* kOperatorSchema = "gea-operator/1";

class RemoteOperatorError : public Error {
public:
    enum class Cause { timeout, http_status, schema, transport };

    RemoteOperatorError(Cause cause, const std::string& what, int status = 0)
        : Error(what), cause_(cause), status_(status) {}

    Cause cause() const noexcept { return cause_; }
    /// HTTP status for Cause::http_status, 0 otherwise.
    int status() const noexcept { return status_; }

private:
    Cause cause_;
    int status_;
};

std::string_view to_string(RemoteOperatorError::Cause cause);

struct RemoteOperatorConfig {
    /// e.g. "http://127.0.0.1:8080" or "http://host:8080/api"
    std::string base_url;
    std::chrono::milliseconds timeout{30000};
    std::size_t max_in_flight = 4;
    /// Bearer token; read from GEA_OPERATOR_TOKEN when absent.
    std::optional<std::string> token;
};

class RemoteOperator final : public EvolutionOperator {
public:
    explicit RemoteOperator(RemoteOperatorConfig config);

    Directive reflect(const AgentRecord& agent, const SharedExperience& experience,
                      const OperatorProfile& profile, Rng& rng) override;

    std::vector<Patch> evolve(const AgentRecord& agent, const Directive& directive,
                              const SharedExperience& experience, const OperatorProfile& profile,
                              const SimWorld& world, Rng& rng) override;

    /// Server answers are not a function of the run seed.
    bool replayable() const override { return false; }

private:
    struct Endpoint {
        std::string origin;  ///< scheme://host:port
        std::string prefix;  ///< path prefix without trailing '/'
    };

    std::string post(const std::string& route, const std::string& body);

    RemoteOperatorConfig config_;
    Endpoint endpoint_;
    std::unique_ptr<std::counting_semaphore<1024>> in_flight_;
};

}  // namespace gea
