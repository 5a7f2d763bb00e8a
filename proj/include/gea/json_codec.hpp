#pragma once

// nlohmann::json conversions for every persisted type. Objects are emitted
// with sorted keys and sets as sorted arrays, so encoding is byte-stable.
// Decoding is strict: unknown or missing keys raise ConfigError naming the
// key path.

#include <set>
#include <string>

#include "json.hpp"

#include "gea/core.hpp"
#include "gea/engine.hpp"
#include "gea/operators.hpp"
#include "gea/simenv.hpp"
#include "gea/traces.hpp"

namespace gea {

using Json = nlohmann::json;

/// Strict view over a JSON object: every key must be consumed before
/// `finish()`, which rejects leftovers.
class ObjectReader {
public:
    ObjectReader(const Json& object, std::string path);

    bool has(const std::string& key) const { return object_.contains(key); }
    const Json& required(const std::string& key);
    const Json* optional(const std::string& key);

    template <typename T>
    T get(const std::string& key) {
        return convert<T>(required(key), key);
    }

    template <typename T>
    T get_or(const std::string& key, T fallback) {
        const Json* value = optional(key);
        return value ? convert<T>(*value, key) : fallback;
    }

    std::string child_path(const std::string& key) const { return path_ + "." + key; }

    /// ConfigError for the first key that was never read.
    void finish() const;

private:
    template <typename T>
    T convert(const Json& value, const std::string& key) const {
        try {
            return value.get<T>();
        } catch (const nlohmann::json::exception& e) {
            throw_type_error(key, e.what());
        }
    }

    [[noreturn]] void throw_type_error(const std::string& key, const std::string& what) const;

    const Json& object_;
    std::string path_;
    std::set<std::string> seen_;
};

Json provenance_to_json(const Provenance& p, const char* sentinel);
Provenance provenance_from_json(const Json& j, const char* sentinel, const std::string& path);

Json to_json_value(const AgentRecord& record);
AgentRecord agent_from_json(const Json& j, const std::string& path = "agent");

Json to_json_value(const Patch& patch);
Patch patch_from_json(const Json& j, const std::string& path = "patch");

Json to_json_value(const TaskSpec& task);
TaskSpec task_from_json(const Json& j, const std::string& path = "task");

/// World header fields (everything but the tasks).
Json world_header(const SimWorld& world);
Json world_to_json(const SimWorld& world);
SimWorld world_from_json(const Json& j, const std::string& path = "world");

Json to_json_value(const OperatorProfile& profile);
OperatorProfile profile_from_json(const Json& j, const std::string& path = "profile");

Json to_json_value(const PhaseSchedule& schedule);
PhaseSchedule schedule_from_json(const Json& j, const std::string& path = "schedule");

Json to_json_value(const SelectionConfig& cfg);
SelectionConfig selection_from_json(const Json& j, const std::string& path = "selection");

Json to_json_value(const WorldSpec& spec);
WorldSpec world_spec_from_json(const Json& j, const std::string& path = "world");

Json to_json_value(const RunConfig& cfg);
/// Missing keys fall back to `defaults`.
RunConfig run_config_from_json(const Json& j, const RunConfig& defaults = {},
                               const std::string& path = "config");

Json to_json_value(const EvolutionTrace& trace);
EvolutionTrace trace_from_json(const Json& j, const std::string& path = "trace");

Json to_json_value(const Directive& directive);
Directive directive_from_json(const Json& j, const std::string& path = "directive");

Json to_json_value(const SharedExperience& experience);

Json to_json_value(const IterationRecord& record);
IterationRecord iteration_from_json(const Json& j, const std::string& path = "iteration");

Json to_json_value(const InjectionRecord& record);
InjectionRecord injection_from_json(const Json& j, const std::string& path = "injection");

}  // namespace gea
