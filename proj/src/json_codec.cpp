#include "gea/json_codec.hpp"

#include "gea/errors.hpp"

namespace gea {

ObjectReader::ObjectReader(const Json& object, std::string path)
    : object_(object), path_(std::move(path)) {
    if (!object_.is_object()) throw ConfigError(path_, path_ + ": expected an object");
}

const Json& ObjectReader::required(const std::string& key) {
    auto it = object_.find(key);
    if (it == object_.end()) {
        throw ConfigError(child_path(key), "missing key '" + child_path(key) + "'");
    }
    seen_.insert(key);
    return *it;
}

const Json* ObjectReader::optional(const std::string& key) {
    auto it = object_.find(key);
    if (it == object_.end()) return nullptr;
    seen_.insert(key);
    return &*it;
}

void ObjectReader::finish() const {
    for (const auto& [key, value] : object_.items()) {
        if (seen_.count(key) == 0) {
            throw ConfigError(child_path(key), "unknown key '" + child_path(key) + "'");
        }
    }
}

void ObjectReader::throw_type_error(const std::string& key, const std::string& what) const {
    throw ConfigError(child_path(key), "invalid value for '" + child_path(key) + "': " + what);
}

Json provenance_to_json(const Provenance& p, const char* sentinel) {
    if (!p) return sentinel ? Json(sentinel) : Json(nullptr);
    return Json(p->value);
}

Provenance provenance_from_json(const Json& j, const char* sentinel, const std::string& path) {
    if (sentinel ? (j.is_string() && j.get<std::string>() == sentinel) : j.is_null()) {
        return std::nullopt;
    }
    if (!j.is_number_unsigned()) {
        throw ConfigError(path, "invalid agent reference at '" + path + "'");
    }
    return AgentId{j.get<std::uint64_t>()};
}

namespace {

constexpr const char* kSelf = "self";

template <typename T, typename Fn>
Json array_of(const std::vector<T>& items, Fn&& fn) {
    Json out = Json::array();
    for (const auto& item : items) out.push_back(fn(item));
    return out;
}

template <typename T, typename Fn>
std::vector<T> vector_from(const Json& j, const std::string& path, Fn&& fn) {
    if (!j.is_array()) throw ConfigError(path, "expected an array at '" + path + "'");
    std::vector<T> out;
    out.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        out.push_back(fn(j[i], path + "[" + std::to_string(i) + "]"));
    }
    return out;
}

std::set<std::string> string_set(const Json& j, const std::string& path) {
    auto items = vector_from<std::string>(j, path, [](const Json& v, const std::string& p) {
        if (!v.is_string()) throw ConfigError(p, "expected a string at '" + p + "'");
        return v.get<std::string>();
    });
    return {items.begin(), items.end()};
}

Json string_array(const std::set<std::string>& items) {
    Json out = Json::array();
    for (const auto& s : items) out.push_back(s);
    return out;
}

std::vector<AgentId> id_list(const Json& j, const std::string& path) {
    return vector_from<AgentId>(j, path, [](const Json& v, const std::string& p) {
        if (!v.is_number_unsigned()) throw ConfigError(p, "expected an agent id at '" + p + "'");
        return AgentId{v.get<std::uint64_t>()};
    });
}

Json id_array(const std::vector<AgentId>& ids) {
    Json out = Json::array();
    for (auto id : ids) out.push_back(id.value);
    return out;
}

template <typename T>
T wrap(const std::string& path, T (*fn)(std::string_view), const Json& j) {
    if (!j.is_string()) throw ConfigError(path, "expected a string at '" + path + "'");
    try {
        return fn(j.get<std::string>());
    } catch (const InvalidArgument& e) {
        throw ConfigError(path, path + ": " + e.what());
    }
}

}  // namespace

Json to_json_value(const Patch& patch) {
    Json j;
    j["id"] = patch.id;
    j["kind"] = std::string(to_string(patch.kind));
    j["payload"] = patch.payload;
    j["delta_score"] = patch.delta_score ? Json(*patch.delta_score) : Json(nullptr);
    j["source_agent"] = provenance_to_json(patch.source_agent, kSelf);
    j["ineffective"] = patch.ineffective;
    j["regression"] = patch.regression;
    return j;
}

Patch patch_from_json(const Json& j, const std::string& path) {
    ObjectReader r(j, path);
    Patch p;
    p.id = r.get<std::uint64_t>("id");
    p.kind = wrap<PatchKind>(r.child_path("kind"), &patch_kind_from_string, r.required("kind"));
    p.payload = r.get<std::string>("payload");
    const Json& delta = r.required("delta_score");
    if (!delta.is_null()) {
        if (!delta.is_number()) throw ConfigError(r.child_path("delta_score"), "delta_score must be a number");
        p.delta_score = delta.get<double>();
    }
    p.source_agent = provenance_from_json(r.required("source_agent"), kSelf, r.child_path("source_agent"));
    p.ineffective = r.get<bool>("ineffective");
    p.regression = r.get<std::string>("regression");
    r.finish();
    return p;
}

Json to_json_value(const AgentRecord& record) {
    Json j;
    j["id"] = record.id.value;
    j["framework_parent"] = provenance_to_json(record.framework_parent, nullptr);
    std::vector<ToolTag> tools = record.tools;
    std::sort(tools.begin(), tools.end());
    j["tools"] = array_of(tools, [](const ToolTag& t) {
        return Json{{"name", t.name}, {"origin", provenance_to_json(t.origin, kSelf)}};
    });
    j["broken_bugs"] = string_array(record.broken_bugs);
    j["z"] = record.z.to_string();
    j["performance"] = record.performance;
    j["patches"] = array_of(record.patches, [](const Patch& p) { return to_json_value(p); });
    j["born_iteration"] = record.born_iteration;
    j["gate_status"] = std::string(to_string(record.gate_status));
    return j;
}

AgentRecord agent_from_json(const Json& j, const std::string& path) {
    ObjectReader r(j, path);
    AgentRecord a;
    a.id = AgentId{r.get<std::uint64_t>("id")};
    a.framework_parent =
        provenance_from_json(r.required("framework_parent"), nullptr, r.child_path("framework_parent"));
    a.tools = vector_from<ToolTag>(r.required("tools"), r.child_path("tools"),
                                   [](const Json& v, const std::string& p) {
                                       ObjectReader t(v, p);
                                       ToolTag tag{t.get<std::string>("name"),
                                                   provenance_from_json(t.required("origin"), kSelf,
                                                                        t.child_path("origin"))};
                                       t.finish();
                                       return tag;
                                   });
    std::sort(a.tools.begin(), a.tools.end());
    a.broken_bugs = string_set(r.required("broken_bugs"), r.child_path("broken_bugs"));
    try {
        a.z = TaskSuccessVector::from_string(r.get<std::string>("z"));
    } catch (const InvalidArgument& e) {
        throw ConfigError(r.child_path("z"), e.what());
    }
    a.performance = r.get<double>("performance");
    a.patches = vector_from<Patch>(r.required("patches"), r.child_path("patches"),
                                   [](const Json& v, const std::string& p) { return patch_from_json(v, p); });
    a.born_iteration = r.get<std::uint64_t>("born_iteration");
    a.gate_status =
        wrap<GateStatus>(r.child_path("gate_status"), &gate_status_from_string, r.required("gate_status"));
    r.finish();
    return a;
}

Json to_json_value(const TaskSpec& task) {
    return Json{{"index", task.index},
                {"required_tools", string_array(task.required_tools)},
                {"bug_sensitive", string_array(task.bug_sensitive)}};
}

TaskSpec task_from_json(const Json& j, const std::string& path) {
    ObjectReader r(j, path);
    TaskSpec t;
    t.index = r.get<std::size_t>("index");
    t.required_tools = string_set(r.required("required_tools"), r.child_path("required_tools"));
    t.bug_sensitive = string_set(r.required("bug_sensitive"), r.child_path("bug_sensitive"));
    r.finish();
    return t;
}

Json world_header(const SimWorld& world) {
    return Json{{"D", world.size()},
                {"seed", world.seed},
                {"tool_universe", world.tool_universe},
                {"bug_catalog", world.bug_catalog}};
}

Json world_to_json(const SimWorld& world) {
    Json j = world_header(world);
    j["tasks"] = array_of(world.tasks, [](const TaskSpec& t) { return to_json_value(t); });
    return j;
}

SimWorld world_from_json(const Json& j, const std::string& path) {
    ObjectReader r(j, path);
    SimWorld w;
    const auto D = r.get<std::size_t>("D");
    w.seed = r.get<std::uint64_t>("seed");
    w.tool_universe = r.get<std::vector<std::string>>("tool_universe");
    w.bug_catalog = r.get<std::vector<std::string>>("bug_catalog");
    w.tasks = vector_from<TaskSpec>(r.required("tasks"), r.child_path("tasks"),
                                    [](const Json& v, const std::string& p) { return task_from_json(v, p); });
    r.finish();
    if (w.tasks.size() != D) throw ConfigError(path + ".tasks", "world task count does not match D");
    return w;
}

Json to_json_value(const OperatorProfile& p) {
    return Json{{"name", p.name},
                {"adopt_probability", p.adopt_probability},
                {"discover_probability", p.discover_probability},
                {"repair_probability_shared", p.repair_probability_shared},
                {"repair_probability_self", p.repair_probability_self},
                {"max_actions_per_step", p.max_actions_per_step},
                {"regression_probability", p.regression_probability}};
}

OperatorProfile profile_from_json(const Json& j, const std::string& path) {
    if (j.is_string()) {
        const auto name = j.get<std::string>();
        if (name == "early") return early_profile();
        if (name == "late") return late_profile();
        if (name == "null") return null_profile();
        if (name == "robustness") return robustness_profile();
        throw ConfigError(path, "unknown profile preset '" + name + "'");
    }
    ObjectReader r(j, path);
    OperatorProfile p;
    p.name = r.get<std::string>("name");
    p.adopt_probability = r.get<double>("adopt_probability");
    p.discover_probability = r.get<double>("discover_probability");
    p.repair_probability_shared = r.get<double>("repair_probability_shared");
    p.repair_probability_self = r.get<double>("repair_probability_self");
    p.max_actions_per_step = r.get<std::size_t>("max_actions_per_step");
    p.regression_probability = r.get_or<double>("regression_probability", 0.0);
    r.finish();
    try {
        p.validate();
    } catch (const InvalidArgument& e) {
        throw ConfigError(path, e.what());
    }
    return p;
}

Json to_json_value(const PhaseSchedule& schedule) {
    Json out = Json::array();
    for (const auto& phase : schedule.phases()) {
        out.push_back(Json{{"begin", phase.begin}, {"end", phase.end}, {"profile", to_json_value(phase.profile)}});
    }
    return out;
}

PhaseSchedule schedule_from_json(const Json& j, const std::string& path) {
    return PhaseSchedule(vector_from<Phase>(j, path, [](const Json& v, const std::string& p) {
        ObjectReader r(v, p);
        Phase phase;
        phase.begin = r.get<std::uint64_t>("begin");
        phase.end = r.get<std::uint64_t>("end");
        phase.profile = profile_from_json(r.required("profile"), r.child_path("profile"));
        r.finish();
        return phase;
    }));
}

Json to_json_value(const SelectionConfig& cfg) {
    return Json{{"K", cfg.K}, {"M", cfg.M}, {"epsilon", cfg.epsilon}};
}

SelectionConfig selection_from_json(const Json& j, const std::string& path) {
    ObjectReader r(j, path);
    SelectionConfig cfg;
    cfg.K = r.get_or<std::size_t>("K", cfg.K);
    cfg.M = r.get_or<std::size_t>("M", cfg.M);
    cfg.epsilon = r.get_or<double>("epsilon", cfg.epsilon);
    r.finish();
    if (cfg.K < 1) throw ConfigError(r.child_path("K"), "K must be >= 1");
    if (cfg.M < 1) throw ConfigError(r.child_path("M"), "M must be >= 1");
    if (!(cfg.epsilon > 0.0)) throw ConfigError(r.child_path("epsilon"), "epsilon must be > 0");
    return cfg;
}

Json to_json_value(const WorldSpec& spec) {
    Json j{{"D", spec.D}, {"n_tools", spec.n_tools}};
    j["seed"] = spec.seed ? Json(*spec.seed) : Json(nullptr);
    return j;
}

WorldSpec world_spec_from_json(const Json& j, const std::string& path) {
    ObjectReader r(j, path);
    WorldSpec spec;
    spec.D = r.get_or<std::size_t>("D", spec.D);
    spec.n_tools = r.get_or<std::size_t>("n_tools", spec.n_tools);
    if (const Json* seed = r.optional("seed"); seed && !seed->is_null()) {
        if (!seed->is_number_unsigned()) throw ConfigError(r.child_path("seed"), "world seed must be unsigned");
        spec.seed = seed->get<std::uint64_t>();
    }
    r.finish();
    if (spec.D < 1) throw ConfigError(r.child_path("D"), "D must be >= 1");
    if (spec.n_tools < 1) throw ConfigError(r.child_path("n_tools"), "n_tools must be >= 1");
    return spec;
}

Json to_json_value(const RunConfig& cfg) {
    return Json{{"mode", std::string(to_string(cfg.mode))},
                {"selection", to_json_value(cfg.selection)},
                {"schedule", to_json_value(cfg.schedule)},
                {"iterations", cfg.iterations},
                {"world", to_json_value(cfg.world)},
                {"seed", cfg.seed},
                {"gate", cfg.gate},
                {"probe", cfg.probe}};
}

RunConfig run_config_from_json(const Json& j, const RunConfig& defaults, const std::string& path) {
    ObjectReader r(j, path);
    RunConfig cfg = defaults;
    if (const Json* mode = r.optional("mode")) {
        cfg.mode = wrap<EvolutionMode>(r.child_path("mode"), &evolution_mode_from_string, *mode);
    }
    if (const Json* sel = r.optional("selection")) cfg.selection = selection_from_json(*sel, r.child_path("selection"));
    cfg.iterations = r.get_or<std::uint64_t>("iterations", cfg.iterations);
    if (const Json* sched = r.optional("schedule")) {
        cfg.schedule = schedule_from_json(*sched, r.child_path("schedule"));
    } else if (cfg.iterations != defaults.iterations) {
        cfg.schedule = PhaseSchedule::standard(cfg.iterations);
    }
    if (const Json* world = r.optional("world")) cfg.world = world_spec_from_json(*world, r.child_path("world"));
    cfg.seed = r.get_or<std::uint64_t>("seed", cfg.seed);
    cfg.gate = r.get_or<std::vector<std::size_t>>("gate", cfg.gate);
    cfg.probe = r.get_or<std::vector<std::size_t>>("probe", cfg.probe);
    r.finish();
    return cfg;
}

Json to_json_value(const EvolutionTrace& trace) {
    Json j;
    j["agent"] = trace.agent.value;
    j["applied_patches"] = array_of(trace.applied_patches, [](const Patch& p) { return to_json_value(p); });
    j["sampled_task"] = trace.sampled_task ? Json(*trace.sampled_task) : Json(nullptr);
    j["predicted_patch"] = Json{{"deployed_tools", trace.predicted_patch.deployed_tools},
                                {"active_bugs", trace.predicted_patch.active_bugs},
                                {"solved", trace.predicted_patch.solved}};
    j["execution_log"] = array_of(trace.execution_log, [](const LogEvent& e) {
        return Json{{"kind", e.kind}, {"subject", e.subject}};
    });
    j["outcome"] = Json{{"passed", trace.outcome.passed}, {"failure_mode", trace.outcome.failure_mode}};
    return j;
}

EvolutionTrace trace_from_json(const Json& j, const std::string& path) {
    ObjectReader r(j, path);
    EvolutionTrace t;
    t.agent = AgentId{r.get<std::uint64_t>("agent")};
    t.applied_patches = vector_from<Patch>(r.required("applied_patches"), r.child_path("applied_patches"),
                                           [](const Json& v, const std::string& p) { return patch_from_json(v, p); });
    const Json& task = r.required("sampled_task");
    if (!task.is_null()) t.sampled_task = task.get<std::size_t>();
    {
        ObjectReader pp(r.required("predicted_patch"), r.child_path("predicted_patch"));
        t.predicted_patch.deployed_tools = pp.get<std::vector<std::string>>("deployed_tools");
        t.predicted_patch.active_bugs = pp.get<std::vector<std::string>>("active_bugs");
        t.predicted_patch.solved = pp.get<bool>("solved");
        pp.finish();
    }
    t.execution_log = vector_from<LogEvent>(r.required("execution_log"), r.child_path("execution_log"),
                                            [](const Json& v, const std::string& p) {
                                                ObjectReader e(v, p);
                                                LogEvent ev{e.get<std::string>("kind"), e.get<std::string>("subject")};
                                                e.finish();
                                                return ev;
                                            });
    {
        ObjectReader o(r.required("outcome"), r.child_path("outcome"));
        t.outcome.passed = o.get<bool>("passed");
        t.outcome.failure_mode = o.get<std::string>("failure_mode");
        o.finish();
    }
    r.finish();
    return t;
}

Json to_json_value(const Directive& directive) {
    Json j;
    j["agent"] = directive.agent.value;
    j["actions"] = array_of(directive.actions, [](const DirectiveAction& a) {
        return Json{{"kind", std::string(to_string(a.kind))},
                    {"payload", a.payload},
                    {"origin", provenance_to_json(a.origin, kSelf)}};
    });
    j["rationale"] = directive.rationale;
    return j;
}

Directive directive_from_json(const Json& j, const std::string& path) {
    ObjectReader r(j, path);
    Directive d;
    d.agent = AgentId{r.get<std::uint64_t>("agent")};
    d.actions = vector_from<DirectiveAction>(
        r.required("actions"), r.child_path("actions"), [](const Json& v, const std::string& p) {
            ObjectReader a(v, p);
            DirectiveAction action;
            action.kind = wrap<ActionKind>(a.child_path("kind"), &action_kind_from_string, a.required("kind"));
            action.payload = a.get_or<std::string>("payload", "");
            if (const Json* origin = a.optional("origin")) {
                action.origin = provenance_from_json(*origin, kSelf, a.child_path("origin"));
            }
            a.finish();
            return action;
        });
    d.rationale = r.get_or<std::string>("rationale", "");
    r.finish();
    return d;
}

Json to_json_value(const SharedExperience& experience) {
    Json traces = Json::array();
    for (const auto& [id, trace] : experience.traces) traces.push_back(to_json_value(trace));
    std::vector<AgentId> contributors;
    for (auto id : experience.contributors()) contributors.push_back(id);
    return Json{{"contributors", id_array(contributors)}, {"traces", traces}};
}

Json to_json_value(const IterationRecord& record) {
    Json j;
    j["iteration"] = record.iteration;
    j["profile"] = record.profile;
    j["group"] = array_of(record.group, [](const GroupEntry& g) {
        return Json{{"id", g.id.value}, {"score", g.score}, {"novelty", g.novelty}, {"performance", g.performance}};
    });
    j["traces"] = array_of(record.traces, [](const EvolutionTrace& t) { return to_json_value(t); });
    j["contributors"] = id_array(record.contributors);
    j["directives"] = array_of(record.directives, [](const Directive& d) { return to_json_value(d); });
    j["offspring"] = array_of(record.offspring, [](const AgentRecord& a) { return to_json_value(a); });
    j["archive_size"] = record.archive_size;
    j["selectable_size"] = record.selectable_size;
    j["best"] = Json{{"id", record.best_id.value}, {"performance", record.best_performance}};
    return j;
}

IterationRecord iteration_from_json(const Json& j, const std::string& path) {
    ObjectReader r(j, path);
    IterationRecord rec;
    rec.iteration = r.get<std::uint64_t>("iteration");
    rec.profile = r.get<std::string>("profile");
    rec.group = vector_from<GroupEntry>(r.required("group"), r.child_path("group"),
                                        [](const Json& v, const std::string& p) {
                                            ObjectReader g(v, p);
                                            GroupEntry e{AgentId{g.get<std::uint64_t>("id")}, g.get<double>("score"),
                                                         g.get<double>("novelty"), g.get<double>("performance")};
                                            g.finish();
                                            return e;
                                        });
    rec.traces = vector_from<EvolutionTrace>(r.required("traces"), r.child_path("traces"),
                                             [](const Json& v, const std::string& p) { return trace_from_json(v, p); });
    rec.contributors = id_list(r.required("contributors"), r.child_path("contributors"));
    rec.directives = vector_from<Directive>(r.required("directives"), r.child_path("directives"),
                                            [](const Json& v, const std::string& p) { return directive_from_json(v, p); });
    rec.offspring = vector_from<AgentRecord>(r.required("offspring"), r.child_path("offspring"),
                                             [](const Json& v, const std::string& p) { return agent_from_json(v, p); });
    rec.archive_size = r.get<std::size_t>("archive_size");
    rec.selectable_size = r.get<std::size_t>("selectable_size");
    {
        ObjectReader b(r.required("best"), r.child_path("best"));
        rec.best_id = AgentId{b.get<std::uint64_t>("id")};
        rec.best_performance = b.get<double>("performance");
        b.finish();
    }
    r.finish();
    return rec;
}

Json to_json_value(const InjectionRecord& record) {
    return Json{{"source", record.source.value},
                {"faulty", record.faulty.value},
                {"partner", provenance_to_json(record.partner, nullptr)},
                {"bug", record.bug},
                {"pre_injection_performance", record.pre_injection_performance}};
}

InjectionRecord injection_from_json(const Json& j, const std::string& path) {
    ObjectReader r(j, path);
    InjectionRecord rec;
    rec.source = AgentId{r.get<std::uint64_t>("source")};
    rec.faulty = AgentId{r.get<std::uint64_t>("faulty")};
    rec.partner = provenance_from_json(r.required("partner"), nullptr, r.child_path("partner"));
    rec.bug = r.get<std::string>("bug");
    rec.pre_injection_performance = r.get<double>("pre_injection_performance");
    r.finish();
    return rec;
}

}  // namespace gea
