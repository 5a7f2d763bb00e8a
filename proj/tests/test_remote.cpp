#include "doctest.h"

#include <chrono>
#include <thread>

#include "fixtures.hpp"
#include "stub_server.hpp"

#include "gea/json_codec.hpp"
#include "gea/remote_operator.hpp"

using namespace gea;
using Cause = RemoteOperatorError::Cause;

namespace {

struct Scene {
    SimWorld world = fixture::world(3, {{"T1"}, {"T2"}, {"T3"}});
    AgentRecord agent = fixture::agent(0, std::nullopt, "100", {{"T1", std::nullopt}});
    SharedExperience experience;
    Rng rng{1};

    Scene() {
        const std::vector<std::size_t> probe{0, 1, 2};
        Rng trace_rng(2);
        experience = self_only(collect_trace(agent, world, probe, trace_rng));
    }
};

RemoteOperator client(const stub::Server& server, int timeout_ms = 2000) {
    RemoteOperatorConfig cfg;
    cfg.base_url = server.base_url();
    cfg.timeout = std::chrono::milliseconds(timeout_ms);
    cfg.token = "secret";
    return RemoteOperator(cfg);
}

Cause cause_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const RemoteOperatorError& e) {
        return e.cause();
    }
    FAIL("no RemoteOperatorError");
    return Cause::transport;
}

void reply(httplib::Response& res, const Json& body) { res.set_content(body.dump(), "application/json"); }

}  // namespace

TEST_CASE("reflect request carries the schema and auth") {
    stub::Server server;
    Json seen;
    std::string auth;
    server.on([&](const std::string& route, const httplib::Request& req, httplib::Response& res) {
        CHECK(route == "reflect");
        seen = Json::parse(req.body);
        auth = req.get_header_value("Authorization");
        Directive d;
        d.agent = AgentId{0};
        reply(res, {{"directive", to_json_value(d)}});
    });
    Scene s;
    auto op = client(server);
    const Directive d = op.reflect(s.agent, s.experience, late_profile(), s.rng);
    CHECK(d.actions.empty());
    CHECK(d.agent == AgentId{0});
    CHECK(auth == "Bearer secret");
    CHECK(seen.at("schema") == kOperatorSchema);
    CHECK(seen.contains("shared_experience"));
    CHECK(seen.at("profile").at("name") == "late");
    CHECK(seen.at("agent").at("id") == 0);
    CHECK_FALSE(seen.at("agent").contains("z"));
    CHECK_FALSE(op.replayable());
}

TEST_CASE("evolve decodes patches and checks their sources") {
    stub::Server server;
    Json patches = Json::array();
    Json seen;
    server.on([&](const std::string& route, const httplib::Request& req, httplib::Response& res) {
        CHECK(route == "evolve");
        seen = Json::parse(req.body);
        reply(res, {{"patches", patches}});
    });
    Scene s;
    auto op = client(server);
    Directive d;
    d.agent = AgentId{0};

    auto out = op.evolve(s.agent, d, s.experience, late_profile(), s.world, s.rng);
    REQUIRE(out.size() == 1);
    CHECK(out[0].kind == PatchKind::noop);
    CHECK(seen.contains("directive"));

    patches = Json::array({{{"kind", "add-tool"}, {"payload", "T2"}, {"source_agent", "self"}}});
    out = op.evolve(s.agent, d, s.experience, late_profile(), s.world, s.rng);
    REQUIRE(out.size() == 1);
    CHECK(out[0].kind == PatchKind::add_tool);
    CHECK(out[0].payload == "T2");
    CHECK(!out[0].source_agent);

    patches = Json::array({{{"kind", "add-tool"}, {"payload", "T2"}, {"source_agent", 7}}});
    CHECK(cause_of([&] { op.evolve(s.agent, d, s.experience, late_profile(), s.world, s.rng); }) ==
          Cause::schema);

    patches = Json::array({{{"kind", "rewrite"}, {"payload", "T2"}}});
    CHECK(cause_of([&] { op.evolve(s.agent, d, s.experience, late_profile(), s.world, s.rng); }) ==
          Cause::schema);
}

TEST_CASE("reflect directive citing a stranger is a schema error") {
    stub::Server server;
    server.on([&](const std::string&, const httplib::Request&, httplib::Response& res) {
        Directive d;
        d.agent = AgentId{0};
        d.actions.push_back({ActionKind::adopt_tool, "T2", AgentId{5}});
        reply(res, {{"directive", to_json_value(d)}});
    });
    Scene s;
    auto op = client(server);
    CHECK(cause_of([&] { op.reflect(s.agent, s.experience, late_profile(), s.rng); }) == Cause::schema);
}

TEST_CASE("failure causes") {
    stub::Server server;
    Scene s;
    SUBCASE("timeout") {
        server.on([](const std::string&, const httplib::Request&, httplib::Response& res) {
            std::this_thread::sleep_for(std::chrono::milliseconds(1500));
            res.set_content("{}", "application/json");
        });
        auto op = client(server, 300);
        const auto started = std::chrono::steady_clock::now();
        CHECK(cause_of([&] { op.reflect(s.agent, s.experience, late_profile(), s.rng); }) == Cause::timeout);
        CHECK(std::chrono::steady_clock::now() - started < std::chrono::milliseconds(1400));
    }
    SUBCASE("http status") {
        server.on([](const std::string&, const httplib::Request&, httplib::Response& res) {
            res.status = 500;
            res.set_content("boom", "text/plain");
        });
        auto op = client(server);
        try {
            op.reflect(s.agent, s.experience, late_profile(), s.rng);
            FAIL("expected an error");
        } catch (const RemoteOperatorError& e) {
            CHECK(e.cause() == Cause::http_status);
            CHECK(e.status() == 500);
        }
    }
    SUBCASE("malformed body") {
        server.on([](const std::string&, const httplib::Request&, httplib::Response& res) {
            res.set_content("{\"directive\": ", "application/json");
        });
        auto op = client(server);
        CHECK(cause_of([&] { op.reflect(s.agent, s.experience, late_profile(), s.rng); }) == Cause::schema);
    }
    SUBCASE("missing directive") {
        server.on([](const std::string&, const httplib::Request&, httplib::Response& res) {
            res.set_content("{\"answer\": 1}", "application/json");
        });
        auto op = client(server);
        CHECK(cause_of([&] { op.reflect(s.agent, s.experience, late_profile(), s.rng); }) == Cause::schema);
    }
    SUBCASE("closed port") {
        const std::string url = server.base_url();
        server.stop();
        RemoteOperatorConfig cfg;
        cfg.base_url = url;
        cfg.timeout = std::chrono::milliseconds(1000);
        RemoteOperator op(cfg);
        CHECK(cause_of([&] { op.reflect(s.agent, s.experience, late_profile(), s.rng); }) == Cause::transport);
    }
}

TEST_CASE("configuration checks") {
    RemoteOperatorConfig cfg;
    cfg.base_url = "127.0.0.1:80";
    CHECK_THROWS_AS(RemoteOperator{cfg}, InvalidArgument);
    cfg.base_url = "http://127.0.0.1:80";
    cfg.max_in_flight = 0;
    CHECK_THROWS_AS(RemoteOperator{cfg}, InvalidArgument);
    CHECK(to_string(Cause::http_status) == "http-status");
}

TEST_CASE("a run can be driven through the remote operator") {
    stub::Server server;
    server.on([](const std::string& route, const httplib::Request& req, httplib::Response& res) {
        const Json body = Json::parse(req.body);
        if (route == "reflect") {
            Directive d;
            d.agent = AgentId{body.at("agent").at("id").get<std::uint64_t>()};
            d.actions.push_back({ActionKind::discover_tool, "", std::nullopt});
            reply(res, {{"directive", to_json_value(d)}});
        } else {
            reply(res, {{"patches", Json::array({{{"kind", "add-tool"}, {"payload", "T2"}}})}});
        }
    });
    auto op = client(server);
    auto cfg = fixture::small_config(1);
    cfg.iterations = 3;
    cfg.schedule = PhaseSchedule::standard(3);
    const auto t = run(cfg, world_for(cfg), op);
    CHECK(t.evolved_agents() == 5);
    CHECK(t.final_archive().at(AgentId{1}).has_tool("T2"));
}
