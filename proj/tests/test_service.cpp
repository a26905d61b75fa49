#include <doctest.h>

#include <sstream>
#include <thread>

#include "imgep/errors.hpp"
#include "imgep/explorer.hpp"
#include "imgep/png_io.hpp"
#include "imgep/service.hpp"

// After Eigen: the resolver headers pulled in here define _res.
#include <httplib.h>

using namespace imgep;
using namespace imgep::service;
using nlohmann::json;

namespace {

struct SseEvent {
    std::uint64_t id = 0;
    std::string type;
    json data;
};

std::vector<SseEvent> parse_sse(const std::string& body) {
    std::vector<SseEvent> out;
    std::istringstream in(body);
    std::string line;
    SseEvent cur;
    bool have = false;
    while (std::getline(in, line)) {
        if (line.empty()) {
            if (have) out.push_back(cur);
            cur = {};
            have = false;
        } else if (line.rfind("id: ", 0) == 0) {
            cur.id = std::stoull(line.substr(4));
            have = true;
        } else if (line.rfind("event: ", 0) == 0) {
            cur.type = line.substr(7);
        } else if (line.rfind("data: ", 0) == 0) {
            cur.data = json::parse(line.substr(6));
        }
    }
    return out;
}

json session_body(int budget, int n_init, std::uint64_t seed = 1) {
    return json{{"system", "gray_scott"},
                {"gray_scott", {{"width", 16}, {"height", 16}, {"steps", 100}}},
                {"config", {{"budget", budget}, {"n_init", n_init}, {"seed", seed}, {"method", "NRAB"}}},
                {"roi", {{"volume", {0.05, 0.9}}}}};
}

// Live server on an ephemeral localhost port for the duration of a test.
struct LiveServer {
    SessionManager sessions;
    Server server{sessions};
    int port = 0;
    std::thread thread;

    LiveServer() {
        port = server.bind_any_port("127.0.0.1");
        thread = std::thread([this] { server.listen(); });
    }
    ~LiveServer() {
        sessions.clear();
        server.stop();
        thread.join();
    }
    httplib::Client client() const {
        httplib::Client c("127.0.0.1", port);
        c.set_read_timeout(60, 0);
        return c;
    }
    std::string create(const json& body) {
        auto c = client();
        auto r = c.Post("/sessions", body.dump(), "application/json");
        REQUIRE(r);
        REQUIRE(r->status == 201);
        return json::parse(r->body)["id"];
    }
    json control(const std::string& id, const json& action, int expect = 200) {
        auto c = client();
        auto r = c.Post("/sessions/" + id + "/control", action.dump(), "application/json");
        REQUIRE(r);
        CHECK(r->status == expect);
        return json::parse(r->body);
    }
    json get(const std::string& path, int expect = 200) {
        auto c = client();
        auto r = c.Get(path);
        REQUIRE(r);
        CHECK(r->status == expect);
        return json::parse(r->body);
    }
    std::string raw(const std::string& path) {
        auto c = client();
        auto r = c.Get(path);
        REQUIRE(r);
        REQUIRE(r->status == 200);
        return r->body;
    }
};

}  // namespace

TEST_CASE("control actions parse") {
    CHECK(control_from_json(json{{"action", "step"}, {"n", 5}}).n == 5);
    CHECK(control_from_json(json{{"action", "set_balance"}, {"balance_prob", 0.2}}).balance_prob == 0.2);
    CHECK_THROWS_AS(control_from_json(json{{"action", "jump"}}), ValidationError);
    CHECK_THROWS_AS(control_from_json(json{{"action", "step"}, {"n", 0}}), ValidationError);
    CHECK_THROWS_AS(control_from_json(json{{"action", "set_balance"}, {"balance_prob", 2}}), ValidationError);
}

TEST_CASE("session creation and validation over http") {
    LiveServer s;
    const std::string a = s.create(session_body(40, 20));
    const std::string b = s.create(session_body(40, 20));
    CHECK(a != b);
    const json snap = s.get("/sessions/" + a);
    CHECK(snap["state"] == "idle");
    CHECK(snap["history_length"] == 0);

    auto c = s.client();
    auto bad = c.Post("/sessions", session_body(10, 20).dump(), "application/json");
    REQUIRE(bad);
    CHECK(bad->status == 400);
    CHECK(json::parse(bad->body)["error"] == "validation");
    CHECK(json::parse(bad->body)["field"] == "budget");

    auto bad_roi = c.Post("/sessions", json{{"roi", {{"area", {0, 1}}}}}.dump(), "application/json");
    REQUIRE(bad_roi);
    CHECK(bad_roi->status == 400);
    CHECK(json::parse(bad_roi->body)["error"] == "unknown_feature");

    auto garbage = c.Post("/sessions", "{nope", "application/json");
    REQUIRE(garbage);
    CHECK(garbage->status == 400);

    CHECK(s.get("/sessions/ffff", 404)["error"] == "unknown_session");
    s.control("ffff", json{{"action", "run"}}, 404);
}

TEST_CASE("state machine and step(n)") {
    LiveServer s;
    const std::string id = s.create(session_body(60, 10));
    CHECK(s.control(id, json{{"action", "pause"}}, 409)["error"] == "illegal_transition");

    json r = s.control(id, json{{"action", "step"}, {"n", 5}});
    CHECK(r["state"] == "paused");
    CHECK(r["history_length"] == 5);
    s.control(id, json{{"action", "pause"}}, 409);
    r = s.control(id, json{{"action", "step"}, {"n", 5}});
    CHECK(r["history_length"] == 10);

    CHECK(s.control(id, json{{"action", "run"}})["state"] == "running");
    s.control(id, json{{"action", "run"}}, 409);
    s.control(id, json{{"action", "step"}, {"n", 1}}, 409);
    // Pausing may race with completion; either is legal.
    auto c = s.client();
    auto p = c.Post("/sessions/" + id + "/control", json{{"action", "pause"}}.dump(), "application/json");
    REQUIRE(p);
    CHECK((p->status == 200 || p->status == 409));
    s.control(id, json{{"action", "run"}}, p->status == 200 ? 200 : 409);

    // Run to completion through the event stream.
    s.raw("/sessions/" + id + "/events");
    const json done = s.get("/sessions/" + id);
    CHECK(done["state"] == "done");
    CHECK(done["history_length"] == 60);
    s.control(id, json{{"action", "run"}}, 409);
    s.control(id, json{{"action", "step"}, {"n", 1}}, 409);

    // Step beyond the budget stops at the budget.
    const std::string id2 = s.create(session_body(12, 10));
    r = s.control(id2, json{{"action", "step"}, {"n", 50}});
    CHECK(r["history_length"] == 12);
    CHECK(r["state"] == "done");

    // State events follow the legal transitions only.
    const auto events = parse_sse(s.raw("/sessions/" + id + "/events?follow=0"));
    std::string prev = "idle";
    for (const auto& e : events) {
        if (e.type != "state") continue;
        const std::string next = e.data["state"];
        const bool legal = (prev == "idle" && (next == "running" || next == "paused" || next == "done")) ||
                           (prev == "running" && (next == "paused" || next == "done")) ||
                           (prev == "paused" && (next == "running" || next == "done"));
        CHECK_MESSAGE(legal, prev << " -> " << next);
        prev = next;
    }
    CHECK(prev == "done");
}

TEST_CASE("full event stream and gap-free replay") {
    LiveServer s;
    const std::string id = s.create(session_body(300, 50));
    s.control(id, json{{"action", "run"}});
    const auto events = parse_sse(s.raw("/sessions/" + id + "/events"));

    std::vector<int> discoveries;
    std::uint64_t last_id = 0;
    std::size_t metrics_events = 0;
    for (const auto& e : events) {
        CHECK(e.id > last_id);
        last_id = e.id;
        if (e.type == "discovery") {
            discoveries.push_back(e.data["index"]);
            CHECK(e.data.contains("thumbnail_url"));
            CHECK(e.data["behavior"]["hu"].size() == 7);
        }
        if (e.type == "metrics") {
            ++metrics_events;
            CHECK(e.data["constrained_div"] <= e.data["global_div"]);
        }
    }
    REQUIRE(discoveries.size() == 300);
    for (int i = 0; i < 300; ++i) CHECK(discoveries[static_cast<std::size_t>(i)] == i);
    CHECK(metrics_events == 300);

    // Reconnect at 100: replay covers exactly 100..299.
    const auto replay = parse_sse(s.raw("/sessions/" + id + "/events?since=100"));
    std::vector<int> again;
    for (const auto& e : replay)
        if (e.type == "discovery") again.push_back(e.data["index"]);
    REQUIRE(again.size() == 200);
    for (int i = 0; i < 200; ++i) CHECK(again[static_cast<std::size_t>(i)] == 100 + i);

    // Last-Event-ID resumes strictly after that event.
    auto c = s.client();
    const std::uint64_t mid = events[events.size() / 2].id;
    auto r = c.Get("/sessions/" + id + "/events", {{"Last-Event-ID", std::to_string(mid)}});
    REQUIRE(r);
    const auto resumed = parse_sse(r->body);
    REQUIRE_FALSE(resumed.empty());
    CHECK(resumed.front().id == mid + 1);
    CHECK(resumed.back().id == events.back().id);

    // Series are monotone and the csv has one row per sample.
    std::istringstream csv(s.raw("/sessions/" + id + "/metrics.csv"));
    std::string line;
    std::getline(csv, line);
    CHECK(line == "sample_index,global_diversity,constrained_diversity,inlier_flag");
    long prev_g = -1, prev_c = -1, rows = 0;
    while (std::getline(csv, line)) {
        long idx, g, k;
        int flag;
        char comma;
        std::istringstream row(line);
        row >> idx >> comma >> g >> comma >> k >> comma >> flag;
        CHECK(idx == rows);
        CHECK(g >= prev_g);
        CHECK(k >= prev_c);
        CHECK(k <= g);
        prev_g = g;
        prev_c = k;
        ++rows;
    }
    CHECK(rows == 300);

    std::istringstream hist(s.raw("/sessions/" + id + "/history.jsonl"));
    std::size_t n = 0;
    while (std::getline(hist, line)) {
        const json j = json::parse(line);
        CHECK(j["index"] == n);
        ++n;
    }
    CHECK(n == 300);
}

TEST_CASE("roi edits: census, containment and event ordering") {
    LiveServer s;
    const std::string id = s.create(session_body(200, 40));
    s.control(id, json{{"action", "step"}, {"n", 60}});
    auto c = s.client();

    auto put = [&](const json& roi) {
        auto r = c.Put("/sessions/" + id + "/roi", roi.dump(), "application/json");
        REQUIRE(r);
        REQUIRE(r->status == 200);
        return json::parse(r->body);
    };
    const json narrow = put(json{{"volume", {0.1, 0.3}}});
    CHECK(narrow["total"] == 60);
    const json same = put(json{{"volume", {0.1, 0.3}}});
    CHECK(same["inlier_count"] == narrow["inlier_count"]);
    const json wide = put(json{{"volume", {0.0, 0.9}}});
    CHECK(wide["inlier_count"] >= narrow["inlier_count"]);
    CHECK(s.get("/sessions/" + id)["inlier_count"] == wide["inlier_count"]);

    auto bad = c.Put("/sessions/" + id + "/roi", json{{"area", {0, 1}}}.dump(), "application/json");
    REQUIRE(bad);
    CHECK(bad->status == 400);
    bad = c.Put("/sessions/" + id + "/roi", json{{"volume", {0.9, 0.1}}}.dump(), "application/json");
    REQUIRE(bad);
    CHECK(bad->status == 400);

    // Mid-run edit: every discovery after roi_applied is classified under the new ROI.
    s.control(id, json{{"action", "run"}});
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
    put(json{{"volume", {0.2, 0.5}}});
    const auto events = parse_sse(s.raw("/sessions/" + id + "/events"));
    json roi = json{{"volume", {0.0, 0.9}}};
    double lo = 0.0, hi = 0.9;
    int applied = 0;
    for (const auto& e : events) {
        if (e.type == "roi_applied") {
            const auto& con = e.data["roi"]["constraints"][0];
            lo = con["lo"];
            hi = con["hi"];
            ++applied;
        }
        if (e.type == "discovery" && e.data["index"] >= 60) {
            const double v = e.data["constraint_features"]["volume"];
            const int expected = (v >= lo && v <= hi) ? 1 : -1;
            CHECK(e.data["classification"] == expected);
        }
    }
    CHECK(applied == 4);
    CHECK(lo == 0.2);

    // A done session still re-classifies.
    const json after = put(json{{"volume", {0.0, 1.0}}});
    CHECK(after["total"] == 200);
    CHECK(s.get("/sessions/" + id)["state"] == "done");
}

TEST_CASE("balance changes apply between steps") {
    LiveServer s;
    const std::string id = s.create(session_body(40, 10));
    s.control(id, json{{"action", "set_balance"}, {"balance_prob", 1.0}});
    s.control(id, json{{"action", "step"}, {"n", 12}});
    CHECK(s.get("/sessions/" + id)["config"]["balance_prob"] == 1.0);
}

TEST_CASE("pattern images") {
    LiveServer s;
    const std::string id = s.create(session_body(30, 10));
    s.control(id, json{{"action", "step"}, {"n", 12}});
    auto c = s.client();
    auto png = c.Get("/sessions/" + id + "/patterns/3.png");
    REQUIRE(png);
    CHECK(png->status == 200);
    CHECK(png->get_header_value("Content-Type") == "image/png");
    const GrayImage img = decode_png(std::vector<std::uint8_t>(png->body.begin(), png->body.end()));
    CHECK(img.width == 16);
    CHECK(img.height == 16);

    // Pixels match the observation implied by the stored mean pixel (round(255 v)).
    const auto hist = s.raw("/sessions/" + id + "/history.jsonl");
    std::istringstream in(hist);
    std::string line;
    for (int i = 0; i <= 3; ++i) std::getline(in, line);
    const double mean = json::parse(line)["behavior"]["mean_pixel"];
    double pmean = 0.0;
    for (auto px : img.pixels) pmean += px / 255.0;
    pmean /= static_cast<double>(img.pixels.size());
    CHECK(std::abs(pmean - mean) <= 0.5 / 255.0 + 1e-9);

    auto missing = c.Get("/sessions/" + id + "/patterns/500.png");
    REQUIRE(missing);
    CHECK(missing->status == 404);
}

TEST_CASE("sessions replay identically under the same commands") {
    auto drive = [](Session& s) {
        s.control({ControlAction::Kind::step, 25});
        s.put_roi(explorer::volume_roi(0.1, 0.4));
        s.control({ControlAction::Kind::set_balance, 1, 0.9});
        s.control({ControlAction::Kind::step, 20});
        return s.history_jsonl();
    };
    SystemSpec spec;
    spec.gray_scott.width = 16;
    spec.gray_scott.height = 16;
    spec.gray_scott.steps = 100;
    explorer::ExplorerConfig cfg;
    cfg.n_init = 15;
    cfg.budget = 60;
    cfg.seed = 9;
    Session a("a", spec, cfg, explorer::volume_roi());
    Session b("b", spec, cfg, explorer::volume_roi());
    CHECK(drive(a) == drive(b));
    CHECK(a.history_size() == 45);
    CHECK_THROWS_AS(a.pattern_png(45), NotFound);
}
