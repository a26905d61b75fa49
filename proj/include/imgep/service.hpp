#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <stop_token>
#include <cstdint>
#include <deque>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "imgep/explorer.hpp"
#include "imgep/metrics.hpp"
#include "imgep/system.hpp"

namespace httplib {
class Server;
}

namespace imgep::service {

using nlohmann::json;

struct UnknownSession : std::runtime_error {
    explicit UnknownSession(const std::string& id) : std::runtime_error("unknown session: " + id) {}
};

struct IllegalTransition : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NotFound : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class SessionState { idle, running, paused, done };
std::string to_string(SessionState s);

struct Event {
    std::uint64_t seq = 0;
    std::size_t position = 0;  // history length when emitted; discovery i has position i
    std::string type;          // discovery | metrics | state | roi_applied
    json data;
};

struct Census {
    std::size_t inlier_count = 0;
    std::size_t total = 0;
};

struct ControlAction {
    enum class Kind { run, pause, step, set_balance } kind = Kind::run;
    int n = 1;
    double balance_prob = 0.5;
};

ControlAction control_from_json(const json& j);

// One live exploration. A driver thread owns the stepping; API calls read
// consistent snapshots under the session mutex. ROI and balance edits are queued
// and applied by the driver between steps.
class Session {
public:
    Session(std::string id, SystemSpec spec, explorer::ExplorerConfig config, explorer::Roi roi);
    ~Session();
    Session(const Session&) = delete;
    Session& operator=(const Session&) = delete;

    const std::string& id() const { return id_; }
    SessionState state() const;
    json snapshot() const;

    // run / pause return at once; step(n) returns after the n samples (or the budget) are done.
    SessionState control(const ControlAction& action);

    // Waits until the driver has applied the ROI, then reports the census.
    Census put_roi(const explorer::Roi& roi);

    // Events at or after history position `since`, or strictly after `after_seq` when given.
    std::vector<Event> events_since(std::size_t since, std::optional<std::uint64_t> after_seq = {}) const;
    // Blocks until an event with seq > after_seq exists or the timeout expires.
    bool wait_for_event(std::uint64_t after_seq, std::chrono::milliseconds timeout) const;
    std::uint64_t last_seq() const;

    std::vector<std::uint8_t> pattern_png(std::size_t index) const;
    std::string metrics_csv() const;
    std::string history_jsonl() const;
    std::size_t history_size() const;

private:
    struct Command {
        enum class Kind { roi, balance } kind;
        explorer::Roi roi;
        double balance = 0.0;
        std::shared_ptr<std::promise<Census>> done;
    };

    void drive(std::stop_token stop);
    void apply_commands_locked();
    void commit_locked(explorer::HistoryEntry entry);
    void emit_locked(const std::string& type, json data);
    void set_state_locked(SessionState s);
    void recompute_series_locked();
    json metrics_json_locked() const;

    std::string id_;
    SystemSpec spec_;
    std::unique_ptr<System> system_;
    std::unique_ptr<explorer::Explorer> explorer_;

    mutable std::mutex mutex_;
    mutable std::condition_variable_any cv_;     // driver wake-ups
    mutable std::condition_variable events_cv_;  // stream readers and step() waiters
    SessionState state_ = SessionState::idle;
    int steps_remaining_ = 0;  // > 0 while a step(n) is in progress
    std::deque<Command> commands_;
    std::vector<Event> events_;
    std::vector<std::vector<std::uint8_t>> pngs_;

    // Live diversity: evaluation space fitted once the bootstrap samples exist.
    std::optional<features::PcaBasis> eval_space_;
    std::vector<metrics::EvalEmbedding> embeddings_;
    std::optional<metrics::DiversityTracker> tracker_;
    std::vector<std::size_t> global_series_;
    std::vector<std::size_t> constrained_series_;

    std::jthread driver_;
};

class SessionManager {
public:
    // Body: {"system": "...", "gray_scott"|"lenia": {...}, "config": {...}, "roi": {...}}.
    std::string create(const json& body);
    std::shared_ptr<Session> get(const std::string& id) const;
    std::vector<std::string> ids() const;
    void clear();

private:
    mutable std::mutex mutex_;
    std::map<std::string, std::shared_ptr<Session>> sessions_;
};

// HTTP front end. Routes: POST /sessions, GET /sessions/{id}, POST /sessions/{id}/control,
// PUT /sessions/{id}/roi, GET /sessions/{id}/events?since=n, GET /sessions/{id}/patterns/{index}.png,
// GET /sessions/{id}/metrics.csv, GET /sessions/{id}/history.jsonl.
class Server {
public:
    explicit Server(SessionManager& sessions);
    ~Server();

    bool bind(const std::string& host, int port);
    int bind_any_port(const std::string& host);
    void listen();  // blocks until stop()
    void stop();

private:
    void install_routes();

    SessionManager& sessions_;
    std::unique_ptr<httplib::Server> http_;
    std::atomic<bool> stopping_{false};
};

}  // namespace imgep::service
