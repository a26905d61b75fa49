#include "imgep/service.hpp"

#include <algorithm>
#include <random>
#include <sstream>

#include <httplib.h>

#include "imgep/config_io.hpp"
#include "imgep/errors.hpp"
#include "imgep/history_io.hpp"
#include "imgep/png_io.hpp"

namespace imgep::service {

std::string to_string(SessionState s) {
    switch (s) {
        case SessionState::idle: return "idle";
        case SessionState::running: return "running";
        case SessionState::paused: return "paused";
        case SessionState::done: return "done";
    }
    return "?";
}

ControlAction control_from_json(const json& j) {
    if (!j.is_object() || !j.contains("action") || !j.at("action").is_string())
        throw ValidationError("action", "expected {\"action\": run|pause|step|set_balance}");
    const std::string a = j.at("action").get<std::string>();
    ControlAction c;
    if (a == "run") {
        c.kind = ControlAction::Kind::run;
    } else if (a == "pause") {
        c.kind = ControlAction::Kind::pause;
    } else if (a == "step") {
        c.kind = ControlAction::Kind::step;
        if (j.contains("n")) {
            if (!j.at("n").is_number_integer()) throw ValidationError("n", "expected an integer");
            c.n = j.at("n").get<int>();
        }
        if (c.n < 1) throw ValidationError("n", "must be >= 1");
    } else if (a == "set_balance") {
        c.kind = ControlAction::Kind::set_balance;
        if (!j.contains("balance_prob") || !j.at("balance_prob").is_number())
            throw ValidationError("balance_prob", "expected a number");
        c.balance_prob = j.at("balance_prob").get<double>();
        if (!(c.balance_prob >= 0.0 && c.balance_prob <= 1.0)) throw ValidationError("balance_prob", "must lie in [0, 1]");
    } else {
        throw ValidationError("action", "unknown action '" + a + "'");
    }
    return c;
}

// --- Session ----------------------------------------------------------------

Session::Session(std::string id, SystemSpec spec, explorer::ExplorerConfig config, explorer::Roi roi)
    : id_(std::move(id)), spec_(spec) {
    system_ = make_system(spec_, explorer::initial_state_seed(config.seed));
    explorer_ = std::make_unique<explorer::Explorer>(*system_, std::move(config), std::move(roi));
    driver_ = std::jthread([this](std::stop_token st) { drive(st); });
}

Session::~Session() {
    driver_.request_stop();
    cv_.notify_all();
    if (driver_.joinable()) driver_.join();
    // Wake anyone still blocked on a queued command.
    std::lock_guard lock(mutex_);
    for (auto& c : commands_)
        if (c.done) c.done->set_exception(std::make_exception_ptr(std::runtime_error("session closed")));
}

SessionState Session::state() const {
    std::lock_guard lock(mutex_);
    return state_;
}

void Session::emit_locked(const std::string& type, json data) {
    Event e;
    e.seq = events_.size() + 1;
    e.position = explorer_->history().size();
    if ((type == "discovery" || type == "metrics") && data.contains("index"))
        e.position = data.at("index").get<std::size_t>();
    e.type = type;
    e.data = std::move(data);
    events_.push_back(std::move(e));
    events_cv_.notify_all();
}

void Session::set_state_locked(SessionState s) {
    if (s == state_) return;
    state_ = s;
    emit_locked("state", json{{"state", to_string(s)}});
}

void Session::recompute_series_locked() {
    const auto& history = explorer_->history();
    const int n_init = explorer_->config().n_init;
    global_series_.clear();
    constrained_series_.clear();
    if (!eval_space_) {
        global_series_.assign(history.size(), 0);
        constrained_series_.assign(history.size(), 0);
        tracker_.reset();
        return;
    }
    std::vector<int> cls;
    for (const auto& e : history) cls.push_back(e.classification);
    metrics::BinningSpec g = metrics::make_binning(metrics::kGlobalBins, std::span(embeddings_).first(
                                                                             std::min<std::size_t>(embeddings_.size(),
                                                                                                   static_cast<std::size_t>(std::max(n_init, 5)))));
    metrics::BinningSpec c = metrics::make_binning(metrics::kConstrainedBins, {});
    c.lo = g.lo;
    c.hi = g.hi;
    if (tracker_) {
        // Keep the bounds fixed once chosen.
        g = tracker_->global_spec();
        c = tracker_->constrained_spec();
    }
    const auto report = metrics::diversity_series(embeddings_, cls, g, c, n_init);
    global_series_ = report.global;
    constrained_series_ = report.constrained;
    tracker_.emplace(g, c);
    for (std::size_t i = 0; i < embeddings_.size(); ++i) tracker_->add(embeddings_[i], cls[i] == 1);
}

void Session::commit_locked(explorer::HistoryEntry entry) {
    pngs_.push_back(encode_png(*entry.observation));
    entry.observation.reset();
    const explorer::HistoryEntry& e = explorer_->commit(std::move(entry));
    const auto& history = explorer_->history();
    const std::size_t fit_at = static_cast<std::size_t>(std::max(explorer_->config().n_init, 5));

    if (eval_space_) {
        embeddings_.push_back(metrics::embed(*eval_space_, e.haralick));
        tracker_->add(embeddings_.back(), e.classification == 1);
        global_series_.push_back(tracker_->global());
        constrained_series_.push_back(tracker_->constrained());
    } else if (history.size() >= fit_at) {
        std::vector<features::HaralickVector> pooled;
        for (const auto& h : history) pooled.push_back(h.haralick);
        eval_space_ = metrics::fit_evaluation_space(pooled);
        embeddings_ = metrics::embed_all(*eval_space_, pooled);
        recompute_series_locked();
    } else {
        global_series_.push_back(0);
        constrained_series_.push_back(0);
    }

    json cf = json::object();
    for (auto name : features::ConstraintFeatures::names()) cf[std::string(name)] = e.constraint_features.get(name);
    emit_locked("discovery",
                json{{"index", e.index},
                     {"classification", e.classification == 1 ? 1 : -1},
                     {"behavior",
                      {{"hu", e.behavior.hu}, {"mean_pixel", e.behavior.mean_pixel}, {"volume", e.behavior.volume}}},
                     {"constraint_features", cf},
                     {"invalid", e.invalid},
                     {"thumbnail_url", "/sessions/" + id_ + "/patterns/" + std::to_string(e.index) + ".png"}});
    json m = metrics_json_locked();
    m["index"] = e.index;
    emit_locked("metrics", m);
}

json Session::metrics_json_locked() const {
    const auto m = explorer_->metrics();
    return json{{"global_div", global_series_.empty() ? 0 : global_series_.back()},
                {"constrained_div", constrained_series_.empty() ? 0 : constrained_series_.back()},
                {"acceptance", m.acceptance_rate}};
}

void Session::apply_commands_locked() {
    while (!commands_.empty()) {
        Command c = std::move(commands_.front());
        commands_.pop_front();
        if (c.kind == Command::Kind::balance) {
            explorer_->set_balance_prob(c.balance);
            continue;
        }
        try {
            Census census;
            census.inlier_count = explorer_->update_roi(c.roi);
            census.total = explorer_->history().size();
            recompute_series_locked();
            emit_locked("roi_applied", json{{"inlier_count", census.inlier_count},
                                            {"total", census.total},
                                            {"roi", config_io::roi_to_json(c.roi)}});
            if (c.done) c.done->set_value(census);
        } catch (...) {
            if (c.done) c.done->set_exception(std::current_exception());
        }
    }
}

void Session::drive(std::stop_token stop) {
    std::unique_lock lock(mutex_);
    while (!stop.stop_requested()) {
        cv_.wait(lock, stop, [&] { return !commands_.empty() || state_ == SessionState::running; });
        if (stop.stop_requested()) break;
        apply_commands_locked();
        if (state_ != SessionState::running) continue;
        if (explorer_->done()) {
            steps_remaining_ = 0;
            set_state_locked(SessionState::done);
            continue;
        }
        const explorer::Proposal proposal = explorer_->propose();
        lock.unlock();
        explorer::HistoryEntry entry;
        std::exception_ptr failure;
        try {
            entry = explorer_->evaluate(proposal);
        } catch (...) {
            failure = std::current_exception();
        }
        lock.lock();
        if (failure) {
            // A rollout that throws is a bug in the system, not a user error; stop driving.
            steps_remaining_ = 0;
            set_state_locked(SessionState::paused);
            continue;
        }
        commit_locked(std::move(entry));
        if (explorer_->done()) {
            steps_remaining_ = 0;
            set_state_locked(SessionState::done);
        } else if (steps_remaining_ > 0 && --steps_remaining_ == 0) {
            set_state_locked(SessionState::paused);
        }
    }
}

SessionState Session::control(const ControlAction& action) {
    std::unique_lock lock(mutex_);
    using K = ControlAction::Kind;
    switch (action.kind) {
        case K::run:
            if (state_ != SessionState::idle && state_ != SessionState::paused)
                throw IllegalTransition("run is not allowed in state " + to_string(state_));
            steps_remaining_ = 0;
            set_state_locked(SessionState::running);
            cv_.notify_all();
            return state_;
        case K::pause:
            if (state_ != SessionState::running)
                throw IllegalTransition("pause is not allowed in state " + to_string(state_));
            steps_remaining_ = 0;
            set_state_locked(SessionState::paused);
            return state_;
        case K::step: {
            if (state_ != SessionState::idle && state_ != SessionState::paused)
                throw IllegalTransition("step is not allowed in state " + to_string(state_));
            if (action.n < 1) throw ValidationError("n", "must be >= 1");
            steps_remaining_ = action.n;
            set_state_locked(SessionState::running);
            cv_.notify_all();
            events_cv_.wait(lock, [&] { return state_ != SessionState::running; });
            return state_;
        }
        case K::set_balance:
            if (!(action.balance_prob >= 0.0 && action.balance_prob <= 1.0))
                throw ValidationError("balance_prob", "must lie in [0, 1]");
            commands_.push_back({Command::Kind::balance, {}, action.balance_prob, nullptr});
            cv_.notify_all();
            return state_;
    }
    return state_;
}

Census Session::put_roi(const explorer::Roi& roi) {
    roi.validate();
    auto promise = std::make_shared<std::promise<Census>>();
    auto future = promise->get_future();
    {
        std::lock_guard lock(mutex_);
        commands_.push_back({Command::Kind::roi, roi, 0.0, promise});
    }
    cv_.notify_all();
    return future.get();
}

std::vector<Event> Session::events_since(std::size_t since, std::optional<std::uint64_t> after_seq) const {
    std::lock_guard lock(mutex_);
    std::vector<Event> out;
    for (const auto& e : events_) {
        if (after_seq ? e.seq > *after_seq : e.position >= since) out.push_back(e);
    }
    return out;
}

bool Session::wait_for_event(std::uint64_t after_seq, std::chrono::milliseconds timeout) const {
    std::unique_lock lock(mutex_);
    return events_cv_.wait_for(lock, timeout, [&] { return events_.size() > after_seq; });
}

std::uint64_t Session::last_seq() const {
    std::lock_guard lock(mutex_);
    return events_.size();
}

json Session::snapshot() const {
    std::lock_guard lock(mutex_);
    const auto& history = explorer_->history();
    std::size_t inliers = 0;
    for (const auto& e : history) inliers += e.classification == 1;
    return json{{"id", id_},
                {"system", to_string(spec_.kind)},
                {"state", to_string(state_)},
                {"config", config_io::explorer_config_to_json(explorer_->config())},
                {"roi", config_io::roi_to_json(explorer_->roi())},
                {"history_length", history.size()},
                {"inlier_count", inliers},
                {"total", history.size()},
                {"metrics", metrics_json_locked()},
                {"last_event", events_.size()}};
}

std::vector<std::uint8_t> Session::pattern_png(std::size_t index) const {
    std::lock_guard lock(mutex_);
    if (index >= pngs_.size()) throw NotFound("no pattern with index " + std::to_string(index));
    return pngs_[index];
}

std::string Session::metrics_csv() const {
    std::lock_guard lock(mutex_);
    metrics::DiversityReport r;
    r.global = global_series_;
    r.constrained = constrained_series_;
    for (const auto& e : explorer_->history()) r.inlier_flags.push_back(e.classification == 1 ? 1 : -1);
    std::ostringstream out;
    metrics::write_diversity_csv(out, r);
    return out.str();
}

std::string Session::history_jsonl() const {
    std::lock_guard lock(mutex_);
    std::ostringstream out;
    history_io::write_jsonl(out, explorer_->history());
    return out.str();
}

std::size_t Session::history_size() const {
    std::lock_guard lock(mutex_);
    return explorer_->history().size();
}

// --- SessionManager ---------------------------------------------------------

std::string SessionManager::create(const json& body) {
    if (!body.is_object()) throw ValidationError("body", "expected a JSON object");
    for (const auto& [key, value] : body.items()) {
        if (key != "system" && key != "gray_scott" && key != "lenia" && key != "config" && key != "roi")
            throw ValidationError(key, "unknown field");
    }
    json sys = json::object();
    for (const char* k : {"system", "gray_scott", "lenia"})
        if (body.contains(k)) sys[k] = body.at(k);
    const SystemSpec spec = config_io::system_spec_from_json(sys);
    const explorer::ExplorerConfig config =
        config_io::explorer_config_from_json(body.value("config", json::object()));
    const explorer::Roi roi =
        body.contains("roi") ? config_io::roi_from_json(body.at("roi")) : explorer::volume_roi();
    config.validate(spec.kind == SystemKind::gray_scott ? *gray_scott_space() : *lenia_space());

    static thread_local std::mt19937_64 rng{std::random_device{}()};
    std::lock_guard lock(mutex_);
    std::string id;
    do {
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(rng()));
        id = buf;
    } while (sessions_.count(id));
    sessions_[id] = std::make_shared<Session>(id, spec, config, roi);
    return id;
}

std::shared_ptr<Session> SessionManager::get(const std::string& id) const {
    std::lock_guard lock(mutex_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) throw UnknownSession(id);
    return it->second;
}

std::vector<std::string> SessionManager::ids() const {
    std::lock_guard lock(mutex_);
    std::vector<std::string> out;
    for (const auto& [id, s] : sessions_) out.push_back(id);
    return out;
}

void SessionManager::clear() {
    std::map<std::string, std::shared_ptr<Session>> old;
    {
        std::lock_guard lock(mutex_);
        old.swap(sessions_);
    }
}

// --- HTTP -------------------------------------------------------------------

namespace {

void send_json(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& kind, const std::string& message,
                json extra = json::object()) {
    extra["error"] = kind;
    extra["message"] = message;
    send_json(res, status, extra);
}

template <class F>
void guarded(httplib::Response& res, F&& f) {
    try {
        f();
    } catch (const UnknownSession& e) {
        send_error(res, 404, "unknown_session", e.what());
    } catch (const NotFound& e) {
        send_error(res, 404, "not_found", e.what());
    } catch (const IllegalTransition& e) {
        send_error(res, 409, "illegal_transition", e.what());
    } catch (const UnknownFeature& e) {
        send_error(res, 400, "unknown_feature", e.what(), {{"feature", e.feature}});
    } catch (const ValidationError& e) {
        send_error(res, 400, "validation", e.what(), {{"field", e.field}});
    } catch (const json::exception& e) {
        send_error(res, 400, "bad_json", e.what());
    } catch (const std::invalid_argument& e) {
        send_error(res, 400, "validation", e.what());
    } catch (const std::exception& e) {
        send_error(res, 500, "internal", e.what());
    }
}

std::string sse_frame(const Event& e) {
    return "id: " + std::to_string(e.seq) + "\nevent: " + e.type + "\ndata: " + e.data.dump() + "\n\n";
}

}  // namespace

Server::Server(SessionManager& sessions) : sessions_(sessions), http_(std::make_unique<httplib::Server>()) {
    install_routes();
}

Server::~Server() { stop(); }

bool Server::bind(const std::string& host, int port) { return http_->bind_to_port(host, port); }

int Server::bind_any_port(const std::string& host) { return http_->bind_to_any_port(host); }

void Server::listen() { http_->listen_after_bind(); }

void Server::stop() {
    stopping_ = true;
    if (http_) http_->stop();
}

void Server::install_routes() {
    auto& s = *http_;

    s.Post("/sessions", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            const std::string id = sessions_.create(json::parse(req.body.empty() ? "{}" : req.body));
            send_json(res, 201, {{"id", id}, {"state", "idle"}});
        });
    });

    s.Get(R"(/sessions/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] { send_json(res, 200, sessions_.get(req.matches[1])->snapshot()); });
    });

    s.Post(R"(/sessions/([^/]+)/control)", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            auto session = sessions_.get(req.matches[1]);
            const ControlAction action = control_from_json(json::parse(req.body));
            const SessionState st = session->control(action);
            send_json(res, 200, {{"state", to_string(st)}, {"history_length", session->history_size()}});
        });
    });

    s.Put(R"(/sessions/([^/]+)/roi)", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            auto session = sessions_.get(req.matches[1]);
            const Census c = session->put_roi(config_io::roi_from_json(json::parse(req.body)));
            send_json(res, 200, {{"inlier_count", c.inlier_count}, {"total", c.total}});
        });
    });

    s.Get(R"(/sessions/([^/]+)/patterns/(\d+)\.png)", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            auto session = sessions_.get(req.matches[1]);
            const auto bytes = session->pattern_png(std::stoull(req.matches[2]));
            res.set_content(std::string(bytes.begin(), bytes.end()), "image/png");
        });
    });

    s.Get(R"(/sessions/([^/]+)/metrics\.csv)", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] { res.set_content(sessions_.get(req.matches[1])->metrics_csv(), "text/csv"); });
    });

    s.Get(R"(/sessions/([^/]+)/history\.jsonl)", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            res.set_content(sessions_.get(req.matches[1])->history_jsonl(), "application/x-ndjson");
        });
    });

    s.Get(R"(/sessions/([^/]+)/events)", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            auto session = sessions_.get(req.matches[1]);
            std::size_t since = 0;
            if (req.has_param("since")) {
                try {
                    since = std::stoull(req.get_param_value("since"));
                } catch (const std::exception&) {
                    throw ValidationError("since", "expected a non-negative integer");
                }
            }
            std::optional<std::uint64_t> after;
            if (req.has_header("Last-Event-ID")) after = std::stoull(req.get_header_value("Last-Event-ID"));
            const bool follow = !(req.has_param("follow") && req.get_param_value("follow") == "0");

            res.set_header("Cache-Control", "no-cache");
            auto first = std::make_shared<bool>(true);
            auto cursor = std::make_shared<std::uint64_t>(0);
            res.set_chunked_content_provider(
                "text/event-stream",
                [this, session, since, after, follow, first, cursor](std::size_t, httplib::DataSink& sink) {
                    std::vector<Event> batch;
                    if (*first) {
                        batch = session->events_since(since, after);
                        *first = false;
                        // Nothing to replay yet: later events continue from the current end.
                        if (batch.empty()) *cursor = after ? *after : session->last_seq();
                    } else {
                        batch = session->events_since(0, *cursor);
                    }
                    for (const Event& e : batch) {
                        const std::string frame = sse_frame(e);
                        if (!sink.write(frame.data(), frame.size())) return false;
                        *cursor = e.seq;
                    }
                    if (!follow || stopping_) {
                        sink.done();
                        return true;
                    }
                    if (session->state() == SessionState::done && *cursor >= session->last_seq()) {
                        sink.done();
                        return true;
                    }
                    if (batch.empty() && !session->wait_for_event(*cursor, std::chrono::milliseconds(500))) {
                        static const std::string keepalive = ": keepalive\n\n";
                        if (!sink.write(keepalive.data(), keepalive.size())) return false;
                    }
                    return true;
                });
        });
    });
}

}  // namespace imgep::service
