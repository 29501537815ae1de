#include "svcfo/sim.hpp"

#include "svcfo/errors.hpp"
#include "svcfo/util.hpp"

#include <json.hpp>

#include <algorithm>
#include <sstream>

namespace svcfo {

using Json = nlohmann::ordered_json;

const char* service_state_name(ServiceState state) {
    switch (state) {
    case ServiceState::Up: return "UP";
    case ServiceState::Down: return "DOWN";
    case ServiceState::Overload: return "OVERLOAD";
    }
    return "?";
}

void history_transition(AvailabilityHistory& history, long tick, ServiceState state) {
    if (!history.intervals.empty()) {
        Interval& open = history.intervals.back();
        if (open.state == state)
            return;
        open.end = tick;
    }
    history.intervals.push_back({tick, std::nullopt, state});
}

namespace {

[[noreturn]] void scenario_error(int line_no, const std::string& msg) {
    fail(Err::ScenarioError, "scenario line " + std::to_string(line_no) + ": " + msg);
}

ScenarioEvent parse_event(std::istringstream& fields, int line_no) {
    ScenarioEvent ev;
    ev.line_no = line_no;
    std::string action;
    if (!(fields >> ev.tick >> action) || ev.tick < 0)
        scenario_error(line_no, "want 'at <tick> <action> ...'");

    auto need = [&](std::string& out, const char* what) {
        if (!(fields >> out))
            scenario_error(line_no, std::string("missing ") + what);
    };
    auto finish = [&] {
        std::string extra;
        if (fields >> extra)
            scenario_error(line_no, "trailing content '" + extra + "'");
    };

    if (action == "start-server") {
        ev.action = ScenarioEvent::Action::StartServer;
        need(ev.server, "server name");
        finish();
    } else if (action == "deploy") {
        ev.action = ScenarioEvent::Action::Deploy;
        need(ev.service, "service name");
        need(ev.server, "server name");
        finish();
    } else if (action == "invoke") {
        ev.action = ScenarioEvent::Action::Invoke;
        need(ev.session, "session id");
        need(ev.service, "service name");
        need(ev.method, "method name");
        std::string word;
        while (fields >> word) {
            if (word == "dur") {
                if (!(fields >> ev.duration) || ev.duration < 1)
                    scenario_error(line_no, "dur wants a positive tick count");
            } else if (word == "crash") {
                std::string label;
                int occurrence = 0;
                if (!(fields >> label >> occurrence) || occurrence < 1)
                    scenario_error(line_no, "crash wants '<label> <occurrence>'");
                ev.plan.triggers[label] = occurrence;
            } else if (word == "args") {
                std::string literal;
                while (fields >> literal) {
                    try {
                        ev.args.push_back(parse_value_literal(literal));
                    } catch (const SvcError& e) {
                        scenario_error(line_no, std::string("bad argument literal: ") + e.what());
                    }
                }
            } else {
                scenario_error(line_no, "unknown invoke clause '" + word + "'");
            }
        }
    } else if (action == "crash-server") {
        ev.action = ScenarioEvent::Action::CrashServer;
        need(ev.server, "server name");
        finish();
    } else if (action == "recover-server") {
        ev.action = ScenarioEvent::Action::RecoverServer;
        need(ev.server, "server name");
        finish();
    } else if (action == "set-load-threshold") {
        ev.action = ScenarioEvent::Action::SetLoadThreshold;
        if (!(fields >> ev.threshold) || ev.threshold < 0)
            scenario_error(line_no, "set-load-threshold wants a non-negative integer");
        finish();
    } else {
        scenario_error(line_no, "unknown action '" + action + "'");
    }
    return ev;
}

} // namespace

Scenario parse_scenario(const std::string& text) {
    Scenario scn;
    int line_no = 0;
    for (const std::string& raw : split_lines(text)) {
        ++line_no;
        std::string line = raw;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        std::istringstream fields(line);
        std::string head;
        if (!(fields >> head) || head[0] == '#')
            continue;
        if (head == "observer") {
            std::string kw_poll, kw_miss;
            if (!(fields >> kw_poll >> scn.poll_interval >> kw_miss >> scn.miss_threshold) ||
                kw_poll != "poll" || kw_miss != "miss" || scn.poll_interval < 1 || scn.miss_threshold < 1)
                scenario_error(line_no, "want 'observer poll <interval> miss <threshold>'");
        } else if (head == "capacity") {
            if (!(fields >> scn.capacity) || scn.capacity < 1)
                scenario_error(line_no, "capacity wants a positive integer");
        } else if (head == "load-threshold") {
            if (!(fields >> scn.load_threshold) || scn.load_threshold < 0)
                scenario_error(line_no, "load-threshold wants a non-negative integer");
        } else if (head == "at") {
            scn.events.push_back(parse_event(fields, line_no));
        } else {
            scenario_error(line_no, "unknown directive '" + head + "'");
        }
    }
    std::stable_sort(scn.events.begin(), scn.events.end(),
                     [](const ScenarioEvent& a, const ScenarioEvent& b) { return a.tick < b.tick; });
    return scn;
}

Assignment assign_client(AdminRegistry& registry, const std::string& session_id, const std::string& service,
                         int capacity, long tick) {
    const AppServer* best_host = nullptr;
    const AppServer* best_fresh = nullptr;
    for (const auto& [name, srv] : registry.servers) { // name-sorted: ties resolve smallest
        if (!srv.up || srv.load >= capacity)
            continue;
        if (srv.deployed.count(service)) {
            if (!best_host || srv.load < best_host->load)
                best_host = &srv;
        } else if (!best_fresh || srv.load < best_fresh->load) {
            best_fresh = &srv;
        }
    }
    Assignment out;
    if (best_host) {
        out.server = best_host->name;
    } else if (best_fresh) {
        out.server = best_fresh->name;
        out.newly_deployed = true;
        registry.servers[out.server].deployed.insert(service);
        registry.services[service].insert(out.server);
        history_transition(registry.histories[{service, out.server}], tick, ServiceState::Up);
    } else {
        fail(Err::NoServerError, "no running server can host service '" + service + "'");
    }
    registry.assignments[session_id] = out.server;
    return out;
}

OverloadShift record_overload(AdminRegistry& registry, const std::string& service, const std::string& server,
                              int load, int threshold, long tick) {
    auto it = registry.histories.find({service, server});
    if (it == registry.histories.end() || it->second.intervals.empty())
        return OverloadShift::None;
    ServiceState current = it->second.intervals.back().state;
    if (current == ServiceState::Down)
        return OverloadShift::None;
    if (current == ServiceState::Up && load > threshold) {
        history_transition(it->second, tick, ServiceState::Overload);
        return OverloadShift::Entered;
    }
    if (current == ServiceState::Overload && load <= threshold) {
        history_transition(it->second, tick, ServiceState::Up);
        return OverloadShift::Left;
    }
    return OverloadShift::None;
}

namespace {

struct PendingCall {
    bool resume = false; // false: never started (no server); true: interrupted mid-flight
    std::string service;
    std::string method;
    std::vector<Value> args;
    CrashPlan plan;
    long duration = 10;
    std::string from_server; // resume only: where it was interrupted
};

struct InFlight {
    std::string session;
    std::string service;
    std::string method;
    std::string server;
    std::vector<Value> args;
    CrashPlan plan;
    long completion_tick = 0;
};

class Sim {
public:
    Sim(const Scenario& scenario, const std::map<std::string, ScenarioUnit>& units, const FomConfig& config)
        : scn_(scenario), units_(units), factory_(config) {
        observer_.poll_interval = scenario.poll_interval;
        observer_.miss_threshold = scenario.miss_threshold;
        threshold_ = scenario.load_threshold;
    }

    SimulationResult run() {
        SimulationResult result;
        if (scn_.events.empty())
            return result;
        long t = 0;
        std::size_t next_event = 0;
        for (;;) {
            poll_phase(t);
            completion_phase(t);
            while (next_event < scn_.events.size() && scn_.events[next_event].tick == t)
                apply_event(scn_.events[next_event++], t);
            retry_phase(t);

            bool events_left = next_event < scn_.events.size();
            bool undeclared_down = false;
            for (const auto& [name, srv] : reg_.servers)
                if (!srv.up && !declared_.count(name))
                    undeclared_down = true;
            if (!events_left && in_flight_.empty() && !undeclared_down)
                break; // pending sessions, if any, just failed a retry with nothing left to change
            ++t;
        }
        Json end;
        end["tick"] = t;
        end["event"] = "scenario_end";
        end["pending"] = Json::array();
        for (const auto& [session, call] : pending_)
            end["pending"].push_back(session);
        emit(end);

        result.trace = trace_;
        result.registry = std::move(reg_);
        return result;
    }

private:
    void emit(const Json& record) { trace_ += record.dump() + "\n"; }

    Json base(long tick, const char* event) {
        Json j;
        j["tick"] = tick;
        j["event"] = event;
        return j;
    }

    const ScenarioUnit& unit_for(const std::string& service, int line_no) {
        auto it = units_.find(service);
        if (it == units_.end())
            scenario_error(line_no, "no unit for service '" + service + "'");
        return it->second;
    }

    std::shared_ptr<Fom> ensure_handle(const std::string& server, const std::string& service) {
        std::shared_ptr<Fom>& handle = handles_[{server, service}];
        if (!handle)
            handle = factory_.handle_for(service);
        return handle;
    }

    void overload_scan(const std::string& server, long tick) {
        const AppServer& srv = reg_.servers.at(server);
        if (!srv.up)
            return;
        for (const std::string& service : srv.deployed) {
            OverloadShift shift = record_overload(reg_, service, server, srv.load, threshold_, tick);
            if (shift == OverloadShift::None)
                continue;
            Json j = base(tick, shift == OverloadShift::Entered ? "overload_begin" : "overload_end");
            j["service"] = service;
            j["server"] = server;
            j["load"] = srv.load;
            emit(j);
        }
    }

    // ---- per-tick phases -------------------------------------------------

    void poll_phase(long tick) {
        if (tick == 0 || tick % observer_.poll_interval != 0)
            return;
        std::vector<std::string> to_declare;
        for (const auto& [name, srv] : reg_.servers) {
            if (srv.up) {
                observer_.misses[name] = 0;
                continue;
            }
            if (declared_.count(name))
                continue;
            if (++observer_.misses[name] >= observer_.miss_threshold)
                to_declare.push_back(name);
        }
        for (const std::string& name : to_declare)
            declare_failure(name, tick);
    }

    void declare_failure(const std::string& server, long tick) {
        declared_.insert(server);
        AppServer& srv = reg_.servers.at(server);
        Json j = base(tick, "failure_declared");
        j["server"] = server;
        j["services"] = Json::array();
        for (const std::string& service : srv.deployed)
            j["services"].push_back(service);
        emit(j);
        for (const std::string& service : srv.deployed)
            history_transition(reg_.histories[{service, server}], tick, ServiceState::Down);

        std::vector<std::string> stranded;
        for (const auto& [session, assigned] : reg_.assignments)
            if (assigned == server)
                stranded.push_back(session);
        for (const std::string& session : stranded)
            failover_session(session, server, tick);
    }

    /// Moves one session off a declared-failed server and, when a call was
    /// interrupted, re-invokes it with the same session id.
    void failover_session(const std::string& session, const std::string& from, long tick) {
        auto pending_it = pending_.find(session);
        const std::string service =
            pending_it != pending_.end() ? pending_it->second.service : session_service_[session];
        reg_.assignments.erase(session);
        Assignment assignment;
        try {
            assignment = assign_client(reg_, session, service, scn_.capacity, tick);
        } catch (const SvcError& e) {
            if (e.code() != Err::NoServerError)
                throw;
            Json j = base(tick, "availability_gap");
            j["session"] = session;
            j["service"] = service;
            emit(j);
            if (pending_it == pending_.end()) {
                // idle session: park it for a later retry
                PendingCall call;
                call.resume = false;
                call.service = service;
                call.method.clear(); // nothing to run; assignment only
                pending_[session] = std::move(call);
            } else {
                pending_it->second.from_server = from;
            }
            return;
        }
        if (assignment.newly_deployed)
            emit_service_started(service, assignment.server, tick);
        Json j = base(tick, "session_reassigned");
        j["session"] = session;
        j["service"] = service;
        j["from"] = from;
        j["to"] = assignment.server;
        emit(j);
        if (pending_it != pending_.end() && pending_it->second.resume) {
            PendingCall call = std::move(pending_it->second);
            pending_.erase(pending_it);
            resume_now(session, call, assignment.server, tick);
        }
    }

    void emit_service_started(const std::string& service, const std::string& server, long tick) {
        Json j = base(tick, "service_started");
        j["service"] = service;
        j["server"] = server;
        emit(j);
    }

    /// Re-issued call after failover: completes immediately against the
    /// surviving store; the fresh handle is the restarted process.
    void resume_now(const std::string& session, const PendingCall& call, const std::string& server, long tick) {
        const ScenarioUnit& su = unit_for(call.service, 0);
        std::shared_ptr<Fom> fom = ensure_handle(server, call.service);
        InvokeOutcome outcome = invoke(su.unit, su.registry, fom, session, call.method, call.args);
        Json j = base(tick, "session_resumed");
        j["session"] = session;
        j["service"] = call.service;
        j["server"] = server;
        j["value"] = to_display(outcome.return_value);
        j["transcript"] = outcome.transcript;
        emit(j);
    }

    void completion_phase(long tick) {
        std::vector<InFlight> due;
        for (auto it = in_flight_.begin(); it != in_flight_.end();) {
            if (it->completion_tick == tick) {
                due.push_back(std::move(*it));
                it = in_flight_.erase(it);
            } else {
                ++it;
            }
        }
        for (const InFlight& f : due) {
            const ScenarioUnit& su = unit_for(f.service, 0);
            std::shared_ptr<Fom> fom = ensure_handle(f.server, f.service);
            InvokeOutcome outcome = invoke(su.unit, su.registry, fom, f.session, f.method, f.args);
            Json j = base(tick, "invoke_complete");
            j["session"] = f.session;
            j["service"] = f.service;
            j["server"] = f.server;
            j["value"] = to_display(outcome.return_value);
            j["transcript"] = outcome.transcript;
            emit(j);
            AppServer& srv = reg_.servers.at(f.server);
            srv.load -= 1;
            overload_scan(f.server, tick);
        }
    }

    void apply_event(const ScenarioEvent& ev, long tick) {
        switch (ev.action) {
        case ScenarioEvent::Action::StartServer: {
            if (reg_.servers.count(ev.server))
                scenario_error(ev.line_no, "server '" + ev.server + "' already exists");
            reg_.servers[ev.server] = AppServer{ev.server, true, {}, 0};
            Json j = base(tick, "start_server");
            j["server"] = ev.server;
            emit(j);
            return;
        }
        case ScenarioEvent::Action::Deploy: {
            auto srv_it = reg_.servers.find(ev.server);
            if (srv_it == reg_.servers.end())
                fail(Err::DeployError, "scenario line " + std::to_string(ev.line_no) + ": unknown server '" +
                                           ev.server + "'");
            if (!srv_it->second.up)
                fail(Err::DeployError, "scenario line " + std::to_string(ev.line_no) + ": server '" +
                                           ev.server + "' is down");
            if (!units_.count(ev.service))
                fail(Err::DeployError, "scenario line " + std::to_string(ev.line_no) + ": unknown service '" +
                                           ev.service + "'");
            if (srv_it->second.deployed.insert(ev.service).second) {
                reg_.services[ev.service].insert(ev.server);
                history_transition(reg_.histories[{ev.service, ev.server}], tick, ServiceState::Up);
            }
            Json j = base(tick, "deploy");
            j["service"] = ev.service;
            j["server"] = ev.server;
            emit(j);
            return;
        }
        case ScenarioEvent::Action::Invoke:
            start_client_call(ev, tick);
            return;
        case ScenarioEvent::Action::CrashServer:
            crash_server(ev, tick);
            return;
        case ScenarioEvent::Action::RecoverServer:
            recover_server(ev, tick);
            return;
        case ScenarioEvent::Action::SetLoadThreshold: {
            threshold_ = ev.threshold;
            Json j = base(tick, "set_load_threshold");
            j["threshold"] = ev.threshold;
            emit(j);
            for (const auto& [name, srv] : reg_.servers)
                overload_scan(name, tick);
            return;
        }
        }
    }

    void start_client_call(const ScenarioEvent& ev, long tick) {
        unit_for(ev.service, ev.line_no);
        if (pending_.count(ev.session))
            scenario_error(ev.line_no, "session '" + ev.session + "' has an unfinished call");
        for (const InFlight& f : in_flight_)
            if (f.session == ev.session)
                scenario_error(ev.line_no, "session '" + ev.session + "' has an unfinished call");
        session_service_[ev.session] = ev.service;

        std::string server = current_valid_server(ev.session, ev.service);
        if (server.empty()) {
            reg_.assignments.erase(ev.session);
            try {
                Assignment assignment = assign_client(reg_, ev.session, ev.service, scn_.capacity, tick);
                if (assignment.newly_deployed)
                    emit_service_started(ev.service, assignment.server, tick);
                server = assignment.server;
            } catch (const SvcError& e) {
                if (e.code() != Err::NoServerError)
                    throw;
                Json j = base(tick, "availability_gap");
                j["session"] = ev.session;
                j["service"] = ev.service;
                emit(j);
                PendingCall call;
                call.resume = false;
                call.service = ev.service;
                call.method = ev.method;
                call.args = ev.args;
                call.plan = ev.plan;
                call.duration = ev.duration;
                pending_[ev.session] = std::move(call);
                return;
            }
        }
        begin_invocation(ev.session, ev.service, ev.method, ev.args, ev.plan, ev.duration, server, tick);
    }

    /// The session's current server, when it is usable for this call.
    std::string current_valid_server(const std::string& session, const std::string& service) {
        auto it = reg_.assignments.find(session);
        if (it == reg_.assignments.end())
            return "";
        auto srv_it = reg_.servers.find(it->second);
        if (srv_it == reg_.servers.end() || !srv_it->second.up || !srv_it->second.deployed.count(service) ||
            srv_it->second.load >= scn_.capacity)
            return "";
        return it->second;
    }

    void begin_invocation(const std::string& session, const std::string& service, const std::string& method,
                          const std::vector<Value>& args, const CrashPlan& plan, long duration,
                          const std::string& server, long tick) {
        AppServer& srv = reg_.servers.at(server);
        srv.load += 1;
        InFlight f;
        f.session = session;
        f.service = service;
        f.method = method;
        f.server = server;
        f.args = args;
        f.plan = plan;
        f.completion_tick = tick + duration;
        in_flight_.push_back(std::move(f));
        Json j = base(tick, "invoke_start");
        j["session"] = session;
        j["service"] = service;
        j["method"] = method;
        j["server"] = server;
        j["load"] = srv.load;
        emit(j);
        overload_scan(server, tick);
    }

    void crash_server(const ScenarioEvent& ev, long tick) {
        auto it = reg_.servers.find(ev.server);
        if (it == reg_.servers.end())
            scenario_error(ev.line_no, "unknown server '" + ev.server + "'");
        if (!it->second.up)
            scenario_error(ev.line_no, "server '" + ev.server + "' is already down");
        it->second.up = false;
        Json j = base(tick, "server_crash");
        j["server"] = ev.server;
        emit(j);

        // The dying process runs each in-flight call up to its crash point;
        // whatever it stored through its FOM handle is what survives.
        std::vector<InFlight> interrupted;
        for (auto fit = in_flight_.begin(); fit != in_flight_.end();) {
            if (fit->server == ev.server) {
                interrupted.push_back(std::move(*fit));
                fit = in_flight_.erase(fit);
            } else {
                ++fit;
            }
        }
        for (const InFlight& f : interrupted) {
            const ScenarioUnit& su = unit_for(f.service, ev.line_no);
            std::shared_ptr<Fom> fom = ensure_handle(f.server, f.service);
            InvokeOutcome outcome = invoke(su.unit, su.registry, fom, f.session, f.method, f.args, f.plan);
            if (outcome.crashed()) {
                Json ij = base(tick, "invoke_interrupted");
                ij["session"] = f.session;
                ij["service"] = f.service;
                ij["server"] = f.server;
                emit(ij);
                PendingCall call;
                call.resume = true;
                call.service = f.service;
                call.method = f.method;
                call.args = f.args;
                call.from_server = f.server;
                pending_[f.session] = std::move(call);
            } else {
                // the injected fault never fired: the call finished just
                // before the server went down
                Json cj = base(tick, "invoke_complete");
                cj["session"] = f.session;
                cj["service"] = f.service;
                cj["server"] = f.server;
                cj["value"] = to_display(outcome.return_value);
                cj["transcript"] = outcome.transcript;
                emit(cj);
            }
        }
        it->second.load = 0;
        std::erase_if(handles_, [&ev](const auto& kv) { return kv.first.first == ev.server; });
        observer_.misses[ev.server] = 0;
    }

    void recover_server(const ScenarioEvent& ev, long tick) {
        auto it = reg_.servers.find(ev.server);
        if (it == reg_.servers.end())
            scenario_error(ev.line_no, "unknown server '" + ev.server + "'");
        if (it->second.up)
            scenario_error(ev.line_no, "server '" + ev.server + "' is already up");
        it->second.up = true;
        declared_.erase(ev.server);
        observer_.misses[ev.server] = 0;
        Json j = base(tick, "recover_server");
        j["server"] = ev.server;
        j["services"] = Json::array();
        for (const std::string& service : it->second.deployed)
            j["services"].push_back(service);
        emit(j);
        for (const std::string& service : it->second.deployed)
            history_transition(reg_.histories[{service, ev.server}], tick, ServiceState::Up);
        overload_scan(ev.server, tick); // load reset to 0 while down
    }

    void retry_phase(long tick) {
        if (pending_.empty())
            return;
        std::vector<std::string> sessions;
        for (const auto& [session, call] : pending_)
            sessions.push_back(session);
        for (const std::string& session : sessions) {
            PendingCall& call = pending_.at(session);
            // A session still assigned is waiting on the observer: its server
            // died but has not been declared failed yet. The admin reassigns
            // only at declaration (failover_session), never here.
            if (reg_.assignments.count(session))
                continue;
            Assignment assignment;
            try {
                assignment = assign_client(reg_, session, call.service, scn_.capacity, tick);
            } catch (const SvcError& e) {
                if (e.code() != Err::NoServerError)
                    throw;
                continue; // the gap was traced when it opened; retry quietly
            }
            if (assignment.newly_deployed)
                emit_service_started(call.service, assignment.server, tick);
            if (call.resume) {
                Json j = base(tick, "session_reassigned");
                j["session"] = session;
                j["service"] = call.service;
                j["from"] = call.from_server;
                j["to"] = assignment.server;
                emit(j);
                PendingCall done = std::move(call);
                pending_.erase(session);
                resume_now(session, done, assignment.server, tick);
            } else if (call.method.empty()) {
                // idle session that only needed a new home
                Json j = base(tick, "session_reassigned");
                j["session"] = session;
                j["service"] = call.service;
                j["from"] = call.from_server;
                j["to"] = assignment.server;
                emit(j);
                pending_.erase(session);
            } else {
                PendingCall done = std::move(call);
                pending_.erase(session);
                begin_invocation(session, done.service, done.method, done.args, done.plan, done.duration,
                                 assignment.server, tick);
            }
        }
    }

    const Scenario& scn_;
    const std::map<std::string, ScenarioUnit>& units_;
    FomFactory factory_;
    AdminRegistry reg_;
    ObserverState observer_;
    int threshold_ = 10;
    std::vector<InFlight> in_flight_;                       // start order
    std::map<std::string, PendingCall> pending_;            // session-sorted
    std::map<std::string, std::string> session_service_;    // session → last service
    std::map<PairKey, std::shared_ptr<Fom>> handles_;       // (server, service) → live process handle
    std::set<std::string> declared_;                        // declared failed, not yet recovered
    std::string trace_;
};

} // namespace

SimulationResult run_scenario(const Scenario& scenario, const std::map<std::string, ScenarioUnit>& units,
                              const FomConfig& config) {
    return Sim(scenario, units, config).run();
}

std::string format_history(const AvailabilityHistory& history, HistoryFormat format) {
    std::string out;
    for (const Interval& iv : history.intervals) {
        if (format == HistoryFormat::Csv) {
            out += std::to_string(iv.start) + ",";
            if (iv.end)
                out += std::to_string(*iv.end);
            out += std::string(",") + service_state_name(iv.state) + "\n";
        } else {
            Json j;
            j["start"] = iv.start;
            j["end"] = iv.end ? Json(*iv.end) : Json(nullptr);
            j["state"] = service_state_name(iv.state);
            out += j.dump() + "\n";
        }
    }
    return out;
}

std::string export_history(const AdminRegistry& registry, const std::string& service,
                           const std::string& server, HistoryFormat format) {
    auto it = registry.histories.find({service, server});
    if (it == registry.histories.end())
        fail(Err::UnknownPairError,
             "no availability history for service '" + service + "' on server '" + server + "'");
    return format_history(it->second, format);
}

HistoryMap histories_from_trace(const std::string& trace) {
    HistoryMap map;
    int line_no = 0;
    for (const std::string& line : split_lines(trace)) {
        ++line_no;
        if (line.empty())
            continue;
        Json j = Json::parse(line, nullptr, false);
        if (j.is_discarded())
            fail(Err::SerializationError, "trace line " + std::to_string(line_no) + " is not valid JSON");
        if (!j.contains("event") || !j.contains("tick"))
            continue;
        const std::string event = j["event"].get<std::string>();
        long tick = j["tick"].get<long>();
        auto pair_of = [&j]() -> PairKey {
            return {j["service"].get<std::string>(), j["server"].get<std::string>()};
        };
        if (event == "deploy" || event == "service_started") {
            history_transition(map[pair_of()], tick, ServiceState::Up);
        } else if (event == "failure_declared") {
            for (const auto& service : j["services"])
                history_transition(map[{service.get<std::string>(), j["server"].get<std::string>()}], tick,
                                   ServiceState::Down);
        } else if (event == "recover_server") {
            for (const auto& service : j["services"])
                history_transition(map[{service.get<std::string>(), j["server"].get<std::string>()}], tick,
                                   ServiceState::Up);
        } else if (event == "overload_begin") {
            history_transition(map[pair_of()], tick, ServiceState::Overload);
        } else if (event == "overload_end") {
            history_transition(map[pair_of()], tick, ServiceState::Up);
        }
    }
    return map;
}

} // namespace svcfo
