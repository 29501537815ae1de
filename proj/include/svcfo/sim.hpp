#pragma once

#include "svcfo/ast.hpp"
#include "svcfo/fom.hpp"
#include "svcfo/interp.hpp"
#include "svcfo/transform.hpp"
#include "svcfo/value.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace svcfo {

struct AppServer {
    std::string name;
    bool up = true;
    std::set<std::string> deployed;
    int load = 0; // active invocations
};

struct ObserverState {
    int poll_interval = 5;
    int miss_threshold = 2;
    std::map<std::string, int> misses; // consecutive missed polls per server
};

enum class ServiceState { Up, Down, Overload };
const char* service_state_name(ServiceState state);

struct Interval {
    long start = 0;
    std::optional<long> end; // open while the state persists
    ServiceState state = ServiceState::Up;
};

/// Fig-2-style availability record for one (service, server) pair.
struct AvailabilityHistory {
    std::vector<Interval> intervals; // contiguous; adjacent states differ
};

using PairKey = std::pair<std::string, std::string>; // (service, server)
using HistoryMap = std::map<PairKey, AvailabilityHistory>;

struct AdminRegistry {
    std::map<std::string, AppServer> servers;
    std::map<std::string, std::set<std::string>> services; // service → hosting servers
    std::map<std::string, std::string> assignments;        // session → server
    HistoryMap histories;
};

/// Closes the pair's open interval and starts a new one when `state` differs;
/// opens the first interval for a fresh pair.
void history_transition(AvailabilityHistory& history, long tick, ServiceState state);

struct ScenarioEvent {
    enum class Action { StartServer, Deploy, Invoke, CrashServer, RecoverServer, SetLoadThreshold };

    long tick = 0;
    Action action = Action::StartServer;
    std::string server;
    std::string service;
    std::string session;
    std::string method;
    std::vector<Value> args;
    CrashPlan plan;    // invoke: where execution stands if the server dies mid-call
    long duration = 10; // invoke: ticks until completion
    int threshold = 0; // set-load-threshold
    int line_no = 0;
};

struct Scenario {
    int poll_interval = 5;
    int miss_threshold = 2;
    int capacity = 100;
    int load_threshold = 10;
    std::vector<ScenarioEvent> events; // (tick, file order)
};

/// Line format: `at <tick> <action> <args…>` plus the header directives
/// `observer poll <p> miss <m>`, `capacity <n>`, `load-threshold <n>`.
Scenario parse_scenario(const std::string& text);

struct Assignment {
    std::string server;
    bool newly_deployed = false; // the service had to be started here first
};

/// Least-loaded Up server hosting the service (ties: smallest name); falls
/// back to starting the service on the least-loaded Up server with room.
/// Records the assignment and any auto-deploy. NoServerError when impossible.
Assignment assign_client(AdminRegistry& registry, const std::string& session_id,
                         const std::string& service, int capacity, long tick);

enum class OverloadShift { None, Entered, Left };

/// Applies the load rule to one pair's history: above threshold opens an
/// OVERLOAD interval, at-or-below reverts to UP. DOWN pairs are untouched.
OverloadShift record_overload(AdminRegistry& registry, const std::string& service,
                              const std::string& server, int load, int threshold, long tick);

struct ScenarioUnit {
    AsltTree unit; // transformed
    MethodRegistry registry;
};

struct SimulationResult {
    std::string trace; // JSON lines, one event per line
    AdminRegistry registry;
};

/// Runs the scenario on a logical clock. Per tick: observer polls, then due
/// completions, then the tick's events in file order, then pending-session
/// retries. Deterministic: identical inputs give byte-identical traces.
SimulationResult run_scenario(const Scenario& scenario, const std::map<std::string, ScenarioUnit>& units,
                              const FomConfig& config);

enum class HistoryFormat { Csv, Jsonl };

std::string format_history(const AvailabilityHistory& history, HistoryFormat format);

/// One pair's history as CSV rows `start,end,state` (end empty while open)
/// or JSON lines. UnknownPairError when the pair has no history.
std::string export_history(const AdminRegistry& registry, const std::string& service,
                           const std::string& server, HistoryFormat format);

/// Rebuilds every pair's history from a trace by replaying its deploy,
/// failure, recovery, and overload events.
HistoryMap histories_from_trace(const std::string& trace);

} // namespace svcfo
