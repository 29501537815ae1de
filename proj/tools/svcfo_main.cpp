#include "svcfo/errors.hpp"
#include "svcfo/fom.hpp"
#include "svcfo/interp.hpp"
#include "svcfo/parser.hpp"
#include "svcfo/printer.hpp"
#include "svcfo/sim.hpp"
#include "svcfo/transform.hpp"
#include "svcfo/util.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <set>

namespace fs = std::filesystem;
using namespace svcfo;

namespace {

std::string plural(std::size_t n, const char* word) {
    std::string out = std::to_string(n) + " " + word;
    if (n != 1)
        out += "s";
    return out;
}

/// FlightBooking.fo.svc → FlightBooking; the unit file names the service.
std::string service_from_path(const std::string& path) {
    std::string name = fs::path(path).filename().string();
    for (const char* suffix : {".fo.svc", ".svc"}) {
        std::string_view sv(suffix);
        if (name.size() > sv.size() && name.ends_with(sv)) {
            name.resize(name.size() - sv.size());
            break;
        }
    }
    return name;
}

std::string sibling_with_suffix(const std::string& path, const std::string& suffix) {
    fs::path p(path);
    std::string name = p.filename().string();
    for (const char* old_suffix : {".fo.svc", ".svc"}) {
        std::string_view sv(old_suffix);
        if (name.size() > sv.size() && name.ends_with(sv)) {
            name.resize(name.size() - sv.size());
            break;
        }
    }
    return (p.parent_path() / (name + suffix)).string();
}

struct TransformArgs {
    std::string input;
    std::string output;
};

int cmd_transform(const TransformArgs& a) {
    AsltTree tree = code_to_aslt(read_file(a.input));
    TransformResult result = transform_unit(tree);

    std::string out_path = a.output.empty() ? sibling_with_suffix(a.input, ".fo.svc") : a.output;
    std::string reg_path = sibling_with_suffix(out_path, ".fopreg");
    write_file_atomic(out_path, aslt_to_code(result.tree));
    write_file_atomic(reg_path, emit_registry(result.registry));

    std::size_t fops = 0;
    for (const MethodInfo& m : result.registry.methods)
        fops += static_cast<std::size_t>(m.fop_total);
    std::cout << plural(result.registry.methods.size(), "method") << ", " << plural(fops, "FOP") << "\n";
    std::cout << "wrote " << out_path << " and " << reg_path << "\n";
    return 0;
}

struct RunArgs {
    std::string unit;
    std::string entry;
    std::vector<std::string> args;
    std::string session = "default";
    std::string config;
    std::string crash_plan;
    bool resume = false;
};

int cmd_run(const RunArgs& a) {
    AsltTree tree = code_to_aslt(read_file(a.unit));
    MethodRegistry registry;
    std::shared_ptr<Fom> fom;
    std::unique_ptr<FomFactory> factory;
    if (!a.config.empty()) {
        registry = parse_registry(read_file(sibling_with_suffix(a.unit, ".fopreg")));
        MethodRegistry actual = scan_methods(tree);
        for (const MethodInfo& m : registry.methods)
            if (!actual.find(m.name))
                fail(Err::SerializationError,
                     "registry lists method '" + m.name + "' which the unit does not define");
        factory = std::make_unique<FomFactory>(parse_fom_config(read_file(a.config)));
        fom = factory->handle_for(service_from_path(a.unit));
        if (!a.resume)
            fom->clear_session(a.session); // a fresh run owns the whole session
    } else {
        registry = scan_methods(tree);
    }

    std::vector<Value> args;
    for (const std::string& literal : a.args)
        args.push_back(parse_value_literal(literal));
    CrashPlan plan;
    if (!a.crash_plan.empty())
        plan = parse_crash_plan(read_file(a.crash_plan));

    InvokeOutcome outcome = invoke(tree, registry, fom, a.session, a.entry, args, plan);
    for (const std::string& line : outcome.transcript)
        std::cout << line << "\n";
    if (outcome.crashed()) {
        std::cerr << "crash injected; rerun with --resume to continue session '" << a.session << "'\n";
        return 3;
    }
    std::cout << "=> " << to_display(outcome.return_value) << "\n";
    return 0;
}

struct SimulateArgs {
    std::string scenario;
    std::string units_dir;
    std::string config;
    std::string trace_out;
    std::string history_out;
};

ScenarioUnit load_unit(const fs::path& dir, const std::string& service) {
    fs::path transformed = dir / (service + ".fo.svc");
    fs::path source = dir / (service + ".svc");
    ScenarioUnit su;
    if (fs::exists(transformed)) {
        su.unit = code_to_aslt(read_file(transformed.string()));
        su.registry = parse_registry(read_file((dir / (service + ".fopreg")).string()));
    } else if (fs::exists(source)) {
        TransformResult result = transform_unit(code_to_aslt(read_file(source.string())));
        su.unit = std::move(result.tree);
        su.registry = std::move(result.registry);
    } else {
        fail(Err::IoError, "no unit for service '" + service + "': tried " + transformed.string() +
                               " and " + source.string());
    }
    return su;
}

int cmd_simulate(const SimulateArgs& a) {
    Scenario scn = parse_scenario(read_file(a.scenario));

    std::set<std::string> service_names;
    for (const ScenarioEvent& ev : scn.events)
        if (ev.action == ScenarioEvent::Action::Deploy || ev.action == ScenarioEvent::Action::Invoke)
            service_names.insert(ev.service);
    std::map<std::string, ScenarioUnit> units;
    for (const std::string& service : service_names)
        units.emplace(service, load_unit(a.units_dir, service));

    FomConfig config;
    if (!a.config.empty())
        config = parse_fom_config(read_file(a.config));
    else
        config.rules.push_back({"*", Backend::Memory, ""});

    SimulationResult result = run_scenario(scn, units, config);
    if (a.trace_out.empty())
        std::cout << result.trace;
    else
        write_file_atomic(a.trace_out, result.trace);

    if (!a.history_out.empty()) {
        std::string csv;
        for (const auto& [pair, history] : result.registry.histories)
            for (const Interval& iv : history.intervals) {
                csv += pair.first + "," + pair.second + "," + std::to_string(iv.start) + ",";
                if (iv.end)
                    csv += std::to_string(*iv.end);
                csv += std::string(",") + service_state_name(iv.state) + "\n";
            }
        write_file_atomic(a.history_out, csv);
    }
    return 0;
}

struct HistoryArgs {
    std::string trace;
    std::string service;
    std::string server;
    std::string format = "csv";
    std::string output;
};

int cmd_history(const HistoryArgs& a) {
    AdminRegistry registry;
    registry.histories = histories_from_trace(read_file(a.trace));
    HistoryFormat fmt = a.format == "jsonl" ? HistoryFormat::Jsonl : HistoryFormat::Csv;
    std::string text = export_history(registry, a.service, a.server, fmt);
    if (a.output.empty())
        std::cout << text;
    else
        write_file_atomic(a.output, text);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Failover toolkit for SvcLang services: transform sources, run with "
                 "crash plans, simulate clusters, export availability histories."};
    app.require_subcommand(1);

    TransformArgs ta;
    CLI::App* t = app.add_subcommand("transform", "Rewrite failover meta-comments into guard code");
    t->add_option("input", ta.input, "source unit (.svc)")->required();
    t->add_option("-o,--output", ta.output, "transformed unit path (default: <input>.fo.svc)");

    RunArgs ra;
    CLI::App* r = app.add_subcommand("run", "Invoke a method of a service unit");
    r->add_option("unit", ra.unit, "service unit to execute")->required();
    r->add_option("--entry", ra.entry, "method to invoke")->required();
    r->add_option("--args", ra.args, "argument literals for the entry method");
    r->add_option("--session", ra.session, "session id (default: 'default')");
    r->add_option("--config", ra.config, "failover config XML; omit to run without failover");
    r->add_option("--crash-plan", ra.crash_plan, "fault-injection plan: 'crash <label> <occurrence>' lines");
    r->add_flag("--resume", ra.resume, "continue from the session's persisted state");

    SimulateArgs sa;
    CLI::App* s = app.add_subcommand("simulate", "Run a cluster scenario on a logical clock");
    s->add_option("scenario", sa.scenario, "scenario file")->required();
    s->add_option("--units", sa.units_dir, "directory with <Service>.fo.svc/.fopreg or <Service>.svc")
        ->required();
    s->add_option("--config", sa.config, "failover config XML (default: in-memory for all services)");
    s->add_option("--trace", sa.trace_out, "write the JSON-lines trace here instead of stdout");
    s->add_option("--history", sa.history_out, "write all availability intervals as CSV here");

    HistoryArgs ha;
    CLI::App* h = app.add_subcommand("history", "Extract one pair's availability history from a trace");
    h->add_option("trace", ha.trace, "trace file produced by simulate")->required();
    h->add_option("--service", ha.service, "service name")->required();
    h->add_option("--server", ha.server, "server name")->required();
    h->add_option("--format", ha.format, "csv or jsonl (default: csv)")
        ->check(CLI::IsMember({"csv", "jsonl"}));
    h->add_option("-o,--output", ha.output, "write here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0)
            return app.exit(e); // --help and friends
        std::cerr << e.what() << "\n\n" << app.help();
        return 2;
    }

    try {
        if (t->parsed())
            return cmd_transform(ta);
        if (r->parsed())
            return cmd_run(ra);
        if (s->parsed())
            return cmd_simulate(sa);
        return cmd_history(ha);
    } catch (const SvcError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
