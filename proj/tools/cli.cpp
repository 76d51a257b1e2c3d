#include "cli.hpp"

#include "ede/connector/client.hpp"
#include "ede/connector/node.hpp"
#include "ede/connector/server.hpp"
#include "ede/energy/fixtures.hpp"
#include "ede/energy/scenario.hpp"
#include "ede/error.hpp"
#include "ede/federation/federation.hpp"
#include "ede/mapping/mapping.hpp"
#include "ede/pipeline/pipeline.hpp"
#include "ede/rdf/ntriples.hpp"
#include "ede/shapes/shapes.hpp"
#include "ede/sparql/evaluator.hpp"
#include "ede/sparql/parser.hpp"
#include "ede/sparql/results.hpp"
#include "ede/util/files.hpp"

#include <CLI11.hpp>
#include <fmt/core.h>

#include <csignal>
#include <ostream>

namespace ede::cli {

namespace fs = std::filesystem;

namespace {

rdf::Graph read_graph(const std::string& path) { return rdf::parse_ntriples(util::read_file(path)); }

void warn_unbound(const sparql::Query& query, std::ostream& err) {
    for (const auto& name : query.unbound_projection()) {
        err << "warning: projected variable ?" << name << " is not bound by any pattern\n";
    }
}

int rdfize(const std::string& mapping_path, const std::vector<std::string>& inputs, const std::string& output,
           std::ostream& out, std::ostream& err) {
    auto doc = mapping::parse_mapping(util::read_file(mapping_path));
    mapping::MappingResult result;
    if (inputs.empty()) {
        result = mapping::apply_mapping(doc, mapping::load_sources(doc, fs::path(mapping_path).parent_path()));
    } else if (inputs.size() == 1) {
        auto format = mapping::format_from_name(fs::path(inputs[0]).extension().string().substr(1));
        auto table = mapping::read_records(inputs[0], format.value_or(mapping::SourceFormat::Csv));
        for (std::size_t m = 0; m < doc.maps.size(); ++m) {
            if (!table.header.empty()) mapping::check_fields(doc.maps[m], m, table.header);
        }
        result = mapping::apply_mapping(doc, table.records);
    } else {
        // Several inputs: each map reads the input whose file name matches its source path.
        std::map<std::string, std::vector<mapping::RawRecord>> by_source;
        for (std::size_t m = 0; m < doc.maps.size(); ++m) {
            const auto& map = doc.maps[m];
            auto wanted = fs::path(map.source.path).filename();
            auto it = std::find_if(inputs.begin(), inputs.end(),
                                   [&](const std::string& in) { return fs::path(in).filename() == wanted; });
            if (it == inputs.end()) {
                throw ConfigError(fmt::format("maps[{}].source", m), "no --input named " + wanted.string());
            }
            auto table = mapping::read_records(*it, map.source.format);
            if (!table.header.empty()) mapping::check_fields(map, m, table.header);
            by_source[map.source.name] = std::move(table.records);
        }
        result = mapping::apply_mapping(doc, by_source);
    }
    for (const auto& e : result.errors) {
        err << fmt::format("warning: maps[{}] record {}: {}\n", e.map_index, e.record_index, e.message);
    }
    auto text = rdf::serialize_ntriples(result.graph);
    if (output.empty()) {
        out << text;
    } else {
        util::write_file(output, text);
        nlohmann::ordered_json summary{{"output", output}, {"triples", result.graph.size()}, {"recordErrors", result.errors.size()}};
        out << summary.dump() << "\n";
    }
    return kOk;
}

int validate(const std::string& graph_path, const std::string& shapes_path, const std::string& report_path,
             std::ostream& out, std::ostream& err) {
    auto graph = read_graph(graph_path);
    auto report = shapes::validate(graph, shapes::parse_shapes(util::read_file(shapes_path)));
    auto json = shapes::report_to_json(report);
    if (!report_path.empty()) util::write_file(report_path, json);
    out << json;
    if (!json.empty() && json.back() != '\n') out << "\n";
    if (!report.conforms()) {
        err << report.violations.size() << " violation(s)\n";
        return kDomainFailure;
    }
    return kOk;
}

int run_pipeline(const std::string& config_path, std::ostream& out, std::ostream& err) {
    auto report = pipeline::run_pipeline(pipeline::load_pipeline_config(config_path));
    out << pipeline::report_to_json(report).dump(2) << "\n";
    if (report.aborted_stage) {
        err << "aborted in stage " << *report.aborted_stage << ": " << report.error << "\n";
        return kDomainFailure;
    }
    if (!report.load_note.empty()) err << report.load_note << "\n";
    return report.loaded ? kOk : kDomainFailure;
}

int serve(const std::string& config_path, const std::string& listen, std::ostream& out, std::ostream& err) {
    auto config = connector::load_node_config(config_path);
    if (!listen.empty()) config.listen = listen;

    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    auto node = connector::Node::from_config(config);
    connector::Server server(*node, config.listen);
    server.start();
    out << server.endpoint() << std::endl;
    err << "node " << config.id << " serving " << node->snapshot()->size() << " triples on " << server.endpoint()
        << "\n";
    int received = 0;
    sigwait(&signals, &received);
    server.stop();
    err << "stopped after " << node->provenance().size() << " request(s)\n";
    return kOk;
}

int query(const std::string& graph_path, const std::string& query_path, std::ostream& out, std::ostream& err) {
    auto parsed = sparql::parse_query(util::read_file(query_path));
    warn_unbound(parsed, err);
    auto graph = read_graph(graph_path);
    out << sparql::serialize_results(sparql::evaluate(parsed, graph));
    return kOk;
}

int federate(const std::string& catalog_path, const std::string& query_path, bool explain, int timeout_ms,
             std::ostream& out, std::ostream& err) {
    auto catalog = federation::parse_catalog(util::read_file(catalog_path));
    auto parsed = sparql::parse_query(util::read_file(query_path));
    warn_unbound(parsed, err);
    auto plan = federation::decompose(parsed, federation::select_sources(parsed, catalog));
    if (explain) {
        out << federation::plan_to_json(plan).dump(2) << "\n";
        return kOk;
    }
    auto factory = connector::tcp_client_factory(catalog.consumer, std::chrono::milliseconds(timeout_ms));
    federation::ClientMap clients;
    for (const auto& sub : plan.subqueries) {
        for (const auto& id : sub.sources) {
            if (!clients.count(id)) clients[id] = factory(*catalog.find(id));
        }
    }
    out << sparql::serialize_results(federation::execute_federated(plan, clients));
    return kOk;
}

int scenario(const std::string& script_path, const std::string& nodes_path, const std::string& transcript_path,
             bool configured_ports, std::ostream& out, std::ostream& err) {
    auto script = energy::load_scenario(script_path);
    for (const auto& tag : script.missing_tags()) err << "warning: no step covers " << tag << "\n";
    energy::NodeNetwork network(energy::load_node_list(nodes_path), !configured_ports);
    auto nodes = network.handles();
    auto transcript = energy::run_scenario(script, nodes);
    auto problems = energy::verify_transcript(transcript, nodes);
    network.stop();
    auto lines = energy::transcript_to_jsonl(transcript);
    if (!transcript_path.empty()) util::write_file(transcript_path, lines);
    out << lines;
    for (const auto& p : problems) err << "provenance check: " << p << "\n";
    if (!transcript.ok()) {
        err << "scenario failed at " << transcript.failure << "\n";
        return kDomainFailure;
    }
    err << transcript.entries.size() << " step(s) completed\n";
    return problems.empty() ? kOk : kDomainFailure;
}

int fixtures(std::uint64_t seed, const std::string& dir, std::ostream& out) {
    auto set = energy::generate_fixtures(seed);
    energy::write_fixtures(set, dir);
    nlohmann::ordered_json summary{{"seed", seed}, {"files", set.size()}, {"digest", energy::fixture_digest(set)}};
    out << summary.dump() << "\n";
    return kOk;
}

int provenance(const std::string& log_path, const std::string& node_config, std::ostream& out, std::ostream& err) {
    auto records = connector::read_provenance_log(log_path);
    for (const auto& r : records) out << connector::to_json(r).dump() << "\n";
    if (node_config.empty()) return kOk;
    auto config = connector::load_node_config(node_config);
    auto contracts = connector::parse_contracts(util::read_file(config.contracts));
    auto findings = connector::audit_log(records, contracts, {config.id, config.resource});
    for (const auto& f : findings) err << "record " << f.record_id << ": " << f.problem << "\n";
    err << records.size() << " record(s), " << findings.size() << " finding(s)\n";
    return findings.empty() ? kOk : kDomainFailure;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Energy data ecosystem toolkit: RDF mapping, validation, federation and connector nodes", "ede"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Show help for every subcommand");

    std::string mapping_path, output, graph_path, shapes_path, report_path, config_path, listen, query_path,
        catalog_path, script_path, nodes_path, transcript_path, out_dir, log_path, node_config;
    std::vector<std::string> inputs;
    bool explain = false, configured_ports = false;
    int timeout_ms = 30000;
    std::uint64_t seed = 1;

    auto* rdfize_cmd = app.add_subcommand("rdfize", "Apply a mapping document to raw records");
    rdfize_cmd->add_option("--mapping", mapping_path, "Mapping YAML")->required()->check(CLI::ExistingFile);
    rdfize_cmd->add_option("--input", inputs, "Raw CSV/JSON-lines input (repeatable; default: the mapping's sources)")
        ->check(CLI::ExistingFile);
    rdfize_cmd->add_option("--output", output, "N-Triples output (default: stdout)");

    auto* validate_cmd = app.add_subcommand("validate", "Validate a graph against shapes");
    validate_cmd->add_option("--graph", graph_path, "N-Triples graph")->required()->check(CLI::ExistingFile);
    validate_cmd->add_option("--shapes", shapes_path, "Shapes YAML")->required()->check(CLI::ExistingFile);
    validate_cmd->add_option("--report", report_path, "Also write the JSON report here");

    auto* pipeline_cmd = app.add_subcommand("pipeline", "Knowledge-graph creation pipeline");
    pipeline_cmd->require_subcommand(1);
    auto* pipeline_run = pipeline_cmd->add_subcommand("run", "Run a pipeline config");
    pipeline_run->add_option("--config", config_path, "Pipeline YAML")->required()->check(CLI::ExistingFile);

    auto* serve_cmd = app.add_subcommand("serve", "Serve a node until SIGINT/SIGTERM");
    serve_cmd->add_option("--config", config_path, "Node YAML")->required()->check(CLI::ExistingFile);
    serve_cmd->add_option("--listen", listen, "Override the configured host:port");

    auto* query_cmd = app.add_subcommand("query", "Evaluate a query over a local graph");
    query_cmd->add_option("--graph", graph_path, "N-Triples graph")->required()->check(CLI::ExistingFile);
    query_cmd->add_option("--query", query_path, "SPARQL query file")->required()->check(CLI::ExistingFile);

    auto* federate_cmd = app.add_subcommand("federate", "Evaluate a query over catalog sources");
    federate_cmd->add_option("--catalog", catalog_path, "Federation catalog YAML")->required()->check(CLI::ExistingFile);
    federate_cmd->add_option("--query", query_path, "SPARQL query file")->required()->check(CLI::ExistingFile);
    federate_cmd->add_flag("--explain", explain, "Print the decomposition plan instead of executing");
    federate_cmd->add_option("--timeout-ms", timeout_ms, "Per-source timeout")->check(CLI::PositiveNumber);

    auto* scenario_cmd = app.add_subcommand("scenario", "Multi-node scenarios");
    scenario_cmd->require_subcommand(1);
    auto* scenario_run = scenario_cmd->add_subcommand("run", "Start the nodes in-process and run a script");
    scenario_run->add_option("--script", script_path, "Scenario YAML")->required()->check(CLI::ExistingFile);
    scenario_run->add_option("--nodes", nodes_path, "Node list YAML")->required()->check(CLI::ExistingFile);
    scenario_run->add_option("--transcript", transcript_path, "Also write the JSON-lines transcript here");
    scenario_run->add_flag("--configured-ports", configured_ports, "Listen on the configured ports, not ephemeral ones");

    auto* fixtures_cmd = app.add_subcommand("fixtures", "Deterministic fixtures");
    fixtures_cmd->require_subcommand(1);
    auto* fixtures_gen = fixtures_cmd->add_subcommand("generate", "Write the fixture tree for a seed");
    fixtures_gen->add_option("--seed", seed, "Generator seed")->required();
    fixtures_gen->add_option("--out", out_dir, "Output directory")->required();

    auto* provenance_cmd = app.add_subcommand("provenance", "Provenance logs");
    provenance_cmd->require_subcommand(1);
    auto* provenance_show = provenance_cmd->add_subcommand("show", "Print a node's provenance log");
    provenance_show->add_option("--log", log_path, "JSON-lines log")->required()->check(CLI::ExistingFile);
    provenance_show->add_option("--audit", node_config, "Audit against this node config's contracts")
        ->check(CLI::ExistingFile);

    std::vector<std::string> argv_store{"ede"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& a : argv_store) argv.push_back(a.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n";
        const CLI::App* failing = &app;
        for (auto* sub : app.get_subcommands()) {
            failing = sub;
            if (!sub->get_subcommands().empty()) failing = sub->get_subcommands().front();
        }
        err << failing->help();
        return kUsage;
    }

    try {
        if (*rdfize_cmd) return rdfize(mapping_path, inputs, output, out, err);
        if (*validate_cmd) return validate(graph_path, shapes_path, report_path, out, err);
        if (*pipeline_run) return run_pipeline(config_path, out, err);
        if (*serve_cmd) return serve(config_path, listen, out, err);
        if (*query_cmd) return query(graph_path, query_path, out, err);
        if (*federate_cmd) return federate(catalog_path, query_path, explain, timeout_ms, out, err);
        if (*scenario_run) return scenario(script_path, nodes_path, transcript_path, configured_ports, out, err);
        if (*fixtures_gen) return fixtures(seed, out_dir, out);
        if (*provenance_show) return provenance(log_path, node_config, out, err);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kUsage;
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kDomainFailure;
    }
    err << app.help();
    return kUsage;
}

}  // namespace ede::cli
