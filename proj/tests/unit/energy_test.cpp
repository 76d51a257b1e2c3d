#include "ede/energy/fixtures.hpp"
#include "ede/energy/scenario.hpp"
#include "ede/energy/vocabulary.hpp"
#include "ede/error.hpp"
#include "ede/federation/federation.hpp"
#include "ede/mapping/mapping.hpp"
#include "ede/rdf/ntriples.hpp"
#include "ede/rdf/term.hpp"
#include "ede/shapes/shapes.hpp"
#include "ede/util/files.hpp"

#include <gtest/gtest.h>

#include <fmt/core.h>

#include <map>
#include <set>

using namespace ede;
using namespace ede::energy;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    auto dir = fs::temp_directory_path() / fmt::format("ede_energy_{}_{}", name, ::getpid());
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

fs::path write_seed(std::uint64_t seed, const std::string& name) {
    auto dir = scratch(name);
    write_fixtures(generate_fixtures(seed), dir);
    return dir;
}

std::multiset<std::tuple<std::string, std::string, std::string>> manifest_keys(const std::vector<SeededDefect>& m) {
    std::multiset<std::tuple<std::string, std::string, std::string>> out;
    for (const auto& d : m) out.insert({d.focus.to_ntriples(), d.constraint, d.path});
    return out;
}

std::multiset<std::tuple<std::string, std::string, std::string>> report_keys(const shapes::ValidationReport& r) {
    std::multiset<std::tuple<std::string, std::string, std::string>> out;
    for (const auto& v : r.violations) out.insert({v.focus_node.to_ntriples(), v.constraint, v.path});
    return out;
}

}  // namespace

TEST(Vocabulary, TermsAreValidIris) {
    std::set<std::string_view> seen;
    for (auto term : vocab::kTerms) {
        EXPECT_NO_THROW(rdf::Term::iri(std::string(term))) << term;
        EXPECT_TRUE(seen.insert(term).second) << term;
    }
    EXPECT_EQ(vocab::GenerationCapacity.substr(0, vocab::kEnergy.size()), vocab::kEnergy);
    EXPECT_EQ(vocab::Agreement.substr(0, vocab::kCim.size()), vocab::kCim);
}

TEST(Fixtures, SameSeedSameBytes) {
    auto a = generate_fixtures(1);
    auto b = generate_fixtures(1);
    EXPECT_EQ(a, b);
    EXPECT_EQ(fixture_digest(a), fixture_digest(b));
    EXPECT_NE(fixture_digest(a), fixture_digest(generate_fixtures(2)));
}

TEST(Fixtures, WrittenTreeMatchesInMemorySet) {
    auto dir = write_seed(1, "tree");
    auto set = generate_fixtures(1);
    for (const auto& [path, content] : set) EXPECT_EQ(util::read_file(dir / path), content) << path;
}

TEST(Fixtures, CapacityHasOneWindAndSomeCoalIn2020) {
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL, 42ULL, 1234ULL}) {
        auto table = mapping::read_csv(generate_fixtures(seed).at("nodes/tso/raw/capacity.csv"));
        std::size_t wind = 0, coal = 0, rows2020 = 0;
        std::set<std::tuple<std::string, std::string, std::string>> keys;
        for (const auto& r : table.records) {
            EXPECT_TRUE(keys.insert({*r.get("country"), *r.get("type"), *r.get("year")}).second);
            if (r.get("year") != "2020") continue;
            ++rows2020;
            wind += r.get("type") == "WindPower";
            coal += r.get("type") == "Coal";
        }
        EXPECT_EQ(wind, 1u) << seed;
        EXPECT_GE(coal, 1u) << seed;
        EXPECT_GE(rows2020, 2u);
    }
}

TEST(Fixtures, ReferenceGraphDeclaresOnlyWindRenewable) {
    auto graph = rdf::parse_ntriples(generate_fixtures(1).at("nodes/wiki/reference.nt"));
    auto matches = graph.match({std::nullopt, rdf::Term::iri(std::string(vocab::wdt_P279)),
                                rdf::Term::iri(std::string(vocab::wd_Q12705))});
    ASSERT_EQ(matches.size(), 1u);
    EXPECT_EQ(matches[0].subject.value(), std::string(vocab::productionTypeBase) + "WindPower");
}

TEST(Fixtures, ShapesMatchShippedDocument) {
    EXPECT_EQ(shapes::parse_shapes(capacity_shapes_text()).size(), 1u);
    EXPECT_EQ(shapes::parse_shapes(capacity_shapes_text())[0].properties.size(), 5u);
}

TEST(Fixtures, NodesMaterializeAndCleanDataConforms) {
    auto dir = write_seed(1, "nodes");
    auto configs = load_node_list(dir / "nodes.yaml");
    ASSERT_EQ(configs.size(), 4u);
    auto shapes = shapes::parse_shapes(util::read_file(dir / "shapes/capacity.yaml"));
    for (const auto& config : configs) {
        auto node = connector::Node::from_config(config);
        EXPECT_GT(node->snapshot()->size(), 0u) << config.id;
        EXPECT_TRUE(shapes::validate(*node->snapshot(), shapes).conforms()) << config.id;
    }
    auto contracts = connector::parse_contracts(util::read_file(dir / "contracts.yaml"));
    EXPECT_EQ(contracts.size(), 8u);
}

TEST(Fixtures, CatalogDescribesNodeGraphs) {
    auto dir = write_seed(1, "catalog");
    auto catalog = federation::parse_catalog(util::read_file(dir / "federation/catalog.yaml"));
    ASSERT_EQ(catalog.sources.size(), 2u);
    auto configs = load_node_list(dir / "nodes.yaml");
    auto tso = connector::Node::from_config(configs[0]);
    auto described = federation::describe_graph("local", *tso->snapshot());
    EXPECT_EQ(catalog.sources[0].predicates, described.predicates);
    EXPECT_EQ(catalog.sources[0].predicate_counts, described.predicate_counts);
    EXPECT_EQ(catalog.sources[0].contract, "c-tso-local");
}

TEST(Fixtures, DefectFixtureMatchesManifest) {
    auto files = generate_fixtures(1);
    auto graph = rdf::parse_ntriples(files.at("defects/capacity_defects.nt"));
    auto report = shapes::validate(graph, shapes::parse_shapes(capacity_shapes_text()));
    auto manifest = nlohmann::json::parse(files.at("defects/manifest.json"));
    ASSERT_EQ(report.violations.size(), 3u);
    ASSERT_EQ(manifest.size(), 3u);
    EXPECT_EQ(report.count(shapes::kMinCount), 1u);
    EXPECT_EQ(report.count(shapes::kDatatype), 1u);
    EXPECT_EQ(report.count(shapes::kMaxCount), 1u);
}

TEST(DefectProperty, ViolationsEqualSeedingManifest) {
    auto shapes = shapes::parse_shapes(capacity_shapes_text());
    for (std::uint64_t seed = 1; seed <= 60; ++seed) {
        auto fixture = generate_defects(seed, seed % 9);
        auto report = shapes::validate(fixture.graph, shapes);
        EXPECT_EQ(report_keys(report), manifest_keys(fixture.manifest)) << seed;
    }
    auto clean = generate_defects(5, 0);
    EXPECT_TRUE(clean.manifest.empty());
    EXPECT_TRUE(shapes::validate(clean.graph, shapes).conforms());
}

TEST(Scenario, ParsesScriptAndCoversAllRequirements) {
    auto dir = write_seed(1, "script");
    auto script = load_scenario(dir / "scenario/script.yaml");
    EXPECT_GE(script.steps.size(), 8u);
    EXPECT_TRUE(script.missing_tags().empty());
    std::size_t expected_rejections = 0;
    for (const auto& s : script.steps) expected_rejections += s.expect.has_value();
    EXPECT_EQ(expected_rejections, 1u);
}

TEST(Scenario, ParseErrors) {
    auto path_of = [](const std::string& text) {
        try {
            parse_scenario(text, "/");
        } catch (const ConfigError& e) {
            return e.path();
        }
        return std::string("<no error>");
    };
    EXPECT_EQ(path_of("steps: [{tag: RQ-1, kind: shout, sender: a}]"), "steps[0].kind");
    EXPECT_EQ(path_of("steps: [{tag: RQ-1, kind: query, sender: a, contract: c}]"), "steps[0].receiver");
    EXPECT_EQ(path_of("steps: [{tag: RQ-1, kind: query, sender: a, receiver: b, contract: c}]"), "steps[0]");
    EXPECT_EQ(path_of("steps: [{tag: RQ-1, kind: catalog, sender: a, receiver: b, contract: c, expect: NOPE}]"),
              "steps[0].expect");
    EXPECT_EQ(path_of("steps: [{tag: RQ-4, kind: federate, sender: a, query: x, sources: []}]"), "steps[0].sources");
}

TEST(Scenario, EmptyScriptGivesEmptyTranscript) {
    auto script = parse_scenario("steps: []\n", "/");
    auto transcript = run_scenario(script, {});
    EXPECT_TRUE(transcript.entries.empty());
    EXPECT_TRUE(transcript.ok());
    EXPECT_EQ(script.missing_tags().size(), 8u);
}

TEST(Scenario, FullScriptOnFixtureNodes) {
    auto dir = write_seed(1, "full");
    NodeNetwork network(load_node_list(dir / "nodes.yaml"));
    auto nodes = network.handles();
    auto script = load_scenario(dir / "scenario/script.yaml");
    auto transcript = run_scenario(script, nodes);
    ASSERT_TRUE(transcript.ok()) << transcript.failure;
    EXPECT_EQ(transcript.entries.size(), script.steps.size());
    EXPECT_GE(transcript.entries.size(), 8u);
    for (int i = 1; i <= 8; ++i) EXPECT_TRUE(transcript.tags().count(fmt::format("RQ-{}", i)));
    EXPECT_EQ(transcript.rejections(connector::RejectionReason::ContractExpired), 1u);

    std::size_t requests = 0;
    for (const auto& e : transcript.entries) {
        requests += e.exchanges.size();
        if (e.expected) {
            EXPECT_EQ(e.tag, "RQ-2");
            ASSERT_EQ(e.exchanges.size(), 1u);
            EXPECT_EQ(e.exchanges[0].rejection, connector::RejectionReason::ContractExpired);
        }
        if (e.kind == StepKind::Federate) {
            EXPECT_EQ(e.tag, "RQ-4");
            EXPECT_GT(e.rows, 0u);
            std::set<std::string> receivers;
            for (const auto& x : e.exchanges) receivers.insert(x.receiver);
            EXPECT_EQ(receivers, (std::set<std::string>{"tso", "supplier"}));
        }
        if (e.kind == StepKind::Publish) {
            EXPECT_EQ(e.inserted, 96u);
        }
        if (e.kind == StepKind::Query && !e.expected) {
            EXPECT_GT(e.rows, 0u) << e.step;
        }
    }
    // The forecast query after publishing sees all 24 forecast points.
    for (const auto& e : transcript.entries) {
        if (e.tag == "RQ-7" && e.kind == StepKind::Query) {
            EXPECT_EQ(e.rows, 24u);
        }
    }

    EXPECT_TRUE(verify_transcript(transcript, nodes).empty());
    std::size_t logged = 0;
    for (const auto& id : network.ids()) logged += network.node(id).provenance().size();
    EXPECT_EQ(logged, requests);

    auto lines = transcript_to_jsonl(transcript);
    EXPECT_EQ(static_cast<std::size_t>(std::count(lines.begin(), lines.end(), '\n')), transcript.entries.size());
    auto first = nlohmann::json::parse(lines.substr(0, lines.find('\n')));
    EXPECT_EQ(first["tag"], "RQ-3");
    EXPECT_EQ(first["exchanges"][0]["responseType"], "QueryResult");
    EXPECT_TRUE(first["exchanges"][0]["provenanceRecordId"].is_number());
}

TEST(Scenario, UnexpectedRejectionFailsWithStepTag) {
    auto dir = write_seed(1, "unexpected");
    NodeNetwork network(load_node_list(dir / "nodes.yaml"));
    auto script = parse_scenario(R"(
steps:
  - {tag: RQ-3, kind: catalog, sender: tso, receiver: tso, contract: c-tso-local}
  - {tag: RQ-5, kind: query, sender: tso, receiver: producer, contract: c-supplier-producer, query: "SELECT * WHERE { ?s ?p ?o }"}
  - {tag: RQ-6, kind: catalog, sender: tso, receiver: tso, contract: c-tso-local}
)",
                                 dir);
    auto nodes = network.handles();
    auto transcript = run_scenario(script, nodes);
    EXPECT_FALSE(transcript.ok());
    EXPECT_EQ(transcript.failed_tag, "RQ-5");
    EXPECT_EQ(transcript.entries.size(), 2u);
    EXPECT_EQ(transcript.entries[1].exchanges[0].rejection, connector::RejectionReason::NotAuthorized);
    EXPECT_TRUE(verify_transcript(transcript, nodes).empty());
}

TEST(Scenario, MissingExpectedRejectionFails) {
    auto dir = write_seed(1, "missing_reject");
    NodeNetwork network(load_node_list(dir / "nodes.yaml"));
    auto script = parse_scenario(
        "steps: [{tag: RQ-2, kind: catalog, sender: tso, receiver: supplier, contract: c-tso-supplier, expect: CONTRACT_EXPIRED}]\n",
        dir);
    auto transcript = run_scenario(script, network.handles());
    EXPECT_EQ(transcript.failed_tag, "RQ-2");
}

TEST(Scenario, RenewableQueryOverTwoNodes) {
    auto dir = write_seed(1, "renewable");
    auto configs = load_node_list(dir / "nodes.yaml");
    NodeNetwork network({configs[0], configs[3]});
    auto catalog = federation::parse_catalog(util::read_file(dir / "federation/catalog.yaml"));
    catalog.sources[0].endpoint = network.endpoint("tso");
    catalog.sources[1].endpoint = network.endpoint("wiki");
    auto result = federation::federated_query(util::read_file(dir / "queries/renewable_query.rq"), catalog,
                                              connector::tcp_client_factory(catalog.consumer));
    ASSERT_FALSE(result.rows.empty());
    auto column = result.column("productionType");
    ASSERT_TRUE(column);
    for (const auto& row : result.rows) {
        EXPECT_EQ(row[*column]->value(), std::string(vocab::productionTypeBase) + "WindPower");
    }
    EXPECT_EQ(result.rows.size(), 1u);
}
