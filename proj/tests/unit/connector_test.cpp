#include "ede/connector/authorize.hpp"
#include "ede/connector/client.hpp"
#include "ede/connector/node.hpp"
#include "ede/connector/server.hpp"
#include "ede/connector/wire.hpp"
#include "ede/rdf/ntriples.hpp"
#include "ede/sparql/evaluator.hpp"
#include "ede/sparql/parser.hpp"
#include "ede/util/files.hpp"

#include <gtest/gtest.h>

#include <future>
#include <random>

#include <sys/socket.h>
#include <unistd.h>

using namespace ede;
using namespace ede::connector;
using namespace std::chrono_literals;

namespace {

const std::string kData = EDE_TEST_DATA;

util::Timestamp ts(const char* text) { return *util::parse_rfc3339(text); }

const char* kContracts = R"(
- id: tso-self-2020
  provider: tso
  consumer: supplier
  resource: tso-capacity
  operations: [catalog, query]
  not_before: 2020-01-01T00:00:00Z
  expiry: 2100-01-01T00:00:00Z
  purpose: capacity planning
- id: catalog-only
  provider: tso
  consumer: supplier
  resource: tso-capacity
  operations: [catalog]
  not_before: 2020-01-01T00:00:00Z
  expiry: 2100-01-01T00:00:00Z
- id: expired-2021
  provider: tso
  consumer: supplier
  resource: tso-capacity
  operations: [query]
  not_before: 2020-01-01T00:00:00Z
  expiry: 2021-01-01T00:00:00Z
- id: other-resource
  provider: tso
  consumer: supplier
  resource: tso-load
  operations: [query]
  not_before: 2020-01-01T00:00:00Z
  expiry: 2100-01-01T00:00:00Z
)";

const NodeIdentity kTso{"tso", "tso-capacity"};
const util::Timestamp kNow = ts("2024-06-01T12:00:00Z");

rdf::Graph fixture_graph() { return rdf::parse_ntriples(util::read_file(kData + "/sq1_fixture.nt")); }
std::string sq1() { return util::read_file(kData + "/queries/sq1.rq"); }

std::unique_ptr<Node> make_node(std::unique_ptr<ProvenanceLog> log = std::make_unique<ProvenanceLog>()) {
    return std::make_unique<Node>(kTso, parse_contracts(kContracts), fixture_graph(), std::move(log), [] { return kNow; });
}

Message query_request(const std::string& contract, const std::string& text = sq1(), std::string sender = "supplier") {
    return make_query_request(std::move(sender), next_correlation_id("t"), contract, text, kNow);
}

std::string reason_of(const Message& m) { return m.body.value("reason", std::string()); }

std::optional<RejectionReason> check(const std::string& sender, const std::string& contract, Operation op,
                                     util::Timestamp now) {
    return authorize(AccessRequest{sender, contract, op}, parse_contracts(kContracts), kTso, now);
}

}  // namespace

TEST(ContractTest, ParseAndValidate) {
    auto store = parse_contracts(kContracts);
    EXPECT_EQ(store.size(), 4u);
    const auto* c = store.find("tso-self-2020");
    ASSERT_NE(c, nullptr);
    EXPECT_EQ(c->operations, (std::set<Operation>{Operation::Catalog, Operation::Query}));
    EXPECT_EQ(c->purpose, "capacity planning");
    EXPECT_EQ(parse_contracts(std::string("contracts:\n") + "  - {id: a, provider: p, consumer: c, resource: r, "
                              "operations: [], not_before: 2020-01-01T00:00:00Z, expiry: 2021-01-01T00:00:00Z}\n")
                  .size(),
              1u);

    auto path = [](const std::string& text) {
        try {
            parse_contracts(text);
        } catch (const ConfigError& e) {
            return e.path();
        }
        return std::string("<no error>");
    };
    const std::string base = "- {id: a, provider: p, consumer: c, resource: r, operations: [query], ";
    EXPECT_EQ(path(base + "not_before: 2021-01-01T00:00:00Z, expiry: 2021-01-01T00:00:00Z}\n"), "[0]");
    EXPECT_EQ(path(base + "not_before: yesterday, expiry: 2021-01-01T00:00:00Z}\n"), "[0].not_before");
    EXPECT_EQ(path("- {id: a, provider: p, consumer: c, resource: r, operations: [write], not_before: "
                   "2020-01-01T00:00:00Z, expiry: 2021-01-01T00:00:00Z}\n"),
              "[0].operations[0]");
    EXPECT_EQ(path(base + "not_before: 2020-01-01T00:00:00Z, expiry: 2021-01-01T00:00:00Z}\n" + base +
                   "not_before: 2020-01-01T00:00:00Z, expiry: 2021-01-01T00:00:00Z}\n"),
              "[1]");
    EXPECT_EQ(path(base + "expiry: 2021-01-01T00:00:00Z}\n"), "[0].not_before");
}

TEST(AuthorizeTest, Decisions) {
    EXPECT_EQ(check("supplier", "tso-self-2020", Operation::Query, kNow), std::nullopt);
    EXPECT_EQ(check("supplier", "nope", Operation::Query, kNow), RejectionReason::UnknownContract);
    EXPECT_EQ(check("producer", "tso-self-2020", Operation::Query, kNow), RejectionReason::NotAuthorized);
    EXPECT_EQ(check("supplier", "other-resource", Operation::Query, kNow), RejectionReason::NotAuthorized);
    EXPECT_EQ(check("supplier", "catalog-only", Operation::Query, kNow), RejectionReason::OperationNotPermitted);
    EXPECT_EQ(check("supplier", "tso-self-2020", Operation::Query, ts("2019-12-31T23:59:59Z")),
              RejectionReason::ContractNotYetValid);
    EXPECT_EQ(check("supplier", "tso-self-2020", Operation::Query, ts("2020-01-01T00:00:00Z")), std::nullopt);
}

TEST(AuthorizeTest, ExpiryBoundary) {
    EXPECT_EQ(check("supplier", "expired-2021", Operation::Query, ts("2020-12-31T23:59:59Z")), std::nullopt);
    EXPECT_EQ(check("supplier", "expired-2021", Operation::Query, ts("2021-01-01T00:00:00Z")),
              RejectionReason::ContractExpired);
}

TEST(AuthorizeTest, MostSpecificReasonWins) {
    // Consumer mismatch outranks the window, the window outranks the operation.
    EXPECT_EQ(check("producer", "expired-2021", Operation::Query, kNow), RejectionReason::NotAuthorized);
    EXPECT_EQ(check("supplier", "expired-2021", Operation::Catalog, kNow), RejectionReason::ContractExpired);
    auto other = NodeIdentity{"supplier", "tso-capacity"};
    EXPECT_EQ(authorize(AccessRequest{"supplier", "tso-self-2020", Operation::Query}, parse_contracts(kContracts), other, kNow),
              RejectionReason::NotAuthorized);
}

TEST(MessageTest, JsonRoundTrip) {
    auto m = make_query_request("tso", "c-1", "k", "SELECT * WHERE { ?s ?p ?o }", ts("2024-01-02T03:04:05Z"));
    auto doc = to_json(m);
    EXPECT_EQ(doc["type"], "QueryRequest");
    EXPECT_EQ(doc["correlationId"], "c-1");
    EXPECT_EQ(doc["issued"], "2024-01-02T03:04:05Z");
    EXPECT_EQ(decode(encode(m)), m);
    EXPECT_NE(next_correlation_id("a"), next_correlation_id("a"));
}

TEST(MessageTest, DecodeErrors) {
    try {
        decode("{not json");
        FAIL();
    } catch (const MalformedMessage& e) {
        EXPECT_FALSE(e.correlation_id().has_value());
    }
    try {
        decode(R"({"correlationId":"x-1","sender":"tso","type":"Bogus"})");
        FAIL();
    } catch (const MalformedMessage& e) {
        EXPECT_EQ(e.correlation_id(), "x-1");
        EXPECT_EQ(e.sender(), "tso");
    }
    EXPECT_THROW(decode(R"({"correlationId":"x","sender":"a","type":"QueryRequest","issued":"2020-01-01T00:00:00Z"})"),
                 MalformedMessage);
    EXPECT_THROW(decode("[]"), MalformedMessage);
}

TEST(MessageTest, CanonicalDigestIgnoresKeyOrderAndWhitespace) {
    auto a = nlohmann::json::parse(R"({"b": 1, "a": [1, 2]})");
    auto b = nlohmann::json::parse(R"({"a":[1,2],"b":1})");
    EXPECT_EQ(canonical_digest(a), canonical_digest(b));
    EXPECT_NE(canonical_digest(a), canonical_digest(nlohmann::json::parse(R"({"a":[2,1],"b":1})")));
}

TEST(HandleTest, QueryMatchesLocalEvaluation) {
    auto node = make_node();
    auto request = query_request("tso-self-2020");
    auto response = node->handle(request);
    ASSERT_EQ(response.type, MessageType::QueryResult) << response.body.dump();
    EXPECT_EQ(response.correlation_id, request.correlation_id);
    EXPECT_EQ(response.sender, "tso");
    auto results = sparql::results_from_json(response.body["results"]);
    auto local = sparql::evaluate(sparql::parse_query(sq1()), fixture_graph());
    EXPECT_EQ(results.rows.size(), local.rows.size());
    EXPECT_EQ(results.rows, local.rows);

    auto records = node->provenance().records();
    ASSERT_EQ(records.size(), 1u);
    EXPECT_EQ(records[0].activity, Activity::QueryServed);
    EXPECT_EQ(records[0].contract, "tso-self-2020");
    EXPECT_EQ(records[0].consumer, "supplier");
    EXPECT_EQ(response.body["provenanceRecordId"], records[0].id);
    EXPECT_EQ(records[0].result_digest, canonical_digest(response.body));
    EXPECT_EQ(records[0].request_digest, canonical_digest(request.body));
}

TEST(HandleTest, Rejections) {
    auto node = make_node();
    EXPECT_EQ(reason_of(node->handle(query_request("missing"))), "UNKNOWN_CONTRACT");
    EXPECT_EQ(reason_of(node->handle(query_request("expired-2021"))), "CONTRACT_EXPIRED");
    EXPECT_EQ(reason_of(node->handle(query_request("catalog-only"))), "OPERATION_NOT_PERMITTED");
    EXPECT_EQ(reason_of(node->handle(query_request("tso-self-2020", sq1(), "producer"))), "NOT_AUTHORIZED");
    EXPECT_EQ(reason_of(node->handle(query_request("tso-self-2020", "SELECT ?x WHERE {"))), "MALFORMED");
    Message wrong{MessageType::QueryResult, "supplier", "c-9", kNow, {{"contractId", "tso-self-2020"}}};
    EXPECT_EQ(reason_of(node->handle(wrong)), "MALFORMED");
    Message no_query{MessageType::QueryRequest, "supplier", "c-10", kNow, {{"contractId", "tso-self-2020"}}};
    EXPECT_EQ(reason_of(node->handle(no_query)), "MALFORMED");

    auto records = node->provenance().records();
    ASSERT_EQ(records.size(), 7u);
    for (const auto& r : records) EXPECT_EQ(r.activity, Activity::QueryRejected);
    EXPECT_EQ(records[0].reason, RejectionReason::UnknownContract);
    EXPECT_EQ(records[0].contract, "missing");
    EXPECT_EQ(node->snapshot()->size(), fixture_graph().size());
}

TEST(HandleTest, CatalogListsEnergyPredicates) {
    auto node = make_node();
    auto response = node->handle(make_catalog_request("supplier", "c-1", "tso-self-2020", kNow));
    ASSERT_EQ(response.type, MessageType::CatalogResponse);
    auto d = federation::description_from_json(response.body["source"]);
    EXPECT_EQ(d.id, "tso");
    EXPECT_TRUE(d.predicates.count("http://w3id.org/energy/measure"));
    EXPECT_TRUE(d.predicates.count("http://w3id.org/energy/country"));
    EXPECT_EQ(d.classes, std::vector<std::string>{"http://w3id.org/energy/GenerationCapacity"});
    EXPECT_EQ(node->provenance().records().at(0).activity, Activity::CatalogServed);
}

TEST(HandleTest, PayloadDecoding) {
    auto node = make_node();
    EXPECT_FALSE(node->handle_payload("{oops").has_value());
    EXPECT_FALSE(node->handle_payload(R"({"type":"QueryRequest"})").has_value());
    EXPECT_EQ(node->provenance().size(), 0u);

    auto reply = node->handle_payload(R"({"type":"QueryRequest","sender":"supplier","correlationId":"keep-me"})");
    ASSERT_TRUE(reply.has_value());
    auto m = decode(*reply);
    EXPECT_EQ(m.type, MessageType::Rejection);
    EXPECT_EQ(m.correlation_id, "keep-me");
    EXPECT_EQ(reason_of(m), "MALFORMED");
    EXPECT_EQ(node->provenance().size(), 1u);
}

TEST(HandleTest, PublishKeepsOldSnapshots) {
    auto node = make_node();
    auto before = node->snapshot();
    rdf::Graph add;
    add.insert({rdf::Term::iri("urn:x"), rdf::Term::iri("urn:p"), rdf::Term::literal("1")});
    EXPECT_EQ(node->publish(add), before->size() + 1);
    EXPECT_EQ(before->size(), fixture_graph().size());
    EXPECT_EQ(node->snapshot()->size(), before->size() + 1);
}

TEST(ProvenanceTest, FileLogContinuesIds) {
    auto dir = std::filesystem::temp_directory_path() / ("ede-prov-" + std::to_string(::getpid()));
    std::filesystem::remove_all(dir);
    auto file = dir / "log.jsonl";
    {
        auto node = make_node(std::make_unique<ProvenanceLog>(file));
        node->handle(query_request("tso-self-2020"));
        node->handle(query_request("missing"));
    }
    {
        auto node = make_node(std::make_unique<ProvenanceLog>(file));
        EXPECT_EQ(node->provenance().size(), 2u);
        node->handle(make_catalog_request("supplier", "c", "tso-self-2020", kNow));
    }
    auto records = read_provenance_log(file);
    ASSERT_EQ(records.size(), 3u);
    EXPECT_EQ(records[0].id, 1u);
    EXPECT_EQ(records[2].id, 3u);
    EXPECT_EQ(records[1].reason, RejectionReason::UnknownContract);
    EXPECT_TRUE(audit_log(records, parse_contracts(kContracts), kTso).empty());
    std::filesystem::remove_all(dir);
}

TEST(ProvenanceTest, AuditFindsViolations) {
    auto node = make_node();
    node->handle(query_request("tso-self-2020"));
    node->handle(query_request("expired-2021"));
    auto records = node->provenance().records();
    EXPECT_TRUE(audit_log(records, node->contracts(), kTso).empty());

    auto forged = records[0];
    forged.id = 10;
    forged.contract = "expired-2021";
    records.push_back(forged);
    auto again = records[0];
    again.id = 5;
    records.push_back(again);
    auto findings = audit_log(records, node->contracts(), kTso);
    ASSERT_EQ(findings.size(), 2u);
    EXPECT_EQ(findings[0].record_id, 10u);
    EXPECT_NE(findings[0].problem.find("CONTRACT_EXPIRED"), std::string::npos);
    EXPECT_EQ(findings[1].record_id, 5u);
}

TEST(ProvenanceTest, RecordJsonRoundTrip) {
    auto node = make_node();
    node->handle(query_request("missing"));
    node->handle(query_request("tso-self-2020"));
    for (const auto& r : node->provenance().records()) EXPECT_EQ(record_from_json(to_json(r)), r);
    EXPECT_THROW(record_from_json(nlohmann::json::parse(R"({"id":1})")), Error);
}

TEST(NodeConfigTest, ParseAndLoad) {
    auto dir = std::filesystem::temp_directory_path() / ("ede-node-" + std::to_string(::getpid()));
    std::filesystem::remove_all(dir);
    util::write_file(dir / "contracts.yaml", kContracts);
    util::write_file(dir / "graph.nt", util::read_file(kData + "/sq1_fixture.nt"));
    util::write_file(dir / "maps/capacity.yaml", util::read_file(kData + "/mappings/capacity.yaml"));
    util::write_file(dir / "maps/capacity.csv", util::read_file(kData + "/raw/capacity.csv"));
    util::write_file(dir / "node.yaml", "id: tso\nresource: tso-capacity\nlisten: 127.0.0.1:0\ngraphs: [graph.nt]\n"
                                        "materialize: [maps/capacity.yaml]\ncontracts: contracts.yaml\n"
                                        "provenance_log: logs/tso.jsonl\n");
    auto config = load_node_config(dir / "node.yaml");
    EXPECT_EQ(config.graphs.at(0), dir / "graph.nt");
    EXPECT_EQ(config.provenance_log, dir / "logs/tso.jsonl");
    auto node = Node::from_config(config);
    // The mapped capacity records overlap the fixture graph on the RS records.
    EXPECT_GT(node->snapshot()->size(), fixture_graph().size());
    EXPECT_EQ(node->contracts().size(), 4u);
    node->handle(make_catalog_request("supplier", "c", "tso-self-2020", util::now_utc()));
    EXPECT_EQ(read_provenance_log(dir / "logs/tso.jsonl").size(), 1u);

    EXPECT_THROW(parse_node_config("id: a\nresource: r\n", dir), ConfigError);
    EXPECT_THROW(parse_node_config("id: a\nresource: r\ncontracts: c.yaml\nport: 1\n", dir), ConfigError);
    std::filesystem::remove_all(dir);
}

TEST(WireTest, Endpoints) {
    EXPECT_EQ(split_endpoint("127.0.0.1:7401"), (std::pair<std::string, std::uint16_t>{"127.0.0.1", 7401}));
    EXPECT_THROW(split_endpoint("localhost"), ValidationError);
    EXPECT_THROW(split_endpoint("host:99999"), ValidationError);
    EXPECT_THROW(split_endpoint("host:"), ValidationError);
}

TEST(ServerTest, CatalogOverTcp) {
    auto node = make_node();
    Server server(*node, "127.0.0.1:0");
    server.start();
    ASSERT_NE(server.port(), 0);
    ConnectorClient client(std::make_shared<TcpTransport>(server.endpoint()), "supplier");
    auto response = client.catalog("tso-self-2020");
    EXPECT_EQ(response.type, MessageType::CatalogResponse);
    EXPECT_EQ(response.body["source"]["endpoint"], server.endpoint());
    server.stop();
    auto records = node->provenance().records();
    ASSERT_EQ(records.size(), 1u);
    EXPECT_EQ(records[0].activity, Activity::CatalogServed);
}

TEST(ServerTest, FiftyConcurrentQueries) {
    auto node = make_node();
    Server server(*node, "127.0.0.1:0");
    server.start();
    auto transport = std::make_shared<TcpTransport>(server.endpoint());
    auto serial = ContractSourceClient(transport, "supplier", "tso-self-2020").query(sq1());

    std::vector<std::future<Message>> futures;
    for (int i = 0; i < 50; ++i) {
        futures.push_back(std::async(std::launch::async, [&] {
            return ConnectorClient(transport, "supplier").query("tso-self-2020", sq1());
        }));
    }
    std::set<std::string> correlations;
    for (auto& f : futures) {
        auto m = f.get();
        ASSERT_EQ(m.type, MessageType::QueryResult);
        EXPECT_EQ(sparql::results_from_json(m.body["results"]).rows, serial.rows);
        correlations.insert(m.correlation_id);
    }
    EXPECT_EQ(correlations.size(), 50u);
    server.stop();
    EXPECT_EQ(node->provenance().size(), 51u);
    EXPECT_TRUE(audit_log(node->provenance().records(), node->contracts(), kTso).empty());
}

TEST(ServerTest, ConnectionCarriesSeveralFramesAndDropsGarbage) {
    auto node = make_node();
    Server server(*node, "127.0.0.1:0");
    server.start();
    int fd = connect_to(server.endpoint(), 5000);
    for (int i = 0; i < 3; ++i) {
        write_frame(fd, encode(query_request("tso-self-2020")));
        auto reply = read_frame(fd);
        ASSERT_TRUE(reply.has_value());
        EXPECT_EQ(decode(*reply).type, MessageType::QueryResult);
    }
    write_frame(fd, "this is not json");
    EXPECT_FALSE(read_frame(fd).has_value());
    ::close(fd);

    int fd2 = connect_to(server.endpoint(), 5000);
    unsigned char huge[4] = {0x7f, 0xff, 0xff, 0xff};
    ::send(fd2, huge, 4, MSG_NOSIGNAL);
    EXPECT_FALSE(read_frame(fd2).has_value());
    ::close(fd2);
    server.stop();
    EXPECT_EQ(node->provenance().size(), 3u);
}

TEST(ServerTest, BindFailureAndUnreachable) {
    auto node = make_node();
    Server a(*node, "127.0.0.1:0");
    a.start();
    Server b(*node, a.endpoint());
    EXPECT_THROW(b.start(), Error);
    auto port = a.port();
    a.stop();
    TcpTransport dead("127.0.0.1:" + std::to_string(port), 1000ms);
    EXPECT_THROW(dead.roundtrip(query_request("tso-self-2020")), Error);
}

TEST(ClientTest, FederatedThroughContracts) {
    auto node = make_node();
    federation::FederationCatalog catalog;
    auto d = node->describe();
    d.contract = "tso-self-2020";
    catalog.sources.push_back(d);
    federation::ClientFactory factory = [&](const federation::SourceDescription& s) {
        return std::make_shared<ContractSourceClient>(std::make_shared<InProcessTransport>(*node), "supplier", s.contract);
    };
    auto result = federation::federated_query(sq1(), catalog, factory);
    EXPECT_EQ(result.rows.size(), 2u);

    catalog.sources[0].contract = "expired-2021";
    try {
        federation::federated_query(sq1(), catalog, factory);
        FAIL();
    } catch (const federation::FederationError& e) {
        EXPECT_EQ(e.source(), "tso");
        EXPECT_NE(std::string(e.what()).find("CONTRACT_EXPIRED"), std::string::npos);
    }
}

TEST(SovereigntyProperty, ResultsOnlyUnderValidContracts) {
    auto node = make_node();
    std::mt19937_64 rng(41);
    const std::vector<std::string> senders{"supplier", "producer", "tso", ""};
    const std::vector<std::string> contracts{"tso-self-2020", "catalog-only", "expired-2021", "other-resource", "nope"};
    const std::vector<util::Timestamp> times{ts("2019-06-01T00:00:00Z"), ts("2020-01-01T00:00:00Z"),
                                             ts("2020-12-31T23:59:59Z"), ts("2021-01-01T00:00:00Z"), kNow,
                                             ts("2100-01-01T00:00:00Z")};
    std::size_t served = 0;
    for (int i = 0; i < 300; ++i) {
        auto sender = senders[rng() % senders.size()];
        auto contract = contracts[rng() % contracts.size()];
        auto now = times[rng() % times.size()];
        bool is_query = rng() % 2 == 0;
        auto request = is_query ? make_query_request(sender, "f-" + std::to_string(i), contract, sq1(), now)
                                : make_catalog_request(sender, "f-" + std::to_string(i), contract, now);
        auto op = is_query ? Operation::Query : Operation::Catalog;
        auto expected = authorize(AccessRequest{sender, contract, op}, node->contracts(), kTso, now);
        auto response = node->handle(request, now);
        EXPECT_EQ(response.correlation_id, request.correlation_id);
        if (expected) {
            EXPECT_EQ(response.type, MessageType::Rejection);
            EXPECT_EQ(reason_of(response), to_string(*expected));
        } else {
            EXPECT_EQ(response.type, is_query ? MessageType::QueryResult : MessageType::CatalogResponse);
            ++served;
        }
    }
    EXPECT_GT(served, 10u);
    EXPECT_EQ(node->provenance().size(), 300u);
    EXPECT_TRUE(audit_log(node->provenance().records(), node->contracts(), kTso).empty());
}
