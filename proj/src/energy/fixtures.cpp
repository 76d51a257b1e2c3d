#include "ede/energy/fixtures.hpp"

#include "ede/energy/vocabulary.hpp"
#include "ede/federation/catalog.hpp"
#include "ede/mapping/mapping.hpp"
#include "ede/rdf/ntriples.hpp"
#include "ede/util/digest.hpp"
#include "ede/util/files.hpp"

#include <fmt/core.h>

#include <limits>
#include <set>
#include <tuple>

namespace ede::energy {

std::uint64_t FixtureRng::below(std::uint64_t n) {
    const auto max = std::numeric_limits<std::uint64_t>::max();
    const auto limit = max - max % n;
    std::uint64_t x;
    do {
        x = engine_();
    } while (x >= limit);
    return x % n;
}

long long FixtureRng::between(long long lo, long long hi) {
    return lo + static_cast<long long>(below(static_cast<std::uint64_t>(hi - lo) + 1));
}

double FixtureRng::unit() { return static_cast<double>(engine_() >> 11) * 0x1p-53; }

namespace {

const std::vector<std::string> kCountries{"RS", "HU", "RO", "BG", "HR"};
const std::vector<std::string> kTypes{"WindPower", "Coal", "Hydro", "Solar", "Gas", "Nuclear"};
const std::vector<std::string> kAreas{"CA-North", "CA-South"};
const std::vector<std::string> kPlants{"P1", "P2", "P3"};

// Fixed-point value given in hundredths, rendered without trailing zeros.
std::string hundredths(long long v) {
    std::string sign = v < 0 ? "-" : "";
    long long a = v < 0 ? -v : v;
    auto whole = fmt::format("{}{}", sign, a / 100);
    long long frac = a % 100;
    if (frac == 0) return whole;
    if (frac % 10 == 0) return fmt::format("{}.{}", whole, frac / 10);
    return fmt::format("{}.{:02d}", whole, frac);
}

std::string hour_stamp(const std::string& date, int hour) { return fmt::format("{}T{:02d}:00:00Z", date, hour); }

// Random walk in hundredths, clamped at `floor`.
std::vector<long long> walk(FixtureRng& rng, std::size_t n, long long start, long long step, long long floor = 0) {
    std::vector<long long> out;
    long long v = start;
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back(v);
        v = std::max(floor, v + rng.between(-step, step));
    }
    return out;
}

class Csv {
public:
    explicit Csv(const std::vector<std::string>& header) { row(header); }

    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) text_ += ',';
            text_ += cells[i];
        }
        text_ += '\n';
    }

    const std::string& text() const { return text_; }

private:
    std::string text_;
};

constexpr const char* kPrefixes = R"(prefixes:
  energy: "http://w3id.org/energy/"
  cim: "http://ede.local/cim#"
)";

constexpr const char* kCapacityMapping = R"(maps:
  - id: capacity
    source: {{path: {path}, format: csv, fields: [country, type, measure, year]}}
    subject:
      template: "http://w3id.org/energy/capacity/{{country}}-{{type}}-{{year}}"
      class: energy:GenerationCapacity
    po:
      - {{predicate: energy:productionType, template: "http://w3id.org/energy/productionType/{{type}}"}}
      - {{predicate: energy:country, field: country}}
      - {{predicate: energy:measure, field: measure, datatype: xsd:decimal}}
      - {{predicate: energy:agg_year, field: year}}
      - {{predicate: energy:dataSource, constant: energy:TransparencyPlatform}}
)";

constexpr const char* kLoadMapping = R"(maps:
  - id: load
    source: {path: ../raw/load.csv, format: csv, fields: [point, area, timestamp, measure]}
    subject:
      template: "http://ede.local/resource/load/{point}/{timestamp}"
      class: cim:ActivePower
    po:
      - {predicate: energy:measurementPoint, template: "http://ede.local/resource/point/{point}"}
      - {predicate: energy:controlArea, field: area}
      - {predicate: energy:timestamp, field: timestamp, datatype: xsd:dateTime}
      - {predicate: energy:measure, field: measure, datatype: xsd:decimal}
  - id: point
    source: {path: ../raw/load.csv, format: csv}
    subject:
      template: "http://ede.local/resource/point/{point}"
      class: cim:RegisteredResource
    po:
      - {predicate: energy:controlArea, field: area}
)";

constexpr const char* kAgreementMapping = R"(maps:
  - id: agreement
    source: {path: ../raw/agreements.csv, format: csv, fields: [agreement, party, area, direction, volume, valid_from, valid_to]}
    subject:
      template: "http://ede.local/resource/agreement/{agreement}"
      class: cim:Agreement
    po:
      - {predicate: energy:party, template: "http://ede.local/resource/party/{party}"}
      - {predicate: energy:controlArea, field: area}
      - {predicate: energy:direction, field: direction}
      - {predicate: energy:volume, field: volume, datatype: xsd:decimal}
      - {predicate: energy:validFrom, field: valid_from, datatype: xsd:dateTime}
      - {predicate: energy:validTo, field: valid_to, datatype: xsd:dateTime}
)";

constexpr const char* kBidMapping = R"(maps:
  - id: bid
    source: {path: ../raw/bids.csv, format: csv, fields: [bid, supplier, area, direction, volume, valid_from, valid_to]}
    subject:
      template: "http://ede.local/resource/bid/{bid}"
      class: cim:ReserveReq
    po:
      - {predicate: energy:offeredBy, template: "http://ede.local/resource/party/{supplier}"}
      - {predicate: energy:controlArea, field: area}
      - {predicate: energy:direction, field: direction}
      - {predicate: energy:volume, field: volume, datatype: xsd:decimal}
      - {predicate: energy:validFrom, field: valid_from, datatype: xsd:dateTime}
      - {predicate: energy:validTo, field: valid_to, datatype: xsd:dateTime}
  - id: supplier
    source: {path: ../raw/bids.csv, format: csv}
    subject:
      template: "http://ede.local/resource/party/{supplier}"
      class: cim:BalanceSupplier
    po:
      - {predicate: rdfs:label, field: supplier}
)";

constexpr const char* kHealthMapping = R"(maps:
  - id: health
    source: {path: ../raw/health.csv, format: csv, fields: [asset, timestamp, status, temperature]}
    subject:
      template: "http://ede.local/resource/health/{asset}/{timestamp}"
      class: energy:HealthReport
    po:
      - {predicate: energy:asset, template: "http://ede.local/resource/asset/{asset}"}
      - {predicate: energy:timestamp, field: timestamp, datatype: xsd:dateTime}
      - {predicate: energy:status, field: status}
      - {predicate: energy:temperature, field: temperature, datatype: xsd:decimal}
)";

constexpr const char* kPlantMapping = R"(maps:
  - id: plant
    source: {path: ../raw/plants.csv, format: csv, fields: [plant, name, type, capacity]}
    subject:
      template: "http://ede.local/resource/plant/{plant}"
      class: cim:Plant
    po:
      - {predicate: rdfs:label, field: name}
      - {predicate: energy:productionType, template: "http://w3id.org/energy/productionType/{type}"}
      - {predicate: energy:capacity, field: capacity, datatype: xsd:decimal}
)";

constexpr const char* kRealizationMapping = R"(maps:
  - id: realization
    source: {path: ../raw/realization.csv, format: csv, fields: [plant, horizon, date, measure]}
    subject:
      template: "http://ede.local/resource/realization/{plant}/{horizon}/{date}"
      class: energy:ExpectedRealization
    po:
      - {predicate: energy:plant, template: "http://ede.local/resource/plant/{plant}"}
      - {predicate: energy:horizon, field: horizon}
      - {predicate: energy:date, field: date}
      - {predicate: energy:measure, field: measure, datatype: xsd:decimal}
)";

constexpr const char* kWeatherMapping = R"(maps:
  - id: weather
    source: {path: ../raw/weather.csv, format: csv, fields: [station, timestamp, temperature, wind_speed]}
    subject:
      template: "http://ede.local/resource/weather/{station}/{timestamp}"
      class: energy:WeatherObservation
    po:
      - {predicate: energy:station, field: station}
      - {predicate: energy:timestamp, field: timestamp, datatype: xsd:dateTime}
      - {predicate: energy:temperature, field: temperature, datatype: xsd:decimal}
      - {predicate: energy:windSpeed, field: wind_speed, datatype: xsd:decimal}
)";

constexpr const char* kPipelineMapping = R"(maps:
  - id: capacity
    source: {path: capacity.csv, format: csv, fields: [country, type, measure, year]}
    subject:
      template: "http://w3id.org/energy/capacity/{country}-{type}-{year}"
      class: energy:GenerationCapacity
    po:
      - {predicate: energy:productionType, template: "http://w3id.org/energy/productionType/{type}"}
      - {predicate: energy:country, field: country}
      - {predicate: energy:measure, field: measure, datatype: xsd:decimal}
      - {predicate: energy:agg_year, field: year}
      - {predicate: energy:dataSource, constant: energy:TransparencyPlatform}
  - id: production-type
    source: {path: capacity.csv, format: csv}
    subject:
      template: "http://w3id.org/energy/productionType/{type}"
      class: energy:ProductionType
    po:
      - {predicate: rdfs:label, field: type}
  - id: daily-production
    source: {path: hourly_production.csv, format: csv, fields: [plant, date, measure]}
    subject:
      template: "http://ede.local/resource/production/{plant}/{date}"
      class: energy:DailyProduction
    po:
      - {predicate: energy:plant, template: "http://ede.local/resource/plant/{plant}"}
      - {predicate: energy:date, field: date}
      - {predicate: energy:measure, field: measure, datatype: xsd:decimal}
)";

constexpr const char* kPipelineConfig = R"(sources:
  - name: capacity.csv
    path: raw/capacity_kw.csv
    format: csv
    preprocess:
      - {kind: rename-field, from: prod_type, to: type}
      - {kind: rename-field, from: measure_kw, to: measure}
      - {kind: drop-missing, field: measure}
      - {kind: scale-numeric, field: measure, factor: 0.001}
  - name: hourly_production.csv
    path: raw/hourly_production.csv
    format: csv
    preprocess:
      - {kind: aggregate, group_by: [plant, date], sum: measure}
mapping: mapping.yaml
shapes: ../shapes/capacity.yaml
linking:
  label_predicate: rdfs:label
  reference: ../nodes/wiki/reference.nt
load:
  target: out/tso_capacity.nt
  report: out/report.json
staging: out/staging
on_violation: block
)";

constexpr const char* kShapes = R"(prefixes:
  energy: "http://w3id.org/energy/"
shapes:
  - id: GenerationCapacityShape
    target_class: energy:GenerationCapacity
    properties:
      - {path: energy:productionType, min_count: 1, max_count: 1, node_kind: IRI}
      - {path: energy:country, min_count: 1, max_count: 1, node_kind: Literal}
      - {path: energy:measure, min_count: 1, max_count: 1, datatype: xsd:decimal}
      - {path: energy:agg_year, min_count: 1, max_count: 1}
      - {path: energy:dataSource, max_count: 1, in: [energy:TransparencyPlatform]}
)";

constexpr const char* kRenewableQuery = R"(PREFIX wd:     <http://www.wikidata.org/entity/>
PREFIX wdt:    <http://www.wikidata.org/prop/direct/>
PREFIX energy: <http://w3id.org/energy/>

SELECT DISTINCT ?country ?productionType ?measure
WHERE {
?genCapacity    a  energy:GenerationCapacity .
?genCapacity    energy:productionType ?productionType .
?genCapacity    energy:country        ?country .
?genCapacity    energy:measure        ?measure .
?genCapacity    energy:agg_year       "2020" .
?productionType wdt:P279              wd:Q12705 .
}
)";

constexpr const char* kSq1 = R"(PREFIX energy: <http://w3id.org/energy/>

SELECT DISTINCT ?country ?productionType ?measure
WHERE {
?genCapacity    a  energy:GenerationCapacity .
?genCapacity    energy:productionType ?productionType .
?genCapacity    energy:country        ?country .
?genCapacity    energy:measure        ?measure .
?genCapacity    energy:agg_year       "2020" .
}
)";

constexpr const char* kSq2 = R"(PREFIX wd:     <http://www.wikidata.org/entity/>
PREFIX wdt:    <http://www.wikidata.org/prop/direct/>

SELECT DISTINCT ?productionType
WHERE {
?productionType wdt:P279 wd:Q12705 .
}
)";

constexpr const char* kLoadBidsQuery = R"(PREFIX energy: <http://w3id.org/energy/>
PREFIX cim:    <http://ede.local/cim#>

SELECT ?area ?point ?load ?bid ?direction ?volume
WHERE {
?obs   a cim:ActivePower .
?obs   energy:measurementPoint ?point .
?obs   energy:controlArea ?area .
?obs   energy:timestamp "2020-06-01T18:00:00Z"^^<http://www.w3.org/2001/XMLSchema#dateTime> .
?obs   energy:measure ?load .
?bid   a cim:ReserveReq .
?bid   energy:controlArea ?area .
?bid   energy:direction ?direction .
?bid   energy:volume ?volume .
}
)";

struct ContractSpec {
    const char* id;
    const char* provider;
    const char* consumer;
    const char* resource;
    const char* not_before;
    const char* expiry;
    const char* purpose;
};

const ContractSpec kContracts[] = {
    {"c-tso-local", "tso", "tso", "tso-data", "2020-01-01T00:00:00Z", "2100-01-01T00:00:00Z", "own load and capacity data"},
    {"c-tso-wiki", "wiki", "tso", "wiki-reference", "2020-01-01T00:00:00Z", "2100-01-01T00:00:00Z", "reference taxonomy"},
    {"c-tso-supplier", "supplier", "tso", "supplier-data", "2020-01-01T00:00:00Z", "2100-01-01T00:00:00Z", "balancing bids and forecasts"},
    {"c-tso-supplier-2019", "supplier", "tso", "supplier-data", "2019-01-01T00:00:00Z", "2020-01-01T00:00:00Z", "previous balancing period"},
    {"c-tso-producer", "producer", "tso", "producer-data", "2020-01-01T00:00:00Z", "2100-01-01T00:00:00Z", "infrastructure monitoring"},
    {"c-supplier-producer", "producer", "supplier", "producer-data", "2020-01-01T00:00:00Z", "2100-01-01T00:00:00Z", "expected realization and weather"},
    {"c-supplier-tso", "tso", "supplier", "tso-data", "2020-01-01T00:00:00Z", "2100-01-01T00:00:00Z", "balancing plans"},
    {"c-producer-tso", "tso", "producer", "tso-data", "2020-01-01T00:00:00Z", "2100-01-01T00:00:00Z", "production plans"},
};

std::string contracts_text() {
    std::string out = "contracts:\n";
    for (const auto& c : kContracts) {
        out += fmt::format(
            "  - id: {}\n    provider: {}\n    consumer: {}\n    resource: {}\n    operations: [catalog, query]\n"
            "    not_before: {}\n    expiry: {}\n    purpose: {}\n",
            c.id, c.provider, c.consumer, c.resource, c.not_before, c.expiry, c.purpose);
    }
    return out;
}

std::string node_text(const std::string& id, const std::string& resource, int port,
                      const std::vector<std::string>& materialize, const std::vector<std::string>& graphs) {
    std::string out = fmt::format("id: {}\nresource: {}\nlisten: 127.0.0.1:{}\n", id, resource, port);
    auto list = [&](const char* key, const std::vector<std::string>& items) {
        if (items.empty()) return;
        out += fmt::format("{}:\n", key);
        for (const auto& item : items) out += fmt::format("  - {}\n", item);
    };
    list("graphs", graphs);
    list("materialize", materialize);
    out += fmt::format("contracts: ../../contracts.yaml\nprovenance_log: ../../logs/{}.jsonl\n", id);
    return out;
}

rdf::Graph materialize(const std::string& mapping_text, const std::string& csv) {
    auto doc = mapping::parse_mapping(mapping_text);
    auto table = mapping::read_csv(csv);
    return mapping::apply_mapping(doc, table.records).graph;
}

std::string catalog_source(const federation::SourceDescription& d, const std::string& endpoint,
                           const std::string& contract) {
    std::string out = fmt::format("  - id: {}\n    endpoint: {}\n    contract: {}\n    classes:\n", d.id, endpoint, contract);
    for (const auto& c : d.classes) out += fmt::format("      - \"<{}>\"\n", c);
    out += "    predicates:\n";
    for (const auto& p : d.predicates) out += fmt::format("      - \"<{}>\"\n", p);
    out += "    counts:\n";
    for (const auto& [p, n] : d.predicate_counts) out += fmt::format("      \"<{}>\": {}\n", p, n);
    return out;
}

rdf::Term iri(std::string_view value) { return rdf::Term::iri(std::string(value)); }

std::string query_block(const char* text, int indent) {
    std::string pad(static_cast<std::size_t>(indent), ' ');
    std::string out = "|\n";
    std::string_view rest = text;
    while (!rest.empty()) {
        auto nl = rest.find('\n');
        auto line = rest.substr(0, nl);
        out += line.empty() ? "\n" : pad + std::string(line) + "\n";
        if (nl == std::string_view::npos) break;
        rest.remove_prefix(nl + 1);
    }
    return out;
}

std::string scenario_text() {
    struct Step {
        const char* tag;
        const char* kind;
        const char* sender;
        const char* receiver;
        const char* contract;
        const char* query;
        const char* expect;
        const char* note;
    };
    const char* load_q = R"(PREFIX energy: <http://w3id.org/energy/>
PREFIX cim: <http://ede.local/cim#>
SELECT ?point ?area ?time ?measure WHERE {
  ?obs a cim:ActivePower .
  ?obs energy:measurementPoint ?point .
  ?obs energy:controlArea ?area .
  ?obs energy:timestamp ?time .
  ?obs energy:measure ?measure .
}
)";
    const char* bids_q = R"(PREFIX energy: <http://w3id.org/energy/>
PREFIX cim: <http://ede.local/cim#>
SELECT ?bid ?area ?direction ?volume WHERE {
  ?bid a cim:ReserveReq .
  ?bid energy:controlArea ?area .
  ?bid energy:direction ?direction .
  ?bid energy:volume ?volume .
}
)";
    const char* plans_q = R"(PREFIX energy: <http://w3id.org/energy/>
PREFIX cim: <http://ede.local/cim#>
SELECT ?agreement ?party ?area ?direction ?volume WHERE {
  ?agreement a cim:Agreement .
  ?agreement energy:party ?party .
  ?agreement energy:controlArea ?area .
  ?agreement energy:direction ?direction .
  ?agreement energy:volume ?volume .
}
)";
    const char* realization_q = R"(PREFIX energy: <http://w3id.org/energy/>
SELECT ?plant ?horizon ?measure WHERE {
  ?r a energy:ExpectedRealization .
  ?r energy:plant ?plant .
  ?r energy:horizon ?horizon .
  ?r energy:measure ?measure .
}
)";
    const char* weather_q = R"(PREFIX energy: <http://w3id.org/energy/>
SELECT ?station ?time ?temperature ?wind WHERE {
  ?w a energy:WeatherObservation .
  ?w energy:station ?station .
  ?w energy:timestamp ?time .
  ?w energy:temperature ?temperature .
  ?w energy:windSpeed ?wind .
}
)";
    const char* forecast_q = R"(PREFIX energy: <http://w3id.org/energy/>
SELECT ?time ?measure WHERE {
  ?f a energy:Forecast .
  ?f energy:forecastTime ?time .
  ?f energy:measure ?measure .
}
)";
    const char* health_q = R"(PREFIX energy: <http://w3id.org/energy/>
SELECT ?asset ?time ?status WHERE {
  ?h a energy:HealthReport .
  ?h energy:asset ?asset .
  ?h energy:timestamp ?time .
  ?h energy:status ?status .
}
)";
    const Step steps[] = {
        {"RQ-3", "query", "tso", "tso", "c-tso-local", load_q, nullptr, "TSO collects load at its measurement points"},
        {"RQ-2", "catalog", "tso", "supplier", "c-tso-supplier", nullptr, nullptr, "TSO discovers the BSP's resources"},
        {"RQ-2", "query", "tso", "supplier", "c-tso-supplier", bids_q, nullptr, "TSO receives balancing bids"},
        {"RQ-2", "query", "tso", "supplier", "c-tso-supplier-2019", bids_q, "CONTRACT_EXPIRED",
         "bids under last period's contract are refused"},
        {"RQ-1", "query", "supplier", "tso", "c-supplier-tso", plans_q, nullptr, "balancing plans exchanged with the BSP"},
        {"RQ-4", "federate", "tso", nullptr, nullptr, nullptr, nullptr, "TSO combines local load with BSP bids"},
        {"RQ-4", "query", "producer", "tso", "c-producer-tso", plans_q, nullptr, "BRP fetches its production plan"},
        {"RQ-5", "query", "supplier", "producer", "c-supplier-producer", realization_q, nullptr,
         "BSP receives expected realization from the BRP"},
        {"RQ-6", "query", "supplier", "producer", "c-supplier-producer", weather_q, nullptr,
         "BSP collects meteorological data"},
        {"RQ-7", "publish", "supplier", nullptr, nullptr, nullptr, nullptr, "BSP publishes its day-ahead forecast"},
        {"RQ-7", "query", "tso", "supplier", "c-tso-supplier", forecast_q, nullptr, "TSO reads the published forecast"},
        {"RQ-8", "query", "tso", "producer", "c-tso-producer", health_q, nullptr, "BRP infrastructure health to TSO"},
        {"RQ-8", "query", "tso", "supplier", "c-tso-supplier", health_q, nullptr, "BSP infrastructure health to TSO"},
    };
    std::string out = "steps:\n";
    for (const auto& s : steps) {
        out += fmt::format("  - tag: {}\n    kind: {}\n    note: {}\n    sender: {}\n", s.tag, s.kind, s.note, s.sender);
        if (s.receiver) out += fmt::format("    receiver: {}\n", s.receiver);
        if (s.contract) out += fmt::format("    contract: {}\n", s.contract);
        if (s.expect) out += fmt::format("    expect: {}\n", s.expect);
        if (s.query) out += "    query: " + query_block(s.query, 6);
        if (std::string_view(s.kind) == "federate") {
            out += "    sources:\n      - {node: tso, contract: c-tso-local}\n      - {node: supplier, contract: c-tso-supplier}\n";
            out += "    query_file: ../queries/load_bids.rq\n";
        }
        if (std::string_view(s.kind) == "publish") out += "    payload: forecast.nt\n";
    }
    return out;
}

}  // namespace

std::vector<CapacityRow> generate_capacity(std::uint64_t seed) {
    FixtureRng rng(seed);
    std::vector<CapacityRow> rows;
    std::set<std::tuple<std::string, std::string, int>> used;
    auto add = [&](const std::string& country, const std::string& type, int year) {
        if (!used.insert({country, type, year}).second) return false;
        rows.push_back({country, type, rng.between(50, 5000), year});
        return true;
    };
    const std::vector<std::string> non_wind(kTypes.begin() + 1, kTypes.end());
    for (int year : {2018, 2019}) {
        auto n = rng.between(3, 6);
        for (long long added = 0; added < n;) added += add(rng.pick(kCountries), rng.pick(kTypes), year);
    }
    add(rng.pick(kCountries), "WindPower", 2020);
    add(rng.pick(kCountries), "Coal", 2020);
    auto extra = rng.between(1, 4);
    for (long long added = 0; added < extra;) added += add(rng.pick(kCountries), rng.pick(non_wind), 2020);
    return rows;
}

DefectFixture generate_defects(std::uint64_t seed, std::size_t count, bool fixed_kinds) {
    FixtureRng rng(seed ^ 0x9e3779b97f4a7c15ULL);
    DefectFixture out;
    const auto type = iri(vocab::rdf_type);
    const auto decimal = std::string(vocab::xsd_decimal);
    const std::size_t total = count + 4;
    for (std::size_t i = 0; i < total; ++i) {
        const auto& country = rng.pick(kCountries);
        const auto& ptype = rng.pick(kTypes);
        auto year = std::to_string(1900 + i);
        auto subject = rdf::Term::iri(fmt::format("http://w3id.org/energy/capacity/{}-{}-{}", country, ptype, year));
        auto measure = std::to_string(rng.between(50, 5000));
        auto pt = rdf::Term::iri(std::string(vocab::productionTypeBase) + ptype);
        int kind = -1;
        if (i < count) kind = fixed_kinds ? static_cast<int>(i % 3) : static_cast<int>(rng.below(7));
        auto defect = [&](const char* constraint, std::string_view path) {
            out.manifest.push_back({subject, constraint, std::string(path)});
        };
        out.graph.insert({subject, type, iri(vocab::GenerationCapacity)});
        if (kind == 3) {
            out.graph.insert({subject, iri(vocab::productionType), rdf::Term::literal(ptype)});
            defect("node-kind", vocab::productionType);
        } else if (kind == 6) {
            defect("min-count", vocab::productionType);
        } else {
            out.graph.insert({subject, iri(vocab::productionType), pt});
        }
        if (kind == 0) {
            defect("min-count", vocab::country);
        } else {
            out.graph.insert({subject, iri(vocab::country), rdf::Term::literal(country)});
        }
        if (kind == 1) {
            out.graph.insert({subject, iri(vocab::measure), rdf::Term::literal(measure)});
            defect("datatype", vocab::measure);
        } else if (kind == 5) {
            defect("min-count", vocab::measure);
        } else {
            out.graph.insert({subject, iri(vocab::measure), rdf::Term::literal(measure, decimal)});
        }
        out.graph.insert({subject, iri(vocab::agg_year), rdf::Term::literal(year)});
        if (kind == 2) {
            out.graph.insert({subject, iri(vocab::agg_year), rdf::Term::literal(std::to_string(2000 + i))});
            defect("max-count", vocab::agg_year);
        }
        if (kind == 4) {
            out.graph.insert({subject, iri(vocab::dataSource), rdf::Term::iri("http://w3id.org/energy/UnknownPlatform")});
            defect("in", vocab::dataSource);
        } else {
            out.graph.insert({subject, iri(vocab::dataSource), iri(vocab::TransparencyPlatform)});
        }
    }
    return out;
}

nlohmann::ordered_json manifest_to_json(const std::vector<SeededDefect>& manifest) {
    nlohmann::ordered_json out = nlohmann::ordered_json::array();
    for (const auto& d : manifest) {
        out.push_back({{"focusNode", d.focus.to_ntriples()}, {"constraint", d.constraint}, {"path", d.path}});
    }
    return out;
}

std::string capacity_shapes_text() { return kShapes; }

FixtureSet generate_fixtures(std::uint64_t seed) {
    FixtureSet files;
    FixtureRng rng(seed);
    const auto capacity = generate_capacity(seed);
    const std::string day = "2020-06-01";

    // TSO: capacity, load, agreements.
    Csv capacity_csv({"country", "type", "measure", "year"});
    Csv capacity_kw({"country", "prod_type", "measure_kw", "year"});
    for (const auto& r : capacity) {
        capacity_csv.row({r.country, r.type, std::to_string(r.measure), std::to_string(r.year)});
        capacity_kw.row({r.country, r.type, std::to_string(r.measure * 1000), std::to_string(r.year)});
    }
    capacity_kw.row({capacity.front().country, "Solar", "", "2017"});
    files["nodes/tso/raw/capacity.csv"] = capacity_csv.text();

    Csv load({"point", "area", "timestamp", "measure"});
    for (std::size_t p = 0; p < 4; ++p) {
        auto series = walk(rng, 24, rng.between(20000, 60000), 2500);
        for (int h = 0; h < 24; ++h) {
            load.row({fmt::format("L{}", p + 1), kAreas[p / 2], hour_stamp(day, h), hundredths(series[h])});
        }
    }
    files["nodes/tso/raw/load.csv"] = load.text();

    Csv agreements({"agreement", "party", "area", "direction", "volume", "valid_from", "valid_to"});
    const std::vector<std::string> parties{"BSP1", "BRP1"};
    for (int a = 1; a <= 3; ++a) {
        agreements.row({fmt::format("A{}", a), parties[(a - 1) % 2], rng.pick(kAreas), rng.below(2) ? "up" : "down",
                        hundredths(rng.between(1000, 20000)), day + "T00:00:00Z", "2020-06-02T00:00:00Z"});
    }
    files["nodes/tso/raw/agreements.csv"] = agreements.text();

    // Supplier (BSP): bids, asset health.
    Csv bids({"bid", "supplier", "area", "direction", "volume", "valid_from", "valid_to"});
    for (int b = 1; b <= 6; ++b) {
        bids.row({fmt::format("B{}", b), "BSP1", kAreas[static_cast<std::size_t>(b - 1) % 2], rng.below(2) ? "up" : "down",
                  hundredths(rng.between(500, 15000)), day + "T00:00:00Z", "2020-06-02T00:00:00Z"});
    }
    files["nodes/supplier/raw/bids.csv"] = bids.text();

    const std::vector<std::string> statuses{"ok", "ok", "ok", "degraded", "fault"};
    auto health = [&](const std::vector<std::string>& assets) {
        Csv csv({"asset", "timestamp", "status", "temperature"});
        for (const auto& asset : assets) {
            for (int h = 0; h < 24; h += 6) {
                csv.row({asset, hour_stamp(day, h), rng.pick(statuses), hundredths(rng.between(2000, 9000))});
            }
        }
        return csv.text();
    };
    files["nodes/supplier/raw/health.csv"] = health({"BSP1-G1", "BSP1-G2"});

    // Producer (BRP): plants, expected realization, weather, asset health.
    Csv plants({"plant", "name", "type", "capacity"});
    for (const auto& p : kPlants) plants.row({p, "Plant " + p, rng.pick(kTypes), hundredths(rng.between(5000, 50000))});
    files["nodes/producer/raw/plants.csv"] = plants.text();

    Csv realization({"plant", "horizon", "date", "measure"});
    for (const auto& p : kPlants) {
        for (const char* horizon : {"short", "medium", "long"}) {
            realization.row({p, horizon, "2020-06-02", hundredths(rng.between(10000, 90000))});
        }
    }
    files["nodes/producer/raw/realization.csv"] = realization.text();

    Csv weather({"station", "timestamp", "temperature", "wind_speed"});
    for (const char* station : {"W1", "W2"}) {
        auto temps = walk(rng, 8, rng.between(1000, 2500), 300, -2000);
        auto winds = walk(rng, 8, rng.between(100, 1200), 200);
        for (int i = 0; i < 8; ++i) {
            weather.row({station, hour_stamp(day, i * 3), hundredths(temps[i]), hundredths(winds[i])});
        }
    }
    files["nodes/producer/raw/weather.csv"] = weather.text();
    files["nodes/producer/raw/health.csv"] = health({"P1", "P2", "P3"});

    // Mappings.
    std::string prefixes = kPrefixes;
    files["nodes/tso/mappings/capacity.yaml"] = prefixes + fmt::format(kCapacityMapping, fmt::arg("path", "../raw/capacity.csv"));
    files["nodes/tso/mappings/load.yaml"] = prefixes + kLoadMapping;
    files["nodes/tso/mappings/agreements.yaml"] = prefixes + kAgreementMapping;
    files["nodes/supplier/mappings/bids.yaml"] = prefixes + kBidMapping;
    files["nodes/supplier/mappings/health.yaml"] = prefixes + kHealthMapping;
    files["nodes/producer/mappings/plants.yaml"] = prefixes + kPlantMapping;
    files["nodes/producer/mappings/realization.yaml"] = prefixes + kRealizationMapping;
    files["nodes/producer/mappings/weather.yaml"] = prefixes + kWeatherMapping;
    files["nodes/producer/mappings/health.yaml"] = prefixes + kHealthMapping;

    // Reference graph: only wind power is declared a renewable source.
    rdf::Graph reference;
    const auto label = iri(vocab::rdfs_label);
    const auto fossil = rdf::Term::iri(std::string(vocab::kReference) + "FossilFuel");
    reference.insert({rdf::Term::iri(std::string(vocab::productionTypeBase) + "WindPower"), iri(vocab::wdt_P279), iri(vocab::wd_Q12705)});
    for (const char* t : {"Coal", "Gas"}) {
        reference.insert({rdf::Term::iri(std::string(vocab::productionTypeBase) + t), iri(vocab::wdt_P279), fossil});
    }
    reference.insert({iri(vocab::wd_Q12705), label, rdf::Term::literal("renewable energy")});
    reference.insert({fossil, label, rdf::Term::literal("fossil fuel")});
    for (const auto& t : kTypes) {
        reference.insert({rdf::Term::iri(std::string(vocab::kReference) + t), label, rdf::Term::literal(t)});
    }
    files["nodes/wiki/reference.nt"] = rdf::serialize_ntriples(reference);

    // Nodes and contracts.
    files["contracts.yaml"] = contracts_text();
    files["nodes/tso/node.yaml"] = node_text("tso", "tso-data", 7401,
                                             {"mappings/capacity.yaml", "mappings/load.yaml", "mappings/agreements.yaml"}, {});
    files["nodes/supplier/node.yaml"] =
        node_text("supplier", "supplier-data", 7402, {"mappings/bids.yaml", "mappings/health.yaml"}, {});
    files["nodes/producer/node.yaml"] = node_text(
        "producer", "producer-data", 7403,
        {"mappings/plants.yaml", "mappings/realization.yaml", "mappings/weather.yaml", "mappings/health.yaml"}, {});
    files["nodes/wiki/node.yaml"] = node_text("wiki", "wiki-reference", 7404, {}, {"reference.nt"});
    files["nodes.yaml"] =
        "nodes:\n  - nodes/tso/node.yaml\n  - nodes/supplier/node.yaml\n  - nodes/producer/node.yaml\n  - nodes/wiki/node.yaml\n";

    // Federation catalogs, described from the node graphs.
    rdf::Graph tso_graph = materialize(files["nodes/tso/mappings/capacity.yaml"], files["nodes/tso/raw/capacity.csv"]);
    tso_graph.merge(materialize(files["nodes/tso/mappings/load.yaml"], files["nodes/tso/raw/load.csv"]));
    tso_graph.merge(materialize(files["nodes/tso/mappings/agreements.yaml"], files["nodes/tso/raw/agreements.csv"]));
    rdf::Graph supplier_graph = materialize(files["nodes/supplier/mappings/bids.yaml"], files["nodes/supplier/raw/bids.csv"]);
    supplier_graph.merge(materialize(files["nodes/supplier/mappings/health.yaml"], files["nodes/supplier/raw/health.csv"]));
    files["federation/catalog.yaml"] = "consumer: tso\nsources:\n" +
                                       catalog_source(federation::describe_graph("local", tso_graph), "127.0.0.1:7401", "c-tso-local") +
                                       catalog_source(federation::describe_graph("wiki", reference), "127.0.0.1:7404", "c-tso-wiki");
    files["federation/balancing.yaml"] =
        "consumer: tso\nsources:\n" +
        catalog_source(federation::describe_graph("tso", tso_graph), "127.0.0.1:7401", "c-tso-local") +
        catalog_source(federation::describe_graph("supplier", supplier_graph), "127.0.0.1:7402", "c-tso-supplier");

    files["queries/renewable_query.rq"] = kRenewableQuery;
    files["queries/sq1.rq"] = kSq1;
    files["queries/sq2.rq"] = kSq2;
    files["queries/load_bids.rq"] = kLoadBidsQuery;

    // Shapes and seeded defects.
    files["shapes/capacity.yaml"] = kShapes;
    auto defects = generate_defects(seed, 3, true);
    files["defects/capacity_defects.nt"] = rdf::serialize_ntriples(defects.graph);
    files["defects/manifest.json"] = manifest_to_json(defects.manifest).dump(2) + "\n";

    // Scenario: script plus the forecast the BSP publishes (seeded random walk).
    files["scenario/script.yaml"] = scenario_text();
    rdf::Graph forecast;
    auto series = walk(rng, 24, rng.between(30000, 60000), 3000);
    for (int h = 0; h < 24; ++h) {
        auto f = rdf::Term::iri(fmt::format("{}forecast/BSP1/2020-06-02T{:02d}", vocab::kResource, h));
        forecast.insert({f, iri(vocab::rdf_type), rdf::Term::iri(std::string(vocab::kEnergy) + "Forecast")});
        forecast.insert({f, rdf::Term::iri(std::string(vocab::kEnergy) + "forecastTime"),
                         rdf::Term::literal(hour_stamp("2020-06-02", h), std::string(vocab::xsd_dateTime))});
        forecast.insert({f, iri(vocab::measure), rdf::Term::literal(hundredths(series[h]), std::string(vocab::xsd_decimal))});
        forecast.insert({f, rdf::Term::iri(std::string(vocab::kEnergy) + "horizon"), rdf::Term::literal("short")});
    }
    files["scenario/forecast.nt"] = rdf::serialize_ntriples(forecast);

    // Pipeline: capacity in kW plus hourly production.
    files["pipeline/pipeline.yaml"] = kPipelineConfig;
    files["pipeline/mapping.yaml"] = prefixes + kPipelineMapping;
    files["pipeline/raw/capacity_kw.csv"] = capacity_kw.text();
    Csv hourly({"plant", "date", "hour", "measure"});
    for (const auto& p : kPlants) {
        auto values = walk(rng, 24, rng.between(2000, 8000), 900);
        for (int h = 0; h < 24; ++h) hourly.row({p, day, fmt::format("{:02d}", h), hundredths(values[h])});
    }
    files["pipeline/raw/hourly_production.csv"] = hourly.text();
    return files;
}

void write_fixtures(const FixtureSet& fixtures, const std::filesystem::path& dir) {
    for (const auto& [path, content] : fixtures) util::write_file(dir / path, content);
}

std::string fixture_digest(const FixtureSet& fixtures) {
    std::string all;
    for (const auto& [path, content] : fixtures) {
        all += path;
        all += '\0';
        all += util::sha256_hex(content);
        all += '\n';
    }
    return util::sha256_hex(all);
}

}  // namespace ede::energy
