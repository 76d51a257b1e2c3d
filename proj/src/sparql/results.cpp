#include "ede/sparql/results.hpp"

#include "ede/error.hpp"

#include <algorithm>

namespace ede::sparql {

namespace {

using Key = std::vector<std::string>;

Key sort_key(const Row& row) {
    Key key;
    key.reserve(row.size());
    for (const auto& cell : row) {
        // "\x01" sorts ahead of every N-Triples rendering, which starts with '<', '"' or '_'.
        key.push_back(cell ? cell->to_ntriples() : std::string("\x01"));
    }
    return key;
}

}  // namespace

std::optional<std::size_t> SolutionSequence::column(std::string_view variable) const {
    for (std::size_t i = 0; i < variables.size(); ++i) {
        if (variables[i] == variable) return i;
    }
    return std::nullopt;
}

void SolutionSequence::sort_rows() {
    std::vector<std::pair<Key, std::size_t>> keyed;
    keyed.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) keyed.emplace_back(sort_key(rows[i]), i);
    std::sort(keyed.begin(), keyed.end());
    std::vector<Row> sorted;
    sorted.reserve(rows.size());
    for (auto& [key, index] : keyed) sorted.push_back(std::move(rows[index]));
    rows = std::move(sorted);
}

void SolutionSequence::deduplicate() {
    sort_rows();
    rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
}

std::set<Row> SolutionSequence::tuple_set() const { return {rows.begin(), rows.end()}; }

nlohmann::json results_to_json(const SolutionSequence& solutions) {
    SolutionSequence sorted = solutions;
    sorted.sort_rows();
    nlohmann::json bindings = nlohmann::json::array();
    for (const auto& row : sorted.rows) {
        nlohmann::json entry = nlohmann::json::object();
        for (std::size_t i = 0; i < row.size() && i < sorted.variables.size(); ++i) {
            if (!row[i]) continue;
            const auto& term = *row[i];
            nlohmann::json cell;
            switch (term.kind()) {
                case rdf::Term::Kind::Iri: cell["type"] = "uri"; break;
                case rdf::Term::Kind::BlankNode: cell["type"] = "bnode"; break;
                case rdf::Term::Kind::Literal:
                    cell["type"] = "literal";
                    if (!term.language().empty()) {
                        cell["xml:lang"] = term.language();
                    } else if (term.datatype() != rdf::kXsdString) {
                        cell["datatype"] = term.datatype();
                    }
                    break;
            }
            cell["value"] = term.value();
            entry[sorted.variables[i]] = std::move(cell);
        }
        bindings.push_back(std::move(entry));
    }
    return nlohmann::json{{"head", {{"vars", sorted.variables}}}, {"results", {{"bindings", bindings}}}};
}

SolutionSequence results_from_json(const nlohmann::json& doc) {
    try {
        SolutionSequence out;
        for (const auto& v : doc.at("head").at("vars")) out.variables.push_back(v.get<std::string>());
        for (const auto& binding : doc.at("results").at("bindings")) {
            Row row(out.variables.size());
            for (auto it = binding.begin(); it != binding.end(); ++it) {
                auto col = out.column(it.key());
                if (!col) throw Error("binding for undeclared variable '" + it.key() + "'");
                const auto& cell = it.value();
                auto type = cell.at("type").get<std::string>();
                auto value = cell.at("value").get<std::string>();
                if (type == "uri") {
                    row[*col] = rdf::Term::iri(value);
                } else if (type == "bnode") {
                    row[*col] = rdf::Term::blank(value);
                } else if (type == "literal" || type == "typed-literal") {
                    if (cell.contains("xml:lang")) {
                        row[*col] = rdf::Term::lang_literal(value, cell["xml:lang"].get<std::string>());
                    } else if (cell.contains("datatype")) {
                        row[*col] = rdf::Term::literal(value, cell["datatype"].get<std::string>());
                    } else {
                        row[*col] = rdf::Term::literal(value);
                    }
                } else {
                    throw Error("unknown binding type '" + type + "'");
                }
            }
            out.rows.push_back(std::move(row));
        }
        return out;
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("malformed SPARQL results document: ") + e.what());
    }
}

std::string serialize_results(const SolutionSequence& solutions) {
    return results_to_json(solutions).dump(2) + "\n";
}

SolutionSequence parse_results(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("malformed SPARQL results document: ") + e.what());
    }
    return results_from_json(doc);
}

}  // namespace ede::sparql
