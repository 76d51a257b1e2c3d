#include "ede/federation/federation.hpp"

#include "ede/sparql/evaluator.hpp"
#include "ede/sparql/parser.hpp"

#include <algorithm>
#include <exception>
#include <future>
#include <unordered_map>

namespace ede::federation {

using sparql::Query;
using sparql::Row;
using sparql::SolutionSequence;

bool is_relevant(const sparql::TriplePattern& pattern, const SourceDescription& source) {
    const rdf::Term* p = sparql::as_term(pattern.predicate);
    if (p == nullptr) return true;
    const auto& predicate = p->value();
    if (predicate == rdf::kRdfType) {
        if (const rdf::Term* o = sparql::as_term(pattern.object); o != nullptr && o->is_iri()) {
            return source.has_class(o->value());
        }
        return !source.classes.empty() || source.predicates.count(predicate) != 0;
    }
    return source.predicates.count(predicate) != 0;
}

SourceSelection select_sources(const Query& query, const FederationCatalog& catalog) {
    SourceSelection selection;
    for (std::size_t i = 0; i < query.patterns.size(); ++i) {
        std::set<std::string> relevant;
        for (const auto& source : catalog.sources) {
            if (is_relevant(query.patterns[i], source)) relevant.insert(source.id);
        }
        if (relevant.empty()) throw UnanswerablePatternError(i, sparql::to_string(query.patterns[i], query.prefixes));
        selection.push_back(std::move(relevant));
    }
    return selection;
}

namespace {

void add_unique(std::vector<std::string>& out, const std::string& name) {
    if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(name);
}

bool contains(const std::vector<std::string>& names, const std::string& name) {
    return std::find(names.begin(), names.end(), name) != names.end();
}

std::vector<std::string> variables_of(const Query& q) {
    std::vector<std::string> out;
    for (const auto& p : q.patterns) {
        for (const auto& v : p.variables()) add_unique(out, v);
    }
    return out;
}

}  // namespace

DecomposedQuery decompose(const Query& query, const SourceSelection& selection, DecomposeOptions options) {
    DecomposedQuery plan;
    plan.original = query;

    std::map<std::string, std::size_t> group_of_source;
    for (std::size_t i = 0; i < query.patterns.size(); ++i) {
        const auto& sources = selection.at(i);
        std::size_t index;
        if (sources.size() == 1) {
            auto [it, inserted] = group_of_source.try_emplace(*sources.begin(), plan.subqueries.size());
            index = it->second;
            if (inserted) plan.subqueries.push_back({{*sources.begin()}, {}, {}});
        } else {
            index = plan.subqueries.size();
            plan.subqueries.push_back({{sources.begin(), sources.end()}, {}, {}});
        }
        auto& sub = plan.subqueries[index];
        sub.pattern_indices.push_back(i);
        sub.query.patterns.push_back(query.patterns[i]);
    }

    std::vector<std::vector<std::string>> sub_vars;
    for (const auto& sub : plan.subqueries) sub_vars.push_back(variables_of(sub.query));

    for (const auto& f : query.filters) {
        bool pushed = false;
        if (options.push_filters) {
            for (std::size_t k = 0; k < plan.subqueries.size(); ++k) {
                if (contains(sub_vars[k], f.variable.name)) {
                    plan.subqueries[k].query.filters.push_back(f);
                    pushed = true;
                }
            }
        }
        if (!pushed) plan.residual_filters.push_back(f);
    }

    std::vector<std::string> needed = query.projected_names();
    for (const auto& f : plan.residual_filters) add_unique(needed, f.variable.name);
    for (std::size_t a = 0; a < sub_vars.size(); ++a) {
        for (std::size_t b = a + 1; b < sub_vars.size(); ++b) {
            for (const auto& v : sub_vars[a]) {
                if (contains(sub_vars[b], v)) add_unique(needed, v);
            }
        }
    }

    for (std::size_t k = 0; k < plan.subqueries.size(); ++k) {
        auto& q = plan.subqueries[k].query;
        q.prefixes = query.prefixes;
        q.distinct = query.distinct;
        for (const auto& v : needed) {
            if (contains(sub_vars[k], v)) q.projection.push_back({v});
        }
        if (q.projection.empty()) {
            // Nothing needed downstream: keep the row count by projecting all
            // variables, or use SELECT * when there are none.
            if (sub_vars[k].empty()) {
                q.select_all = true;
            } else {
                for (const auto& v : sub_vars[k]) q.projection.push_back({v});
            }
        }
    }

    for (std::size_t a = 0; a < plan.subqueries.size(); ++a) {
        auto left = plan.subqueries[a].query.projected_names();
        for (std::size_t b = a + 1; b < plan.subqueries.size(); ++b) {
            JoinEdge edge{a, b, {}};
            for (const auto& v : plan.subqueries[b].query.projected_names()) {
                if (contains(left, v)) edge.shared.push_back(v);
            }
            plan.join_graph.push_back(std::move(edge));
        }
    }
    return plan;
}

namespace {

struct KeyHash {
    std::size_t operator()(const Row& key) const {
        std::size_t h = 0x9e3779b97f4a7c15ULL;
        for (const auto& cell : key) {
            std::size_t v = cell ? rdf::TermHash{}(*cell) : 0;
            h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        }
        return h;
    }
};

SolutionSequence align(const SolutionSequence& result, const std::vector<std::string>& expected,
                       const std::string& source) {
    std::vector<std::size_t> columns;
    for (const auto& name : expected) {
        auto c = result.column(name);
        if (!c) throw FederationError(source, "result lacks variable ?" + name);
        columns.push_back(*c);
    }
    SolutionSequence out;
    out.variables = expected;
    out.rows.reserve(result.rows.size());
    for (const auto& row : result.rows) {
        if (row.size() != result.variables.size()) throw FederationError(source, "ragged result row");
        Row aligned;
        aligned.reserve(columns.size());
        for (auto c : columns) aligned.push_back(row[c]);
        out.rows.push_back(std::move(aligned));
    }
    return out;
}

SolutionSequence hash_join(const SolutionSequence& a, const SolutionSequence& b) {
    std::vector<std::size_t> shared_a, shared_b, extra_b;
    for (std::size_t j = 0; j < b.variables.size(); ++j) {
        if (auto i = a.column(b.variables[j])) {
            shared_a.push_back(*i);
            shared_b.push_back(j);
        } else {
            extra_b.push_back(j);
        }
    }
    SolutionSequence out;
    out.variables = a.variables;
    for (auto j : extra_b) out.variables.push_back(b.variables[j]);

    auto emit = [&](const Row& ra, const Row& rb) {
        Row row = ra;
        for (auto j : extra_b) row.push_back(rb[j]);
        out.rows.push_back(std::move(row));
    };
    std::unordered_multimap<Row, const Row*, KeyHash> table;
    table.reserve(b.rows.size());
    for (const auto& rb : b.rows) {
        Row key;
        for (auto j : shared_b) key.push_back(rb[j]);
        table.emplace(std::move(key), &rb);
    }
    for (const auto& ra : a.rows) {
        Row key;
        for (auto i : shared_a) key.push_back(ra[i]);
        auto [lo, hi] = table.equal_range(key);
        for (auto it = lo; it != hi; ++it) emit(ra, *it->second);
    }
    return out;
}

std::vector<std::size_t> greedy_order(const std::vector<SolutionSequence>& parts) {
    std::vector<std::size_t> remaining(parts.size());
    for (std::size_t i = 0; i < parts.size(); ++i) remaining[i] = i;
    auto by_size = [&](std::size_t x, std::size_t y) {
        return parts[x].rows.size() != parts[y].rows.size() ? parts[x].rows.size() < parts[y].rows.size() : x < y;
    };
    std::vector<std::size_t> order;
    std::vector<std::string> bound;
    while (!remaining.empty()) {
        auto best = remaining.end();
        for (auto it = remaining.begin(); it != remaining.end(); ++it) {
            bool connected = order.empty() || std::any_of(parts[*it].variables.begin(), parts[*it].variables.end(),
                                                          [&](const auto& v) { return contains(bound, v); });
            if (!connected) continue;
            if (best == remaining.end() || by_size(*it, *best)) best = it;
        }
        if (best == remaining.end()) best = std::min_element(remaining.begin(), remaining.end(), by_size);
        order.push_back(*best);
        for (const auto& v : parts[*best].variables) add_unique(bound, v);
        remaining.erase(best);
    }
    return order;
}

}  // namespace

SolutionSequence execute_federated(const DecomposedQuery& plan, const ClientMap& clients, ExecuteOptions options) {
    struct Task {
        std::size_t subquery;
        std::string source;
        std::future<SolutionSequence> result;
    };
    std::vector<std::string> texts;
    for (const auto& sub : plan.subqueries) texts.push_back(sparql::to_string(sub.query));

    std::vector<Task> tasks;
    for (std::size_t k = 0; k < plan.subqueries.size(); ++k) {
        for (const auto& source : plan.subqueries[k].sources) {
            auto it = clients.find(source);
            if (it == clients.end() || !it->second) throw FederationError(source, "no client for source");
        }
    }
    for (std::size_t k = 0; k < plan.subqueries.size(); ++k) {
        for (const auto& source : plan.subqueries[k].sources) {
            auto client = clients.at(source);
            tasks.push_back({k, source, std::async(std::launch::async, [client, &text = texts[k]] {
                                 return client->query(text);
                             })});
        }
    }

    std::vector<SolutionSequence> parts(plan.subqueries.size());
    for (std::size_t k = 0; k < plan.subqueries.size(); ++k) parts[k].variables = plan.subqueries[k].query.projected_names();
    std::optional<FederationError> failure;
    for (auto& task : tasks) {
        try {
            auto aligned = align(task.result.get(), parts[task.subquery].variables, task.source);
            auto& rows = parts[task.subquery].rows;
            rows.insert(rows.end(), std::make_move_iterator(aligned.rows.begin()),
                        std::make_move_iterator(aligned.rows.end()));
        } catch (const FederationError& e) {
            if (!failure) failure = e;
        } catch (const std::exception& e) {
            if (!failure) failure = FederationError(task.source, e.what());
        }
    }
    if (failure) throw *failure;
    for (std::size_t k = 0; k < parts.size(); ++k) {
        if (plan.subqueries[k].sources.size() > 1 && plan.subqueries[k].query.distinct) parts[k].deduplicate();
    }

    std::vector<std::size_t> order;
    if (options.join_order) {
        order = *options.join_order;
        auto sorted = order;
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t i = 0; i < sorted.size(); ++i) {
            if (sorted[i] != i || sorted.size() != parts.size()) throw Error("join order is not a permutation of the subqueries");
        }
    } else {
        order = greedy_order(parts);
    }

    SolutionSequence joined;
    joined.rows.emplace_back();
    for (auto k : order) {
        joined = hash_join(joined, parts[k]);
        if (joined.rows.empty()) break;
    }

    if (!plan.residual_filters.empty()) {
        std::erase_if(joined.rows, [&](const Row& row) {
            for (const auto& f : plan.residual_filters) {
                auto c = joined.column(f.variable.name);
                const rdf::Term* value = c && row[*c] ? &*row[*c] : nullptr;
                if (!sparql::filter_accepts(f, value)) return true;
            }
            return false;
        });
    }

    SolutionSequence out;
    out.variables = plan.original.projected_names();
    std::vector<std::optional<std::size_t>> columns;
    for (const auto& name : out.variables) columns.push_back(joined.column(name));
    out.rows.reserve(joined.rows.size());
    for (const auto& row : joined.rows) {
        Row projected;
        projected.reserve(columns.size());
        for (const auto& c : columns) projected.push_back(c ? row[*c] : std::nullopt);
        out.rows.push_back(std::move(projected));
    }
    if (plan.original.distinct) {
        out.deduplicate();
    } else {
        out.sort_rows();
    }
    if (plan.original.limit && out.rows.size() > *plan.original.limit) out.rows.resize(*plan.original.limit);
    return out;
}

SolutionSequence federated_query(const std::string& text, const FederationCatalog& catalog,
                                 const ClientFactory& make_client) {
    auto query = sparql::parse_query(text);
    auto plan = decompose(query, select_sources(query, catalog));
    ClientMap clients;
    for (const auto& sub : plan.subqueries) {
        for (const auto& id : sub.sources) {
            if (clients.count(id)) continue;
            try {
                clients[id] = make_client(*catalog.find(id));
            } catch (const FederationError&) {
                throw;
            } catch (const std::exception& e) {
                throw FederationError(id, e.what());
            }
        }
    }
    return execute_federated(plan, clients);
}

nlohmann::ordered_json plan_to_json(const DecomposedQuery& plan) {
    auto filter_text = [&](const sparql::Filter& f) {
        return "?" + f.variable.name + " " + std::string(sparql::to_string(f.op)) + " " +
               sparql::to_string(sparql::PatternTerm{f.constant}, plan.original.prefixes);
    };
    nlohmann::ordered_json doc;
    doc["subqueries"] = nlohmann::ordered_json::array();
    for (const auto& sub : plan.subqueries) {
        doc["subqueries"].push_back({{"sources", sub.sources},
                                     {"patterns", sub.pattern_indices},
                                     {"projection", sub.query.projected_names()},
                                     {"query", sparql::to_string(sub.query)}});
    }
    doc["joins"] = nlohmann::ordered_json::array();
    for (const auto& e : plan.join_graph) {
        doc["joins"].push_back({{"left", e.left}, {"right", e.right}, {"shared", e.shared}, {"cartesian", e.cartesian()}});
    }
    doc["residualFilters"] = nlohmann::ordered_json::array();
    for (const auto& f : plan.residual_filters) doc["residualFilters"].push_back(filter_text(f));
    return doc;
}

SolutionSequence LocalGraphClient::query(const std::string& query_text) {
    return sparql::evaluate(sparql::parse_query(query_text), *graph_);
}

}  // namespace ede::federation
