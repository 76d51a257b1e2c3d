#include "ede/sparql/evaluator.hpp"

#include <algorithm>
#include <cstdlib>
#include <unordered_map>

namespace ede::sparql {

namespace {

constexpr std::string_view kNumericTypes[] = {
    "integer", "decimal", "double", "float", "int", "long", "short", "byte",
    "nonNegativeInteger", "positiveInteger", "negativeInteger", "nonPositiveInteger",
    "unsignedInt", "unsignedLong", "unsignedShort", "unsignedByte",
};

std::optional<long double> numeric_value(const rdf::Term& t) {
    if (!t.is_literal() || !is_numeric_datatype(t.datatype())) return std::nullopt;
    const std::string& s = t.value();
    if (s.empty()) return std::nullopt;
    char* end = nullptr;
    long double v = std::strtold(s.c_str(), &end);
    if (end != s.c_str() + s.size()) return std::nullopt;
    return v;
}

template <typename T>
bool apply(CompareOp op, const T& a, const T& b) {
    switch (op) {
        case CompareOp::Eq: return a == b;
        case CompareOp::Ne: return !(a == b);
        case CompareOp::Lt: return a < b;
        case CompareOp::Le: return a < b || a == b;
        case CompareOp::Gt: return b < a;
        case CompareOp::Ge: return b < a || a == b;
    }
    return false;
}

/// Variable name → slot, covering pattern and filter variables.
struct Slots {
    std::unordered_map<std::string, std::size_t> index;
    std::size_t add(const std::string& name) {
        auto [it, inserted] = index.emplace(name, index.size());
        return it->second;
    }
    std::optional<std::size_t> find(const std::string& name) const {
        auto it = index.find(name);
        if (it == index.end()) return std::nullopt;
        return it->second;
    }
};

struct CompiledPosition {
    const rdf::Term* constant = nullptr;
    std::size_t slot = 0;
};

struct CompiledPattern {
    CompiledPosition s, p, o;
};

CompiledPosition compile(const PatternTerm& t, Slots& slots) {
    CompiledPosition pos;
    if (const auto* v = as_variable(t)) {
        pos.slot = slots.add(v->name);
    } else {
        pos.constant = as_term(t);
    }
    return pos;
}

using Binding = std::vector<const rdf::Term*>;

}  // namespace

bool is_numeric_datatype(std::string_view datatype_iri) {
    if (datatype_iri.substr(0, rdf::kXsd.size()) != rdf::kXsd) return false;
    auto local = datatype_iri.substr(rdf::kXsd.size());
    return std::find(std::begin(kNumericTypes), std::end(kNumericTypes), local) != std::end(kNumericTypes);
}

bool filter_accepts(const Filter& filter, const rdf::Term* value) {
    if (value == nullptr) return false;
    auto lhs = numeric_value(*value);
    auto rhs = numeric_value(filter.constant);
    if (lhs && rhs) return apply(filter.op, *lhs, *rhs);
    if (filter.op == CompareOp::Eq) return *value == filter.constant;
    if (filter.op == CompareOp::Ne) return !(*value == filter.constant);
    // Ordering a number against a non-number is a type error, hence false.
    if (lhs.has_value() != rhs.has_value()) return false;
    return apply(filter.op, value->value(), filter.constant.value());
}

std::vector<std::size_t> plan_order(const Query& query, const rdf::Graph& graph) {
    std::vector<std::size_t> order;
    std::vector<bool> used(query.patterns.size(), false);
    std::vector<std::string> bound;
    auto is_bound = [&](const PatternTerm& t) {
        const auto* v = as_variable(t);
        return v == nullptr || std::find(bound.begin(), bound.end(), v->name) != bound.end();
    };
    auto constant_of = [](const PatternTerm& t) -> std::optional<rdf::Term> {
        if (const auto* term = as_term(t)) return *term;
        return std::nullopt;
    };
    for (std::size_t step = 0; step < query.patterns.size(); ++step) {
        std::size_t best = 0;
        int best_bound = -1;
        std::size_t best_card = 0;
        for (std::size_t i = 0; i < query.patterns.size(); ++i) {
            if (used[i]) continue;
            const auto& p = query.patterns[i];
            int n = int(is_bound(p.subject)) + int(is_bound(p.predicate)) + int(is_bound(p.object));
            std::size_t card = graph.estimate(
                {constant_of(p.subject), constant_of(p.predicate), constant_of(p.object)});
            if (n > best_bound || (n == best_bound && card < best_card)) {
                best = i;
                best_bound = n;
                best_card = card;
            }
        }
        used[best] = true;
        order.push_back(best);
        for (const auto& name : query.patterns[best].variables()) {
            if (std::find(bound.begin(), bound.end(), name) == bound.end()) bound.push_back(name);
        }
    }
    return order;
}

SolutionSequence evaluate(const Query& query, const rdf::Graph& graph) {
    Slots slots;
    std::vector<CompiledPattern> compiled;
    for (const auto& p : query.patterns) {
        compiled.push_back({compile(p.subject, slots), compile(p.predicate, slots), compile(p.object, slots)});
    }
    for (const auto& f : query.filters) slots.add(f.variable.name);
    auto projected = query.projected_names();
    for (const auto& name : projected) slots.add(name);
    const std::size_t width = slots.index.size();

    auto order = plan_order(query, graph);

    // Each filter runs right after the step that first binds its variable;
    // filters on variables no pattern binds reject everything.
    std::vector<std::vector<const Filter*>> filters_after(order.size());
    bool unsatisfiable = false;
    for (const auto& f : query.filters) {
        std::optional<std::size_t> step;
        for (std::size_t k = 0; k < order.size() && !step; ++k) {
            auto vars = query.patterns[order[k]].variables();
            if (std::find(vars.begin(), vars.end(), f.variable.name) != vars.end()) step = k;
        }
        if (step) {
            filters_after[*step].push_back(&f);
        } else {
            unsatisfiable = true;
        }
    }

    std::vector<Binding> current;
    if (!unsatisfiable) current.emplace_back(width, nullptr);
    for (std::size_t k = 0; k < order.size() && !current.empty(); ++k) {
        const auto& cp = compiled[order[k]];
        std::vector<Binding> next;
        for (const auto& binding : current) {
            auto resolve = [&](const CompiledPosition& pos) -> std::optional<rdf::Term> {
                if (pos.constant != nullptr) return *pos.constant;
                if (binding[pos.slot] != nullptr) return *binding[pos.slot];
                return std::nullopt;
            };
            rdf::TriplePatternSpec spec{resolve(cp.s), resolve(cp.p), resolve(cp.o)};
            graph.for_each_match(spec, [&](const rdf::Triple& t) {
                Binding extended = binding;
                auto bind = [&](const CompiledPosition& pos, const rdf::Term& value) {
                    if (pos.constant != nullptr) return true;
                    auto& cell = extended[pos.slot];
                    if (cell == nullptr) {
                        cell = &value;
                        return true;
                    }
                    return *cell == value;
                };
                if (!bind(cp.s, t.subject) || !bind(cp.p, t.predicate) || !bind(cp.o, t.object)) return;
                for (const Filter* f : filters_after[k]) {
                    if (!filter_accepts(*f, extended[*slots.find(f->variable.name)])) return;
                }
                next.push_back(std::move(extended));
            });
        }
        current = std::move(next);
    }

    SolutionSequence out;
    out.variables = projected;
    out.rows.reserve(current.size());
    std::vector<std::size_t> columns;
    for (const auto& name : projected) columns.push_back(*slots.find(name));
    for (const auto& binding : current) {
        Row row;
        row.reserve(columns.size());
        for (auto c : columns) {
            row.push_back(binding[c] ? std::optional<rdf::Term>(*binding[c]) : std::nullopt);
        }
        out.rows.push_back(std::move(row));
    }
    if (query.distinct) {
        out.deduplicate();
    } else {
        out.sort_rows();
    }
    if (query.limit && out.rows.size() > *query.limit) out.rows.resize(*query.limit);
    return out;
}

}  // namespace ede::sparql
