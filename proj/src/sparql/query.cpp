#include "ede/sparql/query.hpp"

#include <algorithm>
#include <cctype>

namespace ede::sparql {

namespace {

void add_unique(std::vector<std::string>& out, const PatternTerm& t) {
    if (const auto* v = as_variable(t)) {
        if (std::find(out.begin(), out.end(), v->name) == out.end()) out.push_back(v->name);
    }
}

bool is_simple_local(std::string_view local) {
    if (local.empty()) return false;
    auto first = static_cast<unsigned char>(local.front());
    if (!std::isalnum(first) && first != '_') return false;
    return std::all_of(local.begin(), local.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
    });
}

std::string render_iri(const std::string& iri,
                       const std::vector<std::pair<std::string, std::string>>& prefixes) {
    const std::pair<std::string, std::string>* best = nullptr;
    for (const auto& p : prefixes) {
        if (iri.size() > p.second.size() && iri.compare(0, p.second.size(), p.second) == 0 &&
            is_simple_local(std::string_view(iri).substr(p.second.size())) &&
            (best == nullptr || p.second.size() > best->second.size())) {
            best = &p;
        }
    }
    if (best != nullptr) return best->first + ":" + iri.substr(best->second.size());
    return "<" + iri + ">";
}

std::string render_term(const rdf::Term& term,
                        const std::vector<std::pair<std::string, std::string>>& prefixes) {
    if (term.is_iri()) return render_iri(term.value(), prefixes);
    if (term.is_blank()) return "_:" + term.value();
    std::string out = "\"" + rdf::escape_string(term.value()) + "\"";
    if (!term.language().empty()) return out + "@" + term.language();
    if (term.datatype() != rdf::kXsdString) out += "^^" + render_iri(term.datatype(), prefixes);
    return out;
}

}  // namespace

std::vector<std::string> TriplePattern::variables() const {
    std::vector<std::string> out;
    add_unique(out, subject);
    add_unique(out, predicate);
    add_unique(out, object);
    return out;
}

std::string_view to_string(CompareOp op) {
    switch (op) {
        case CompareOp::Eq: return "=";
        case CompareOp::Ne: return "!=";
        case CompareOp::Lt: return "<";
        case CompareOp::Le: return "<=";
        case CompareOp::Gt: return ">";
        case CompareOp::Ge: return ">=";
    }
    return "?";
}

std::vector<std::string> Query::pattern_variables() const {
    std::vector<std::string> out;
    for (const auto& p : patterns) {
        add_unique(out, p.subject);
        add_unique(out, p.predicate);
        add_unique(out, p.object);
    }
    return out;
}

std::vector<std::string> Query::projected_names() const {
    if (select_all) return pattern_variables();
    std::vector<std::string> out;
    for (const auto& v : projection) out.push_back(v.name);
    return out;
}

std::vector<std::string> Query::unbound_projection() const {
    auto bound = pattern_variables();
    for (const auto& f : filters) bound.push_back(f.variable.name);
    std::vector<std::string> out;
    for (const auto& name : projected_names()) {
        if (std::find(bound.begin(), bound.end(), name) == bound.end()) out.push_back(name);
    }
    return out;
}

std::string to_string(const PatternTerm& term,
                      const std::vector<std::pair<std::string, std::string>>& prefixes) {
    if (const auto* v = as_variable(term)) return "?" + v->name;
    return render_term(std::get<rdf::Term>(term), prefixes);
}

std::string to_string(const TriplePattern& pattern,
                      const std::vector<std::pair<std::string, std::string>>& prefixes) {
    const auto* pred = as_term(pattern.predicate);
    std::string verb = (pred != nullptr && pred->value() == rdf::kRdfType)
                           ? std::string("a")
                           : to_string(pattern.predicate, prefixes);
    return to_string(pattern.subject, prefixes) + " " + verb + " " +
           to_string(pattern.object, prefixes) + " .";
}

std::string to_string(const Query& query) {
    std::string out;
    for (const auto& [label, base] : query.prefixes) out += "PREFIX " + label + ": <" + base + ">\n";
    out += "SELECT ";
    if (query.distinct) out += "DISTINCT ";
    if (query.select_all) {
        out += "*";
    } else {
        for (std::size_t i = 0; i < query.projection.size(); ++i) {
            if (i != 0) out += " ";
            out += "?" + query.projection[i].name;
        }
    }
    out += "\nWHERE {\n";
    for (const auto& p : query.patterns) out += "  " + to_string(p, query.prefixes) + "\n";
    for (const auto& f : query.filters) {
        out += "  FILTER(?" + f.variable.name + " " + std::string(to_string(f.op)) + " " +
               render_term(f.constant, query.prefixes) + ")\n";
    }
    out += "}";
    if (query.limit) out += "\nLIMIT " + std::to_string(*query.limit);
    out += "\n";
    return out;
}

}  // namespace ede::sparql
