#include "ede/rdf/graph.hpp"

#include <limits>

namespace ede::rdf {

std::size_t Graph::insert(Triple triple) {
    validate(triple);
    if (ids_.count(triple) != 0) return triples_.size();
    auto id = static_cast<std::uint32_t>(triples_.size());
    by_subject_[triple.subject].push_back(id);
    by_predicate_[triple.predicate].push_back(id);
    by_object_[triple.object].push_back(id);
    ids_.emplace(triple, id);
    triples_.push_back(std::move(triple));
    return triples_.size();
}

void Graph::merge(const Graph& other) {
    for (const auto& t : other.triples_) insert(t);
}

bool Graph::matches(const Triple& t, const TriplePatternSpec& p) {
    return (!p.subject || *p.subject == t.subject) && (!p.predicate || *p.predicate == t.predicate) &&
           (!p.object || *p.object == t.object);
}

bool Graph::select_candidates(const TriplePatternSpec& pattern,
                              const std::vector<std::uint32_t>*& out) const {
    out = nullptr;
    auto consider = [&](const std::optional<Term>& term, const Index& index) {
        if (!term) return true;
        auto it = index.find(*term);
        if (it == index.end()) return false;
        if (out == nullptr || it->second.size() < out->size()) out = &it->second;
        return true;
    };
    return consider(pattern.subject, by_subject_) && consider(pattern.predicate, by_predicate_) &&
           consider(pattern.object, by_object_);
}

std::vector<Triple> Graph::match(const TriplePatternSpec& pattern) const {
    std::vector<Triple> out;
    for_each_match(pattern, [&](const Triple& t) { out.push_back(t); });
    return out;
}

std::size_t Graph::estimate(const TriplePatternSpec& pattern) const {
    const std::vector<std::uint32_t>* candidates = nullptr;
    if (!select_candidates(pattern, candidates)) return 0;
    if (candidates == nullptr) return triples_.size();
    if (pattern.subject && pattern.predicate && pattern.object) {
        return contains(Triple{*pattern.subject, *pattern.predicate, *pattern.object}) ? 1 : 0;
    }
    return candidates->size();
}

std::vector<Term> Graph::predicates() const {
    std::vector<Term> out;
    std::unordered_set<Term, TermHash> seen;
    for (const auto& t : triples_) {
        if (seen.insert(t.predicate).second) out.push_back(t.predicate);
    }
    return out;
}

std::vector<Term> Graph::classes() const {
    std::vector<Term> out;
    auto it = by_predicate_.find(Term::iri(std::string(kRdfType)));
    if (it == by_predicate_.end()) return out;
    std::unordered_set<Term, TermHash> seen;
    for (auto id : it->second) {
        const auto& cls = triples_[id].object;
        if (seen.insert(cls).second) out.push_back(cls);
    }
    return out;
}

std::size_t Graph::predicate_count(const Term& predicate) const {
    auto it = by_predicate_.find(predicate);
    return it == by_predicate_.end() ? 0 : it->second.size();
}

bool operator==(const Graph& a, const Graph& b) {
    if (a.size() != b.size()) return false;
    for (const auto& t : a.triples_) {
        if (!b.contains(t)) return false;
    }
    return true;
}

}  // namespace ede::rdf
