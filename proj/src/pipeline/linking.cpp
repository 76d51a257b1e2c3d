#include "ede/pipeline/linking.hpp"

#include <map>
#include <set>

namespace ede::pipeline {

LinkResult link_entities(const rdf::Graph& graph, const rdf::Graph& reference, const LinkSpec& spec) {
    LinkResult result{graph, {}, {}};
    auto label = rdf::Term::iri(spec.label_predicate);
    auto link = rdf::Term::iri(spec.link_predicate);

    std::map<std::string, std::set<rdf::Term>> by_label;
    reference.for_each_match({std::nullopt, label, std::nullopt}, [&](const rdf::Triple& t) {
        if (t.object.is_literal()) by_label[t.object.value()].insert(t.subject);
    });

    std::set<std::pair<rdf::Term, std::string>> seen;
    graph.for_each_match({std::nullopt, label, std::nullopt}, [&](const rdf::Triple& t) {
        if (!t.object.is_literal() || !seen.insert({t.subject, t.object.value()}).second) return;
        auto it = by_label.find(t.object.value());
        if (it == by_label.end()) return;
        std::size_t matches = 0;
        for (const auto& target : it->second) {
            if (target == t.subject) continue;
            ++matches;
            rdf::Triple triple{t.subject, link, target};
            if (result.graph.contains(triple)) continue;
            result.graph.insert(triple);
            result.links.push_back(std::move(triple));
        }
        if (matches > 1) result.ambiguous.push_back({t.subject, t.object.value(), matches});
    });
    return result;
}

}  // namespace ede::pipeline
