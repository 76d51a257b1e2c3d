#pragma once

// Seeded generators shared by the property-style tests.

#include "ede/rdf/graph.hpp"

#include <random>
#include <string>
#include <vector>

namespace ede::gen {

struct RandomGraphOptions {
    std::size_t triples = 200;
    std::size_t subjects = 20;
    std::size_t predicates = 5;
    std::size_t literals = 10;
    bool blank_nodes = false;
    bool exotic_literals = false;
};

inline std::string node_iri(std::size_t i) { return "http://example.org/n" + std::to_string(i); }
inline std::string pred_iri(std::size_t i) { return "http://example.org/p" + std::to_string(i); }

inline rdf::Term random_literal(std::mt19937_64& rng, std::size_t pool, bool exotic) {
    std::size_t i = rng() % pool;
    if (!exotic) {
        switch (i % 3) {
            case 0: return rdf::Term::literal("v" + std::to_string(i));
            case 1: return rdf::Term::literal(std::to_string(i), "http://www.w3.org/2001/XMLSchema#integer");
            default: return rdf::Term::literal(std::to_string(i) + ".5", "http://www.w3.org/2001/XMLSchema#decimal");
        }
    }
    switch (i % 6) {
        case 0: return rdf::Term::literal("line\nbreak \"quoted\" \\ " + std::to_string(i));
        case 1: return rdf::Term::lang_literal("hello " + std::to_string(i), i % 2 ? "en" : "sr-Latn");
        case 2: return rdf::Term::literal("tab\there\r" + std::to_string(i));
        case 3: return rdf::Term::literal("\xC5\xA0umadija " + std::to_string(i));
        case 4: return rdf::Term::literal("", "http://www.w3.org/2001/XMLSchema#string");
        default: return rdf::Term::literal(std::to_string(i), "http://www.w3.org/2001/XMLSchema#integer");
    }
}

inline rdf::Graph random_graph(std::mt19937_64& rng, const RandomGraphOptions& opt) {
    rdf::Graph g;
    auto subject = [&]() {
        std::size_t i = rng() % opt.subjects;
        if (opt.blank_nodes && i % 4 == 0) return rdf::Term::blank("b" + std::to_string(i));
        return rdf::Term::iri(node_iri(i));
    };
    for (std::size_t n = 0; n < opt.triples; ++n) {
        auto s = subject();
        auto p = rdf::Term::iri(pred_iri(rng() % opt.predicates));
        rdf::Term o = (rng() % 2 == 0) ? subject() : random_literal(rng, opt.literals, opt.exotic_literals);
        g.insert(rdf::Triple{s, p, o});
    }
    return g;
}

}  // namespace ede::gen
