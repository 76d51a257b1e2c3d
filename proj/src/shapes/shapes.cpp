#include "ede/shapes/shapes.hpp"

#include "ede/error.hpp"
#include "ede/rdf/prefixes.hpp"
#include "ede/util/yaml.hpp"

#include "json.hpp"

#include <algorithm>
#include <set>

namespace ede::shapes {

using util::index_path;
using util::key_path;

std::size_t ValidationReport::count(std::string_view constraint) const {
    return static_cast<std::size_t>(std::count_if(violations.begin(), violations.end(),
                                                  [&](const Violation& v) { return v.constraint == constraint; }));
}

namespace {

std::string expand(const rdf::PrefixMap& prefixes, const std::string& text, const std::string& path) {
    try {
        return prefixes.expand(text);
    } catch (const ValidationError& e) {
        throw ConfigError(path, e.what());
    }
}

std::optional<std::size_t> count_key(const YAML::Node& node, const std::string& path, std::string_view key) {
    auto value = util::optional_integer(node, path, key);
    if (!value) return std::nullopt;
    if (*value < 0) throw ConfigError(key_path(path, key), "must be non-negative");
    return static_cast<std::size_t>(*value);
}

rdf::Term in_value(const rdf::PrefixMap& prefixes, const std::string& text, const std::string& path) {
    if (text.size() >= 2 && text.front() == '<' && text.back() == '>') {
        return rdf::Term::iri(expand(prefixes, text, path));
    }
    auto colon = text.find(':');
    if (colon != std::string::npos && prefixes.lookup(text.substr(0, colon))) {
        return rdf::Term::iri(expand(prefixes, text, path));
    }
    return rdf::Term::literal(text);
}

PropertyConstraint parse_property(const YAML::Node& node, const std::string& path, const rdf::PrefixMap& prefixes) {
    util::check_keys(node, path, {"path", "min_count", "max_count", "datatype", "node_kind", "class", "in"});
    PropertyConstraint pc;
    pc.path = expand(prefixes, util::require_string(node, path, "path"), key_path(path, "path"));
    pc.min_count = count_key(node, path, "min_count");
    pc.max_count = count_key(node, path, "max_count");
    if (pc.min_count && pc.max_count && *pc.min_count > *pc.max_count) {
        throw ConfigError(path, "min_count " + std::to_string(*pc.min_count) + " exceeds max_count " +
                                    std::to_string(*pc.max_count));
    }
    if (auto dt = util::optional_string(node, path, "datatype")) {
        pc.datatype = expand(prefixes, *dt, key_path(path, "datatype"));
    }
    if (auto kind = util::optional_string(node, path, "node_kind")) {
        if (*kind == "IRI") {
            pc.node_kind = NodeKind::Iri;
        } else if (*kind == "Literal") {
            pc.node_kind = NodeKind::Literal;
        } else {
            throw ConfigError(key_path(path, "node_kind"), "expected IRI or Literal, found '" + *kind + "'");
        }
    }
    if (auto cls = util::optional_string(node, path, "class")) {
        pc.value_class = expand(prefixes, *cls, key_path(path, "class"));
    }
    if (auto in = node["in"]; in && !in.IsNull()) {
        auto ipath = key_path(path, "in");
        auto values = util::string_list(in, ipath);
        pc.in.emplace();
        for (std::size_t i = 0; i < values.size(); ++i) {
            pc.in->push_back(in_value(prefixes, values[i], index_path(ipath, i)));
        }
    }
    return pc;
}

std::string kind_name(const rdf::Term& t) {
    switch (t.kind()) {
        case rdf::Term::Kind::Iri: return "IRI";
        case rdf::Term::Kind::Literal: return "Literal";
        case rdf::Term::Kind::BlankNode: return "BlankNode";
    }
    return "?";
}

}  // namespace

std::vector<Shape> parse_shapes(std::string_view text) {
    YAML::Node root = util::load_yaml(text);
    util::check_keys(root, "", {"prefixes", "shapes"});
    rdf::PrefixMap prefixes;
    if (auto p = root["prefixes"]; p && !p.IsNull()) {
        util::expect_map(p, "prefixes");
        for (const auto& kv : p) {
            auto label = kv.first.as<std::string>();
            prefixes.declare(label, util::scalar(kv.second, key_path("prefixes", label)));
        }
    }
    YAML::Node list = util::require(root, "", "shapes");
    util::expect_sequence(list, "shapes");
    std::vector<Shape> shapes;
    std::set<std::string> ids;
    for (std::size_t i = 0; i < list.size(); ++i) {
        auto path = index_path("shapes", i);
        const YAML::Node& node = list[i];
        util::check_keys(node, path, {"id", "target_class", "properties"});
        Shape shape;
        shape.id = util::optional_string(node, path, "id").value_or("shape" + std::to_string(i));
        if (!ids.insert(shape.id).second) throw ConfigError(key_path(path, "id"), "duplicate shape id '" + shape.id + "'");
        shape.target_class = expand(prefixes, util::require_string(node, path, "target_class"), key_path(path, "target_class"));
        if (auto props = node["properties"]; props && !props.IsNull()) {
            auto ppath = key_path(path, "properties");
            util::expect_sequence(props, ppath);
            for (std::size_t j = 0; j < props.size(); ++j) {
                shape.properties.push_back(parse_property(props[j], index_path(ppath, j), prefixes));
            }
        }
        shapes.push_back(std::move(shape));
    }
    return shapes;
}

ValidationReport validate(const rdf::Graph& graph, const std::vector<Shape>& shapes) {
    const auto type = rdf::Term::iri(std::string(rdf::kRdfType));
    ValidationReport report;
    for (const auto& shape : shapes) {
        auto target = rdf::Term::iri(shape.target_class);
        std::set<rdf::Term> focus_nodes;
        graph.for_each_match({std::nullopt, type, target}, [&](const rdf::Triple& t) { focus_nodes.insert(t.subject); });

        for (const auto& focus : focus_nodes) {
            for (const auto& pc : shape.properties) {
                auto predicate = rdf::Term::iri(pc.path);
                std::vector<rdf::Term> values;
                graph.for_each_match({focus, predicate, std::nullopt},
                                     [&](const rdf::Triple& t) { values.push_back(t.object); });
                auto fail = [&](std::string_view kind, std::string message) {
                    report.violations.push_back({focus, shape.id, std::string(kind), pc.path, std::move(message)});
                };
                auto first_bad = [&](auto&& ok) -> const rdf::Term* {
                    for (const auto& v : values) {
                        if (!ok(v)) return &v;
                    }
                    return nullptr;
                };

                if (pc.min_count && values.size() < *pc.min_count) {
                    fail(kMinCount, std::to_string(values.size()) + " value(s), at least " +
                                        std::to_string(*pc.min_count) + " required");
                }
                if (pc.max_count && values.size() > *pc.max_count) {
                    fail(kMaxCount, std::to_string(values.size()) + " value(s), at most " +
                                        std::to_string(*pc.max_count) + " allowed");
                }
                if (pc.datatype) {
                    auto bad = first_bad([&](const rdf::Term& v) {
                        return v.kind() == rdf::Term::Kind::Literal && v.datatype() == *pc.datatype;
                    });
                    if (bad) fail(kDatatype, bad->to_ntriples() + " is not of datatype <" + *pc.datatype + ">");
                }
                if (pc.node_kind) {
                    auto want = *pc.node_kind == NodeKind::Iri ? rdf::Term::Kind::Iri : rdf::Term::Kind::Literal;
                    auto bad = first_bad([&](const rdf::Term& v) { return v.kind() == want; });
                    if (bad) {
                        fail(kNodeKind, bad->to_ntriples() + " is a " + kind_name(*bad) + ", expected " +
                                            (want == rdf::Term::Kind::Iri ? "IRI" : "Literal"));
                    }
                }
                if (pc.value_class) {
                    auto cls = rdf::Term::iri(*pc.value_class);
                    auto bad = first_bad([&](const rdf::Term& v) {
                        return v.kind() != rdf::Term::Kind::Literal && graph.contains({v, type, cls});
                    });
                    if (bad) fail(kClass, bad->to_ntriples() + " has no rdf:type <" + *pc.value_class + ">");
                }
                if (pc.in) {
                    auto bad = first_bad([&](const rdf::Term& v) {
                        return std::find(pc.in->begin(), pc.in->end(), v) != pc.in->end();
                    });
                    if (bad) fail(kIn, bad->to_ntriples() + " is not among the allowed values");
                }
            }
        }
    }
    std::stable_sort(report.violations.begin(), report.violations.end(), [](const Violation& a, const Violation& b) {
        if (a.focus_node != b.focus_node) return a.focus_node.to_ntriples() < b.focus_node.to_ntriples();
        return a.path < b.path;
    });
    return report;
}

std::string report_to_json(const ValidationReport& report) {
    nlohmann::ordered_json doc;
    doc["conforms"] = report.conforms();
    doc["violations"] = nlohmann::ordered_json::array();
    for (const auto& v : report.violations) {
        doc["violations"].push_back({{"focusNode", v.focus_node.to_ntriples()},
                                     {"shape", v.shape_id},
                                     {"constraint", v.constraint},
                                     {"path", v.path},
                                     {"message", v.message}});
    }
    return doc.dump(2) + "\n";
}

}  // namespace ede::shapes
