#include "ede/federation/catalog.hpp"

#include "ede/error.hpp"
#include "ede/rdf/prefixes.hpp"
#include "ede/util/yaml.hpp"

#include <algorithm>

namespace ede::federation {

using util::index_path;
using util::key_path;

bool SourceDescription::class_wildcard() const {
    return std::find(classes.begin(), classes.end(), "*") != classes.end();
}

bool SourceDescription::has_class(std::string_view iri) const {
    return class_wildcard() || std::find(classes.begin(), classes.end(), iri) != classes.end();
}

const SourceDescription* FederationCatalog::find(std::string_view id) const {
    for (const auto& s : sources) {
        if (s.id == id) return &s;
    }
    return nullptr;
}

SourceDescription describe_graph(std::string id, const rdf::Graph& graph) {
    SourceDescription d;
    d.id = std::move(id);
    for (const auto& c : graph.classes()) {
        if (c.is_iri()) d.classes.push_back(c.value());
    }
    std::sort(d.classes.begin(), d.classes.end());
    for (const auto& p : graph.predicates()) {
        d.predicates.insert(p.value());
        d.predicate_counts[p.value()] = graph.predicate_count(p);
    }
    return d;
}

namespace {

std::string expand(const rdf::PrefixMap& prefixes, const std::string& text, const std::string& path) {
    try {
        return prefixes.expand(text);
    } catch (const ValidationError& e) {
        throw ConfigError(path, e.what());
    }
}

}  // namespace

FederationCatalog parse_catalog(std::string_view text) {
    YAML::Node root = util::load_yaml(text);
    util::check_keys(root, "", {"consumer", "prefixes", "sources"});
    FederationCatalog catalog;
    catalog.consumer = util::optional_string(root, "", "consumer").value_or("");
    rdf::PrefixMap prefixes;
    if (auto p = root["prefixes"]; p && !p.IsNull()) {
        util::expect_map(p, "prefixes");
        for (const auto& kv : p) {
            auto label = kv.first.as<std::string>();
            prefixes.declare(label, util::scalar(kv.second, key_path("prefixes", label)));
        }
    }
    YAML::Node list = util::require(root, "", "sources");
    util::expect_sequence(list, "sources");
    if (list.size() == 0) throw ConfigError("sources", "at least one source is required");
    for (std::size_t i = 0; i < list.size(); ++i) {
        auto path = index_path("sources", i);
        const YAML::Node& node = list[i];
        util::check_keys(node, path, {"id", "endpoint", "contract", "classes", "predicates", "counts"});
        SourceDescription s;
        s.id = util::require_string(node, path, "id");
        if (s.id.empty()) throw ConfigError(key_path(path, "id"), "must not be empty");
        if (catalog.find(s.id)) throw ConfigError(key_path(path, "id"), "duplicate source id '" + s.id + "'");
        s.endpoint = util::optional_string(node, path, "endpoint").value_or("");
        s.contract = util::optional_string(node, path, "contract").value_or("");
        if (auto classes = node["classes"]; classes && !classes.IsNull()) {
            auto cpath = key_path(path, "classes");
            auto values = util::string_list(classes, cpath);
            for (std::size_t j = 0; j < values.size(); ++j) {
                s.classes.push_back(values[j] == "*" ? values[j] : expand(prefixes, values[j], index_path(cpath, j)));
            }
        }
        auto ppath = key_path(path, "predicates");
        auto predicates = util::string_list(util::require(node, path, "predicates"), ppath);
        if (predicates.empty()) throw ConfigError(ppath, "at least one predicate is required");
        for (std::size_t j = 0; j < predicates.size(); ++j) {
            s.predicates.insert(expand(prefixes, predicates[j], index_path(ppath, j)));
        }
        if (auto counts = node["counts"]; counts && !counts.IsNull()) {
            auto cpath = key_path(path, "counts");
            util::expect_map(counts, cpath);
            for (const auto& kv : counts) {
                auto key = kv.first.as<std::string>();
                auto iri = expand(prefixes, key, key_path(cpath, key));
                auto value = util::optional_integer(counts, cpath, key);
                if (!value || *value < 0) throw ConfigError(key_path(cpath, key), "expected a non-negative integer");
                s.predicate_counts[iri] = static_cast<std::size_t>(*value);
            }
        }
        catalog.sources.push_back(std::move(s));
    }
    return catalog;
}

nlohmann::json description_to_json(const SourceDescription& source) {
    nlohmann::json counts = nlohmann::json::object();
    for (const auto& [p, n] : source.predicate_counts) counts[p] = n;
    return {{"id", source.id},
            {"endpoint", source.endpoint},
            {"classes", source.classes},
            {"predicates", source.predicates},
            {"counts", counts}};
}

SourceDescription description_from_json(const nlohmann::json& doc) {
    try {
        SourceDescription s;
        s.id = doc.at("id").get<std::string>();
        s.endpoint = doc.value("endpoint", "");
        s.classes = doc.at("classes").get<std::vector<std::string>>();
        for (const auto& p : doc.at("predicates")) s.predicates.insert(p.get<std::string>());
        if (doc.contains("counts")) {
            for (const auto& [p, n] : doc.at("counts").items()) s.predicate_counts[p] = n.get<std::size_t>();
        }
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("malformed source description: ") + e.what());
    }
}

}  // namespace ede::federation
