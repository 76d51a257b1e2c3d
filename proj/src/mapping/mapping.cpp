#include "ede/mapping/mapping.hpp"

#include "ede/error.hpp"
#include "ede/rdf/prefixes.hpp"
#include "ede/util/yaml.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace ede::mapping {

using util::index_path;
using util::key_path;

Template Template::parse(std::string_view text) {
    Template t;
    t.text_ = std::string(text);
    std::string literal;
    std::size_t pos = 0;
    while (pos < text.size()) {
        char c = text[pos];
        if (c == '}') throw ValidationError("unbalanced '}' in template '" + t.text_ + "'");
        if (c != '{') {
            literal.push_back(c);
            ++pos;
            continue;
        }
        auto close = text.find('}', pos);
        if (close == std::string_view::npos) throw ValidationError("unclosed '{' in template '" + t.text_ + "'");
        auto name = text.substr(pos + 1, close - pos - 1);
        if (name.empty() || name.find('{') != std::string_view::npos) {
            throw ValidationError("malformed placeholder in template '" + t.text_ + "'");
        }
        if (!literal.empty()) t.segments_.push_back({false, std::move(literal)});
        literal.clear();
        t.segments_.push_back({true, std::string(name)});
        pos = close + 1;
    }
    if (!literal.empty()) t.segments_.push_back({false, std::move(literal)});
    return t;
}

std::vector<std::string> Template::fields() const {
    std::vector<std::string> out;
    for (const auto& s : segments_) {
        if (s.is_field) out.push_back(s.value);
    }
    return out;
}

std::string percent_encode(std::string_view value) {
    static constexpr char kHex[] = "0123456789ABCDEF";
    std::string out;
    for (char c : value) {
        auto u = static_cast<unsigned char>(c);
        if (std::isalnum(u) || c == '-' || c == '.' || c == '_' || c == '~') {
            out.push_back(c);
        } else {
            out.push_back('%');
            out.push_back(kHex[u >> 4]);
            out.push_back(kHex[u & 0xf]);
        }
    }
    return out;
}

std::optional<std::string> Template::render(const RawRecord& record) const {
    std::string out;
    for (const auto& s : segments_) {
        if (!s.is_field) {
            out += s.value;
            continue;
        }
        auto value = record.get(s.value);
        if (!value) return std::nullopt;
        out += percent_encode(*value);
    }
    return out;
}

std::vector<std::string> TripleMap::referenced_fields() const {
    std::vector<std::string> out = subject.fields();
    for (const auto& po : predicate_objects) {
        if (const auto* f = std::get_if<FieldObject>(&po.object)) out.push_back(f->field);
        if (const auto* t = std::get_if<TemplateObject>(&po.object)) {
            for (auto& name : t->iri.fields()) out.push_back(std::move(name));
        }
    }
    if (source.filter) out.push_back(source.filter->field);
    std::vector<std::string> unique;
    for (auto& name : out) {
        if (std::find(unique.begin(), unique.end(), name) == unique.end()) unique.push_back(std::move(name));
    }
    return unique;
}

std::optional<SourceFormat> format_from_name(std::string_view name) {
    if (name == "csv") return SourceFormat::Csv;
    if (name == "jsonl" || name == "json-lines" || name == "jsonlines") return SourceFormat::JsonLines;
    return std::nullopt;
}

namespace {

std::string expand_iri(const rdf::PrefixMap& prefixes, const std::string& text, const std::string& path) {
    try {
        return prefixes.expand(text);
    } catch (const ValidationError& e) {
        throw ConfigError(path, e.what());
    }
}

Template parse_template(const std::string& text, const std::string& path) {
    try {
        return Template::parse(text);
    } catch (const ValidationError& e) {
        throw ConfigError(path, e.what());
    }
}

bool looks_like_iri(const rdf::PrefixMap& prefixes, const std::string& text) {
    if (text.size() >= 2 && text.front() == '<' && text.back() == '>') return true;
    auto colon = text.find(':');
    return colon != std::string::npos && prefixes.lookup(text.substr(0, colon)).has_value();
}

LogicalSource parse_source(const YAML::Node& node, const std::string& path) {
    util::check_keys(node, path, {"name", "path", "format", "fields", "filter"});
    LogicalSource src;
    src.path = util::require_string(node, path, "path");
    src.name = util::optional_string(node, path, "name").value_or(src.path);
    if (auto fmt = util::optional_string(node, path, "format")) {
        auto parsed = format_from_name(*fmt);
        if (!parsed) throw ConfigError(key_path(path, "format"), "unknown format '" + *fmt + "' (csv or jsonl)");
        src.format = *parsed;
    } else {
        src.format = (src.path.size() >= 6 && src.path.substr(src.path.size() - 6) == ".jsonl")
                         ? SourceFormat::JsonLines
                         : SourceFormat::Csv;
    }
    if (auto fields = node["fields"]; fields && !fields.IsNull()) {
        src.fields = util::string_list(fields, key_path(path, "fields"));
    }
    if (auto filter = node["filter"]; filter && !filter.IsNull()) {
        auto fpath = key_path(path, "filter");
        util::check_keys(filter, fpath, {"field", "equals"});
        src.filter = RecordFilter{util::require_string(filter, fpath, "field"),
                                  util::require_string(filter, fpath, "equals")};
    }
    return src;
}

PredicateObjectMap parse_po(const YAML::Node& node, const std::string& path, const rdf::PrefixMap& prefixes) {
    util::check_keys(node, path, {"predicate", "field", "constant", "template", "datatype", "language"});
    PredicateObjectMap po;
    po.predicate = expand_iri(prefixes, util::require_string(node, path, "predicate"), key_path(path, "predicate"));
    auto field = util::optional_string(node, path, "field");
    auto constant = util::optional_string(node, path, "constant");
    auto tmpl = util::optional_string(node, path, "template");
    auto datatype = util::optional_string(node, path, "datatype");
    auto language = util::optional_string(node, path, "language");
    int kinds = int(field.has_value()) + int(constant.has_value()) + int(tmpl.has_value());
    if (kinds != 1) throw ConfigError(path, "exactly one of 'field', 'constant' or 'template' is required");
    if (datatype && language) throw ConfigError(path, "'datatype' and 'language' are mutually exclusive");
    if (tmpl && (datatype || language)) {
        throw ConfigError(key_path(path, datatype ? "datatype" : "language"), "not allowed with 'template'");
    }
    std::optional<std::string> dt;
    if (datatype) dt = expand_iri(prefixes, *datatype, key_path(path, "datatype"));
    if (language && !rdf::is_valid_language_tag(*language)) {
        throw ConfigError(key_path(path, "language"), "invalid language tag '" + *language + "'");
    }
    if (field) {
        po.object = FieldObject{*field, dt, language};
    } else if (tmpl) {
        po.object = TemplateObject{parse_template(*tmpl, key_path(path, "template"))};
    } else if (looks_like_iri(prefixes, *constant)) {
        if (dt || language) throw ConfigError(path, "an IRI constant takes no datatype or language");
        po.object = ConstantObject{rdf::Term::iri(expand_iri(prefixes, *constant, key_path(path, "constant")))};
    } else {
        try {
            po.object = ConstantObject{language ? rdf::Term::lang_literal(*constant, *language)
                                                : rdf::Term::literal(*constant, dt.value_or(std::string(rdf::kXsdString)))};
        } catch (const ValidationError& e) {
            throw ConfigError(key_path(path, "constant"), e.what());
        }
    }
    return po;
}

}  // namespace

void check_fields(const TripleMap& map, std::size_t map_index, const std::vector<std::string>& header) {
    for (const auto& name : map.referenced_fields()) {
        if (std::find(header.begin(), header.end(), name) == header.end()) {
            throw ConfigError(index_path("maps", map_index),
                              "field '" + name + "' is not in the header of source '" + map.source.path + "'");
        }
    }
}

MappingDocument parse_mapping(std::string_view text) {
    YAML::Node root = util::load_yaml(text);
    util::check_keys(root, "", {"prefixes", "maps"});
    rdf::PrefixMap prefixes;
    if (auto p = root["prefixes"]; p && !p.IsNull()) {
        util::expect_map(p, "prefixes");
        for (const auto& kv : p) {
            auto label = kv.first.as<std::string>();
            prefixes.declare(label, util::scalar(kv.second, key_path("prefixes", label)));
        }
    }
    YAML::Node maps = util::require(root, "", "maps");
    util::expect_sequence(maps, "maps");
    MappingDocument doc;
    std::set<std::string> ids;
    for (std::size_t i = 0; i < maps.size(); ++i) {
        auto path = index_path("maps", i);
        const YAML::Node& node = maps[i];
        util::check_keys(node, path, {"id", "source", "subject", "po"});
        TripleMap map;
        map.id = util::optional_string(node, path, "id").value_or("map" + std::to_string(i));
        if (!ids.insert(map.id).second) throw ConfigError(key_path(path, "id"), "duplicate map id '" + map.id + "'");
        map.source = parse_source(util::require(node, path, "source"), key_path(path, "source"));

        auto spath = key_path(path, "subject");
        YAML::Node subject = util::require(node, path, "subject");
        util::check_keys(subject, spath, {"template", "class"});
        map.subject = parse_template(util::require_string(subject, spath, "template"), key_path(spath, "template"));
        if (auto cls = util::optional_string(subject, spath, "class")) {
            map.subject_class = expand_iri(prefixes, *cls, key_path(spath, "class"));
        }

        if (auto po = node["po"]; po && !po.IsNull()) {
            auto ppath = key_path(path, "po");
            util::expect_sequence(po, ppath);
            for (std::size_t j = 0; j < po.size(); ++j) {
                map.predicate_objects.push_back(parse_po(po[j], index_path(ppath, j), prefixes));
            }
        }
        if (!map.source.fields.empty()) check_fields(map, i, map.source.fields);
        doc.maps.push_back(std::move(map));
    }
    return doc;
}

namespace {

void apply_map(const TripleMap& map, std::size_t map_index, std::span<const RawRecord> records,
               MappingResult& result) {
    const auto type = rdf::Term::iri(std::string(rdf::kRdfType));
    std::optional<rdf::Term> cls;
    if (map.subject_class) cls = rdf::Term::iri(*map.subject_class);
    std::vector<rdf::Term> predicates;
    for (const auto& po : map.predicate_objects) predicates.push_back(rdf::Term::iri(po.predicate));

    for (std::size_t r = 0; r < records.size(); ++r) {
        const auto& record = records[r];
        if (map.source.filter && record.get(map.source.filter->field) != map.source.filter->equals) continue;
        auto subject_iri = map.subject.render(record);
        if (!subject_iri) {
            result.errors.push_back({map_index, r, "subject template '" + map.subject.text() + "' references a missing value"});
            continue;
        }
        if (!rdf::is_valid_iri(*subject_iri)) {
            result.errors.push_back({map_index, r, "subject template rendered invalid IRI '" + *subject_iri + "'"});
            continue;
        }
        auto subject = rdf::Term::iri(std::move(*subject_iri));
        if (cls) result.graph.insert({subject, type, *cls});
        for (std::size_t k = 0; k < map.predicate_objects.size(); ++k) {
            const auto& spec = map.predicate_objects[k].object;
            std::optional<rdf::Term> object;
            if (const auto* f = std::get_if<FieldObject>(&spec)) {
                auto value = record.get(f->field);
                if (!value) continue;
                if (f->language) {
                    object = rdf::Term::lang_literal(std::move(*value), *f->language);
                } else {
                    object = rdf::Term::literal(std::move(*value), f->datatype.value_or(std::string(rdf::kXsdString)));
                }
            } else if (const auto* c = std::get_if<ConstantObject>(&spec)) {
                object = c->term;
            } else {
                const auto& t = std::get<TemplateObject>(spec);
                auto iri = t.iri.render(record);
                if (!iri) continue;
                if (!rdf::is_valid_iri(*iri)) {
                    result.errors.push_back({map_index, r, "object template rendered invalid IRI '" + *iri + "'"});
                    continue;
                }
                object = rdf::Term::iri(std::move(*iri));
            }
            result.graph.insert({subject, predicates[k], std::move(*object)});
        }
    }
}

}  // namespace

MappingResult apply_mapping(const MappingDocument& doc, std::span<const RawRecord> records) {
    MappingResult result;
    for (std::size_t i = 0; i < doc.maps.size(); ++i) apply_map(doc.maps[i], i, records, result);
    return result;
}

MappingResult apply_mapping(const MappingDocument& doc,
                            const std::map<std::string, std::vector<RawRecord>>& by_source) {
    MappingResult result;
    for (std::size_t i = 0; i < doc.maps.size(); ++i) {
        auto it = by_source.find(doc.maps[i].source.name);
        if (it != by_source.end()) apply_map(doc.maps[i], i, it->second, result);
    }
    return result;
}

std::map<std::string, std::vector<RawRecord>> load_sources(const MappingDocument& doc,
                                                           const std::filesystem::path& base_dir) {
    std::map<std::string, std::vector<RawRecord>> out;
    std::map<std::string, std::vector<std::string>> headers;
    for (std::size_t i = 0; i < doc.maps.size(); ++i) {
        const auto& src = doc.maps[i].source;
        if (!headers.count(src.name)) {
            auto path = src.path;
            auto table = read_records(base_dir.empty() ? std::filesystem::path(path) : base_dir / path, src.format);
            headers[src.name] = table.header;
            out[src.name] = std::move(table.records);
        }
        // An empty file has no header and no records to check.
        if (!headers[src.name].empty()) check_fields(doc.maps[i], i, headers[src.name]);
    }
    return out;
}

std::size_t triple_bound(const MappingDocument& doc,
                         const std::map<std::string, std::vector<RawRecord>>& by_source) {
    std::size_t bound = 0;
    for (const auto& map : doc.maps) {
        auto it = by_source.find(map.source.name);
        if (it == by_source.end()) continue;
        std::size_t accepted = 0;
        for (const auto& r : it->second) {
            if (!map.source.filter || r.get(map.source.filter->field) == map.source.filter->equals) ++accepted;
        }
        bound += accepted * ((map.subject_class ? 1 : 0) + map.predicate_objects.size());
    }
    return bound;
}

}  // namespace ede::mapping
