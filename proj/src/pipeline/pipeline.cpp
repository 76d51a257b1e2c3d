#include "ede/pipeline/pipeline.hpp"

#include "ede/error.hpp"
#include "ede/rdf/ntriples.hpp"
#include "ede/rdf/prefixes.hpp"
#include "ede/util/digest.hpp"
#include "ede/util/files.hpp"
#include "ede/util/yaml.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <functional>

namespace ede::pipeline {

namespace fs = std::filesystem;
using util::index_path;
using util::key_path;

namespace {

constexpr const char* kProv = "http://www.w3.org/ns/prov#";
constexpr const char* kRdfType = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
constexpr const char* kRdfsLabel = "http://www.w3.org/2000/01/rdf-schema#label";
constexpr const char* kXsdDateTime = "http://www.w3.org/2001/XMLSchema#dateTime";

double require_number(const YAML::Node& node, std::string_view path, std::string_view key) {
    auto value = util::optional_number(node, path, key);
    if (!value) throw ConfigError(key_path(path, key), "missing required key");
    return *value;
}

PreprocessStep parse_step(const YAML::Node& node, const std::string& path) {
    util::expect_map(node, path);
    auto kind = util::require_string(node, path, "kind");
    PreprocessStep step;
    if (kind == "rename-field") {
        util::check_keys(node, path, {"kind", "from", "to"});
        step = RenameField{util::require_string(node, path, "from"), util::require_string(node, path, "to")};
    } else if (kind == "scale-numeric") {
        util::check_keys(node, path, {"kind", "field", "factor"});
        step = ScaleNumeric{util::require_string(node, path, "field"), require_number(node, path, "factor")};
    } else if (kind == "aggregate") {
        util::check_keys(node, path, {"kind", "group_by", "sum"});
        auto group_path = key_path(path, "group_by");
        step = Aggregate{util::string_list(util::require(node, path, "group_by"), group_path),
                         util::require_string(node, path, "sum")};
    } else if (kind == "drop-missing") {
        util::check_keys(node, path, {"kind", "field"});
        step = DropMissing{util::require_string(node, path, "field")};
    } else {
        throw ConfigError(key_path(path, "kind"), "unknown preprocessing step '" + kind + "'");
    }
    try {
        validate(step);
    } catch (const ValidationError& e) {
        throw ConfigError(path, e.what());
    }
    return step;
}

void require_file(const fs::path& file, const std::string& key) {
    std::error_code ec;
    if (!fs::is_regular_file(file, ec)) throw ConfigError(key, "file not found: " + file.string());
}

StageReport skipped(const char* name) {
    StageReport stage;
    stage.name = name;
    return stage;
}

std::string graph_digest(const rdf::Graph& graph) { return util::sha256_hex(rdf::serialize_ntriples(graph)); }

// Content-addressed staging area: every artifact is stored as <digest><ext>.
class Staging {
public:
    explicit Staging(fs::path dir) : dir_(std::move(dir)) {}

    std::string put(std::string_view content, std::string_view ext) {
        auto digest = util::sha256_hex(content);
        auto file = dir_ / (digest + std::string(ext));
        std::error_code ec;
        if (!fs::exists(file, ec)) util::write_file(file, content);
        return digest;
    }

private:
    fs::path dir_;
};

}  // namespace

PipelineConfig parse_pipeline_config(std::string_view text, const fs::path& base_dir) {
    auto root = util::load_yaml(text);
    util::expect_map(root, "");
    util::check_keys(root, "",
                     {"prefixes", "sources", "mapping", "shapes", "linking", "load", "staging", "on_violation"});

    rdf::PrefixMap prefixes;
    if (auto node = root["prefixes"]) {
        util::expect_map(node, "prefixes");
        for (const auto& entry : node) {
            auto label = entry.first.as<std::string>();
            prefixes.declare(label, util::scalar(entry.second, key_path("prefixes", label)));
        }
    }

    PipelineConfig config;
    auto sources = util::require(root, "", "sources");
    util::expect_sequence(sources, "sources");
    if (sources.size() == 0) throw ConfigError("sources", "at least one source is required");
    for (std::size_t i = 0; i < sources.size(); ++i) {
        auto path = index_path("sources", i);
        const auto& node = sources[i];
        util::expect_map(node, path);
        util::check_keys(node, path, {"name", "path", "format", "preprocess"});
        SourceEntry entry;
        auto raw_path = util::require_string(node, path, "path");
        entry.path = util::resolve(base_dir, raw_path);
        entry.name = util::optional_string(node, path, "name").value_or(fs::path(raw_path).filename().string());
        if (auto format = util::optional_string(node, path, "format")) {
            auto parsed = mapping::format_from_name(*format);
            if (!parsed) throw ConfigError(key_path(path, "format"), "unknown format '" + *format + "' (csv or jsonl)");
            entry.format = *parsed;
        } else {
            auto ext = fs::path(raw_path).extension().string();
            auto guessed = ext.empty() ? std::nullopt : mapping::format_from_name(ext.substr(1));
            if (!guessed) throw ConfigError(key_path(path, "format"), "cannot infer format from '" + raw_path + "'");
            entry.format = *guessed;
        }
        if (auto steps = node["preprocess"]) {
            auto steps_path = key_path(path, "preprocess");
            util::expect_sequence(steps, steps_path);
            for (std::size_t j = 0; j < steps.size(); ++j) {
                entry.steps.push_back(parse_step(steps[j], index_path(steps_path, j)));
            }
        }
        for (const auto& other : config.sources) {
            if (other.name == entry.name) throw ConfigError(key_path(path, "name"), "duplicate source name '" + entry.name + "'");
        }
        config.sources.push_back(std::move(entry));
    }

    config.mapping = util::resolve(base_dir, util::require_string(root, "", "mapping"));
    if (auto shapes = util::optional_string(root, "", "shapes")) config.shapes = util::resolve(base_dir, *shapes);

    if (auto node = root["linking"]) {
        util::expect_map(node, "linking");
        util::check_keys(node, "linking", {"label_predicate", "reference", "link_predicate"});
        LinkingConfig linking;
        auto expand = [&](const std::string& key, std::string& out) {
            if (auto value = util::optional_string(node, "linking", key)) {
                try {
                    out = prefixes.expand(*value);
                } catch (const ValidationError& e) {
                    throw ConfigError(key_path("linking", key), e.what());
                }
            }
        };
        expand("label_predicate", linking.spec.label_predicate);
        expand("link_predicate", linking.spec.link_predicate);
        linking.reference = util::resolve(base_dir, util::require_string(node, "linking", "reference"));
        config.linking = std::move(linking);
    }

    auto load = util::require(root, "", "load");
    util::expect_map(load, "load");
    util::check_keys(load, "load", {"target", "provenance", "report"});
    config.target = util::resolve(base_dir, util::require_string(load, "load", "target"));
    if (auto prov = util::optional_string(load, "load", "provenance")) {
        config.provenance = util::resolve(base_dir, *prov);
    } else {
        config.provenance = config.target;
        config.provenance += ".prov.nt";
    }
    if (auto report = util::optional_string(load, "load", "report")) config.report = util::resolve(base_dir, *report);

    if (auto staging = util::optional_string(root, "", "staging")) {
        config.staging = util::resolve(base_dir, *staging);
    } else {
        config.staging = config.target.parent_path() / "staging";
    }

    if (auto policy = util::optional_string(root, "", "on_violation")) {
        if (*policy == "block") {
            config.policy = ViolationPolicy::Block;
        } else if (*policy == "warn") {
            config.policy = ViolationPolicy::Warn;
        } else {
            throw ConfigError("on_violation", "expected 'block' or 'warn', got '" + *policy + "'");
        }
    }
    return config;
}

PipelineConfig load_pipeline_config(const fs::path& file) {
    require_file(file, "");
    return parse_pipeline_config(util::read_file(file), file.parent_path());
}

const StageReport* RunReport::stage(std::string_view name) const {
    for (const auto& s : stages) {
        if (s.name == name) return &s;
    }
    return nullptr;
}

std::string entity_iri(const std::string& digest) { return "urn:sha256:" + digest; }

namespace {

struct Inputs {
    std::vector<std::string> source_digests;
    std::vector<std::string> source_texts;
    std::string mapping_text;
    std::string mapping_digest;
    std::optional<std::string> shapes_text;
    std::string shapes_digest;
    std::optional<std::string> reference_text;
    std::string reference_digest;
};

rdf::Graph provenance_graph(const RunReport& report, const std::string& run_id) {
    rdf::Graph graph;
    auto prov = [](const char* local) { return rdf::Term::iri(std::string(kProv) + local); };
    auto type = rdf::Term::iri(kRdfType);
    auto label = rdf::Term::iri(kRdfsLabel);
    for (const auto& stage : report.stages) {
        if (!stage.executed) continue;
        auto activity = rdf::Term::iri("urn:ede:activity:" + stage.name + ":" + run_id);
        graph.insert({activity, type, prov("Activity")});
        graph.insert({activity, label, rdf::Term::literal(stage.name)});
        graph.insert({activity, prov("startedAtTime"), rdf::Term::literal(util::format_rfc3339(stage.started), kXsdDateTime)});
        graph.insert({activity, prov("endedAtTime"), rdf::Term::literal(util::format_rfc3339(stage.ended), kXsdDateTime)});
        for (const auto& d : stage.used) graph.insert({activity, prov("used"), rdf::Term::iri(entity_iri(d))});
        for (const auto& d : stage.generated) {
            auto entity = rdf::Term::iri(entity_iri(d));
            graph.insert({activity, prov("generated"), entity});
            graph.insert({entity, type, prov("Entity")});
        }
    }
    return graph;
}

}  // namespace

RunReport run_pipeline(const PipelineConfig& config) {
    for (std::size_t i = 0; i < config.sources.size(); ++i) {
        require_file(config.sources[i].path, key_path(index_path("sources", i), "path"));
    }
    require_file(config.mapping, "mapping");
    if (config.shapes) require_file(*config.shapes, "shapes");
    if (config.linking) require_file(config.linking->reference, "linking.reference");

    RunReport report;
    Staging staging(config.staging);
    Inputs in;
    std::vector<mapping::RecordTable> tables;
    std::vector<std::string> preprocessed;
    mapping::MappingDocument doc;
    rdf::Graph graph;
    std::string graph_nt;

    auto run_stage = [&](const char* name, const std::function<void(StageReport&)>& body) {
        StageReport stage;
        stage.name = name;
        if (report.aborted_stage) {
            report.stages.push_back(std::move(stage));
            return;
        }
        stage.started = util::now_utc();
        try {
            body(stage);
        } catch (const std::exception& e) {
            report.aborted_stage = name;
            report.error = e.what();
        }
        stage.ended = util::now_utc();
        report.stages.push_back(std::move(stage));
    };

    run_stage("staging", [&](StageReport& stage) {
        stage.executed = true;
        auto stage_file = [&](const fs::path& file, std::string& text, std::string& digest) {
            text = util::read_file(file);
            digest = staging.put(text, file.extension().string());
            stage.used.push_back(digest);
            stage.generated.push_back(digest);
            report.output_digests["input:" + file.filename().string()] = digest;
        };
        in.source_texts.resize(config.sources.size());
        in.source_digests.resize(config.sources.size());
        for (std::size_t i = 0; i < config.sources.size(); ++i) {
            stage_file(config.sources[i].path, in.source_texts[i], in.source_digests[i]);
        }
        stage_file(config.mapping, in.mapping_text, in.mapping_digest);
        if (config.shapes) stage_file(*config.shapes, in.shapes_text.emplace(), in.shapes_digest);
        if (config.linking) stage_file(config.linking->reference, in.reference_text.emplace(), in.reference_digest);
        for (std::size_t i = 0; i < config.sources.size(); ++i) {
            auto table = config.sources[i].format == mapping::SourceFormat::Csv
                             ? mapping::read_csv(in.source_texts[i])
                             : mapping::read_json_lines(in.source_texts[i]);
            stage.input_count += table.records.size();
            tables.push_back(std::move(table));
        }
        stage.output_count = stage.input_count;
    });

    run_stage("preprocess", [&](StageReport& stage) {
        stage.executed = true;
        for (std::size_t i = 0; i < config.sources.size(); ++i) {
            const auto& source = config.sources[i];
            stage.input_count += tables[i].records.size();
            stage.used.push_back(in.source_digests[i]);
            auto result = preprocess(tables[i], source.steps);
            stage.output_count += result.table.records.size();
            for (auto& e : result.errors) report.preprocess_errors.push_back(e);
            preprocessed.push_back(staging.put(mapping::write_csv(result.table), ".csv"));
            stage.generated.push_back(preprocessed.back());
            tables[i] = std::move(result.table);
        }
    });

    run_stage("mapping", [&](StageReport& stage) {
        stage.executed = true;
        doc = mapping::parse_mapping(in.mapping_text);
        std::map<std::string, std::vector<mapping::RawRecord>> by_source;
        for (std::size_t i = 0; i < config.sources.size(); ++i) {
            stage.input_count += tables[i].records.size();
            by_source[config.sources[i].name] = tables[i].records;
        }
        for (std::size_t m = 0; m < doc.maps.size(); ++m) {
            const auto& map = doc.maps[m];
            auto it = std::find_if(config.sources.begin(), config.sources.end(),
                                   [&](const SourceEntry& s) { return s.name == map.source.name; });
            if (it == config.sources.end()) {
                throw ConfigError(index_path("maps", m),
                                  "source '" + map.source.name + "' is not provided by the pipeline");
            }
            const auto& header = tables[static_cast<std::size_t>(it - config.sources.begin())].header;
            if (!header.empty()) mapping::check_fields(map, m, header);
        }
        stage.used = preprocessed;
        stage.used.push_back(in.mapping_digest);
        auto result = mapping::apply_mapping(doc, by_source);
        report.mapping_errors = std::move(result.errors);
        graph = std::move(result.graph);
        stage.output_count = graph.size();
        graph_nt = rdf::serialize_ntriples(graph);
        stage.generated.push_back(staging.put(graph_nt, ".nt"));
    });

    if (config.linking) {
        run_stage("linking", [&](StageReport& stage) {
            stage.executed = true;
            stage.input_count = graph.size();
            stage.used = {util::sha256_hex(graph_nt), in.reference_digest};
            auto reference = rdf::parse_ntriples(*in.reference_text);
            auto result = link_entities(graph, reference, config.linking->spec);
            report.link_count = result.links.size();
            report.ambiguous_links = std::move(result.ambiguous);
            graph = std::move(result.graph);
            stage.output_count = graph.size();
            graph_nt = rdf::serialize_ntriples(graph);
            stage.generated.push_back(staging.put(graph_nt, ".nt"));
        });
    } else {
        report.stages.push_back(skipped("linking"));
    }

    if (config.shapes) {
        run_stage("validation", [&](StageReport& stage) {
            stage.executed = true;
            stage.input_count = graph.size();
            stage.used = {util::sha256_hex(graph_nt), in.shapes_digest};
            auto shapes = shapes::parse_shapes(*in.shapes_text);
            auto validation = shapes::validate(graph, shapes);
            report.violations = std::move(validation.violations);
            report.conforms = report.violations.empty();
            stage.output_count = report.violations.size();
            stage.generated.push_back(staging.put(shapes::report_to_json({report.violations}), ".json"));
        });
    } else {
        report.stages.push_back(skipped("validation"));
    }

    if (!report.aborted_stage && !report.conforms && config.policy == ViolationPolicy::Block) {
        report.load_note = fmt::format("load skipped: {} violation(s) under on_violation=block", report.violations.size());
        report.stages.push_back(skipped("load"));
    } else {
        run_stage("load", [&](StageReport& stage) {
            stage.executed = true;
            stage.input_count = graph.size();
            auto digest = util::sha256_hex(graph_nt);
            stage.used = {digest};
            util::write_file(config.target, graph_nt);
            stage.generated = {digest};
            stage.output_count = graph.size();
            report.loaded = true;
            if (!report.conforms) report.load_note = fmt::format("loaded with {} violation(s)", report.violations.size());
        });
    }

    report.graph = std::move(graph);
    if (!report.aborted_stage) report.output_digests["graph"] = graph_digest(report.graph);

    std::string run_seed;
    for (const auto& [key, digest] : report.output_digests) run_seed += key + "=" + digest + "\n";
    auto run_id = util::sha256_hex(run_seed).substr(0, 16);
    report.provenance = provenance_graph(report, run_id);
    util::write_file(config.provenance, rdf::serialize_ntriples(report.provenance));
    if (config.report) util::write_file(*config.report, report_to_json(report).dump(2) + "\n");
    return report;
}

nlohmann::ordered_json report_to_json(const RunReport& report) {
    nlohmann::ordered_json out;
    auto& stages = out["stages"] = nlohmann::ordered_json::array();
    for (const auto& s : report.stages) {
        stages.push_back({{"name", s.name},
                          {"executed", s.executed},
                          {"inputCount", s.input_count},
                          {"outputCount", s.output_count}});
    }
    out["abortedStage"] = report.aborted_stage ? nlohmann::ordered_json(*report.aborted_stage) : nullptr;
    out["error"] = report.error;
    out["conforms"] = report.conforms;
    auto& violations = out["violations"] = nlohmann::ordered_json::array();
    for (const auto& v : report.violations) {
        violations.push_back({{"focusNode", v.focus_node.to_ntriples()},
                              {"shape", v.shape_id},
                              {"constraint", v.constraint},
                              {"path", v.path},
                              {"message", v.message}});
    }
    out["loaded"] = report.loaded;
    out["loadNote"] = report.load_note;
    out["links"] = report.link_count;
    auto& ambiguous = out["ambiguousLabels"] = nlohmann::ordered_json::array();
    for (const auto& a : report.ambiguous_links) {
        ambiguous.push_back({{"node", a.node.to_ntriples()}, {"label", a.label}, {"matches", a.matches}});
    }
    auto& errors = out["recordErrors"] = nlohmann::ordered_json::array();
    for (const auto& e : report.preprocess_errors) {
        errors.push_back({{"stage", "preprocess"}, {"step", e.step}, {"record", e.record}, {"message", e.message}});
    }
    for (const auto& e : report.mapping_errors) {
        errors.push_back({{"stage", "mapping"}, {"map", e.map_index}, {"record", e.record_index}, {"message", e.message}});
    }
    auto& digests = out["outputDigests"] = nlohmann::ordered_json::object();
    for (const auto& [key, digest] : report.output_digests) digests[key] = digest;
    return out;
}

}  // namespace ede::pipeline
