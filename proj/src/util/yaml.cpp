#include "ede/util/yaml.hpp"

#include "ede/error.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>

namespace ede::util {

YAML::Node load_yaml(std::string_view text) {
    try {
        return YAML::Load(std::string(text));
    } catch (const YAML::ParserException& e) {
        throw ConfigError("", std::string("YAML syntax error: ") + e.what());
    }
}

std::string key_path(std::string_view parent, std::string_view key) {
    if (parent.empty()) return std::string(key);
    return std::string(parent) + "." + std::string(key);
}

std::string index_path(std::string_view parent, std::size_t index) {
    return std::string(parent) + "[" + std::to_string(index) + "]";
}

void expect_map(const YAML::Node& node, std::string_view path) {
    if (!node.IsMap()) throw ConfigError(std::string(path), "expected a mapping");
}

void expect_sequence(const YAML::Node& node, std::string_view path) {
    if (!node.IsSequence()) throw ConfigError(std::string(path), "expected a list");
}

void check_keys(const YAML::Node& node, std::string_view path,
                std::initializer_list<std::string_view> allowed) {
    expect_map(node, path);
    for (const auto& kv : node) {
        auto key = kv.first.as<std::string>();
        bool known = false;
        for (auto a : allowed) known = known || a == key;
        if (!known) throw ConfigError(key_path(path, key), "unknown key");
    }
}

YAML::Node require(const YAML::Node& node, std::string_view path, std::string_view key) {
    expect_map(node, path);
    YAML::Node child = node[std::string(key)];
    if (!child || child.IsNull()) throw ConfigError(key_path(path, key), "missing required key");
    return child;
}

std::string scalar(const YAML::Node& node, std::string_view path) {
    if (!node.IsScalar()) throw ConfigError(std::string(path), "expected a scalar value");
    return node.Scalar();
}

std::string require_string(const YAML::Node& node, std::string_view path, std::string_view key) {
    return scalar(require(node, path, key), key_path(path, key));
}

std::optional<std::string> optional_string(const YAML::Node& node, std::string_view path,
                                           std::string_view key) {
    expect_map(node, path);
    YAML::Node child = node[std::string(key)];
    if (!child || child.IsNull()) return std::nullopt;
    return scalar(child, key_path(path, key));
}

std::vector<std::string> string_list(const YAML::Node& node, std::string_view path) {
    expect_sequence(node, path);
    std::vector<std::string> out;
    for (std::size_t i = 0; i < node.size(); ++i) out.push_back(scalar(node[i], index_path(path, i)));
    return out;
}

std::optional<long long> optional_integer(const YAML::Node& node, std::string_view path,
                                          std::string_view key) {
    auto text = optional_string(node, path, key);
    if (!text) return std::nullopt;
    long long value = 0;
    auto [ptr, ec] = std::from_chars(text->data(), text->data() + text->size(), value);
    if (ec != std::errc() || ptr != text->data() + text->size()) {
        throw ConfigError(key_path(path, key), "expected an integer, got '" + *text + "'");
    }
    return value;
}

std::optional<double> optional_number(const YAML::Node& node, std::string_view path,
                                      std::string_view key) {
    auto text = optional_string(node, path, key);
    if (!text) return std::nullopt;
    char* end = nullptr;
    double value = std::strtod(text->c_str(), &end);
    if (text->empty() || end != text->c_str() + text->size()) {
        throw ConfigError(key_path(path, key), "expected a number, got '" + *text + "'");
    }
    return value;
}

}  // namespace ede::util
