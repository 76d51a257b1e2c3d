#pragma once

#include <yaml-cpp/yaml.h>

#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

// Small helpers for reading the YAML document dialects. Every failure raises
// ede::ConfigError carrying the key path of the offending node.
namespace ede::util {

YAML::Node load_yaml(std::string_view text);

std::string key_path(std::string_view parent, std::string_view key);
std::string index_path(std::string_view parent, std::size_t index);

void expect_map(const YAML::Node& node, std::string_view path);
void expect_sequence(const YAML::Node& node, std::string_view path);

/// Rejects keys not listed in `allowed`.
void check_keys(const YAML::Node& node, std::string_view path,
                std::initializer_list<std::string_view> allowed);

YAML::Node require(const YAML::Node& node, std::string_view path, std::string_view key);

std::string require_string(const YAML::Node& node, std::string_view path, std::string_view key);
std::optional<std::string> optional_string(const YAML::Node& node, std::string_view path,
                                           std::string_view key);
std::string scalar(const YAML::Node& node, std::string_view path);
std::vector<std::string> string_list(const YAML::Node& node, std::string_view path);
std::optional<long long> optional_integer(const YAML::Node& node, std::string_view path,
                                          std::string_view key);
std::optional<double> optional_number(const YAML::Node& node, std::string_view path,
                                      std::string_view key);

}  // namespace ede::util
