#pragma once

// Plain-text experiment configuration.
//
//   # comment
//   key = value
//   sweep_grid = -10, 0, 10, 20, 30
//
// Keys are case-sensitive; unknown or repeated keys are errors. Anything not
// set keeps its default (the published link parameters). Relative PDP file
// paths resolve against the configuration file's directory.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "uwfd/experiments.hpp"

namespace uwfd {

/// Parses and validates. `defaulted` receives the keys left at their default.
ExperimentConfig parse_config_text(std::string_view text,
                                   const std::filesystem::path& base_dir = {},
                                   std::vector<std::string>* defaulted = nullptr);

ExperimentConfig parse_config(const std::filesystem::path& path,
                              std::vector<std::string>* defaulted = nullptr);

/// Every key with its current value, in the file syntax.
std::string to_config_text(const ExperimentConfig& cfg);

/// All recognised keys, in documentation order.
const std::vector<std::string>& config_keys();

}  // namespace uwfd
