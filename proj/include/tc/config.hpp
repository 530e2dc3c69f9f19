// Copyright 2026 The tckit Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef TC_CONFIG_HPP
#define TC_CONFIG_HPP

#include <string>
#include <vector>

#include "tc/data.hpp"
#include "tc/experiments.hpp"
#include "tc/model.hpp"
#include "tc/train.hpp"

namespace tc {

enum class Precision { F32, F64 };

// Fully resolved run configuration. Every field is optional in the JSON
// document; unknown keys are rejected. The resolved form (with defaults
// filled in) is echoed into every output artifact.
struct CliConfig {
    ModelConfig model;
    Precision precision = Precision::F64;
    HParams train;
    DeskTask data;  // generator dims + sample counts
    std::vector<MotifSpec> motifs;
    AlterationSpec alteration;

    CliConfig();
};

CliConfig parse_cli_config(const std::string& json_text);
CliConfig load_cli_config(const std::string& path);
std::string cli_config_to_json(const CliConfig& cfg);

}  // namespace tc

#endif  // TC_CONFIG_HPP
