#pragma once

// Built-in experiment documents. Each one is also shipped as
// configs/<id>.json.

#include <json.hpp>

#include <string>
#include <vector>

namespace pdflow {

struct BuiltinExperiment {
    std::string id;
    std::string description;
    nlohmann::json document;  ///< single experiment or comparison document
};

const std::vector<BuiltinExperiment>& builtin_experiments();

/// nullptr when the id is unknown.
const BuiltinExperiment* find_builtin(const std::string& id);

}  // namespace pdflow
