#pragma once

#include <optional>
#include <string>
#include <vector>

#include "stochcert/certify.hpp"
#include "stochcert/config.hpp"

namespace stochcert {

struct ExamplePreset {
    std::string name;
    std::string summary;
    Route route; // route the preset is expected to certify through
    RunConfig config;
};

const std::vector<ExamplePreset>& example_registry();

/// nullptr when the name is unknown.
const ExamplePreset* find_example(const std::string& name);

} // namespace stochcert
