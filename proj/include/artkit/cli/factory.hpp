#pragma once

#include <string>
#include <vector>

#include "artkit/cli/config.hpp"
#include "artkit/simlab.hpp"

namespace artkit::cli {

/// Strategy names accepted by make_generator.
const std::vector<std::string>& known_strategies();

/// Builds a generator from its spec. Throws ConfigError for unknown
/// strategies, unknown option keys or invalid option values.
GeneratorPtr make_generator(const GeneratorSpec& spec, const InputDomain& domain);

simlab::GeneratorFactory make_factory(const GeneratorSpec& spec, const InputDomain& domain);

}  // namespace artkit::cli
