#pragma once

#include <string>
#include <vector>

#include "bohmdyn/states.hpp"

namespace bohmdyn {

/// Builds the model named by a state id, `name[:token][,key=value]*`.
/// Throws ConfigError on unknown names, unknown keys or malformed values.
WavefunctionModel parse_state_id(const std::string& id);

/// Ids listed by the `catalog` command, in display order.
std::vector<std::string> catalog_ids();

/// Human-readable grammar, shown by `--help`.
const char* state_id_grammar();

}  // namespace bohmdyn
