#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "devsim/mdl.hpp"

namespace devsim {

// Names of every model compiled into the library, sorted.
std::vector<std::string> builtin_names();

std::optional<std::string_view> builtin_source(std::string_view name);

// Parses a bundled model; `use` clauses resolve against the other bundled
// models. Throws std::invalid_argument for an unknown name.
ModelDef load_builtin(std::string_view name);

// Resolver over the bundled models, for parse_model.
ModelResolver builtin_resolver();

}  // namespace devsim
