#include "devsim/models.hpp"

#include <algorithm>
#include <span>
#include <stdexcept>
#include <utility>

namespace devsim {

namespace detail {
extern const std::pair<std::string_view, std::string_view> kBuiltinModels[];
extern const std::size_t kBuiltinModelCount;
}  // namespace detail

namespace {

std::span<const std::pair<std::string_view, std::string_view>> table() {
  return {detail::kBuiltinModels, detail::kBuiltinModelCount};
}

}  // namespace

std::vector<std::string> builtin_names() {
  std::vector<std::string> names;
  for (const auto& [name, text] : table()) names.emplace_back(name);
  std::sort(names.begin(), names.end());
  return names;
}

std::optional<std::string_view> builtin_source(std::string_view name) {
  for (const auto& [n, text] : table()) {
    if (n == name) return text;
  }
  return std::nullopt;
}

ModelResolver builtin_resolver() {
  return [](std::string_view name) -> std::optional<ModelSource> {
    auto text = builtin_source(name);
    if (!text) return std::nullopt;
    return ModelSource{std::string(*text), std::string(name) + ".mdl"};
  };
}

ModelDef load_builtin(std::string_view name) {
  auto text = builtin_source(name);
  if (!text) throw std::invalid_argument("unknown builtin model `" + std::string(name) + "`");
  return parse_model(*text, std::string(name) + ".mdl", builtin_resolver());
}

}  // namespace devsim
