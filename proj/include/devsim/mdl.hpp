#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "devsim/model.hpp"

namespace devsim {

enum class DiagnosticCategory : std::uint8_t { syntax, semantic, io };

std::string_view category_name(DiagnosticCategory c) noexcept;

class ParseError : public std::runtime_error {
 public:
  ParseError(DiagnosticCategory category, std::string file, int line, int column, std::string message);

  DiagnosticCategory category() const noexcept { return category_; }
  const std::string& file() const noexcept { return file_; }
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }
  const std::string& message() const noexcept { return message_; }

  // "file:line:col: category: message"
  std::string diagnostic() const;

 private:
  DiagnosticCategory category_;
  std::string file_;
  int line_;
  int column_;
  std::string message_;
};

// Source text of the model named by a `use` clause, and the file name to
// report in diagnostics. Returns nullopt when no such model exists.
struct ModelSource {
  std::string text;
  std::string file;
};
using ModelResolver = std::function<std::optional<ModelSource>(std::string_view model_name)>;

// Parses one model. Coupled models pull their submodels through `resolver`.
ModelDef parse_model(std::string_view text, std::string_view file = "<input>", const ModelResolver& resolver = {});

// Loads a file; `use X` resolves to X.mdl next to it.
ModelDef load_model_file(const std::filesystem::path& path);

// Canonical source of the root model. Submodels appear as `use` clauses.
std::string print_model(const ModelDef& def);

}  // namespace devsim
