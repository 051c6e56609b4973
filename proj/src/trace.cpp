#include "devsim/trace.hpp"

#include <cstdio>
#include <istream>
#include <ostream>

#include <json.hpp>

namespace devsim {

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json to_json(const Value& v) {
  return std::visit(
      [](const auto& x) -> ordered_json {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Label>) {
          return std::string(x.text());
        } else {
          return x;
        }
      },
      v);
}

std::optional<std::string> at(const std::vector<std::string>& lines, std::size_t i) {
  if (i < lines.size()) return lines[i];
  return std::nullopt;
}

}  // namespace

std::string_view entry_kind_name(EntryKind k) noexcept {
  switch (k) {
    case EntryKind::ext: return "ext";
    case EntryKind::internal: return "int";
    case EntryKind::out: return "out";
  }
  return "?";
}

std::string to_json_line(const TraceEntry& entry) {
  ordered_json j;
  j["t"] = entry.time;
  j["path"] = entry.path;
  j["kind"] = entry_kind_name(entry.kind);
  if (entry.kind == EntryKind::out) {
    j["port"] = entry.port;
    j["value"] = to_json(entry.value);
  } else {
    j["from"] = entry.from;
    j["to"] = entry.to;
    ordered_json vars = ordered_json::object();
    for (const auto& [name, value] : entry.vars) vars[name] = to_json(value);
    j["vars"] = std::move(vars);
  }
  return j.dump();
}

std::string header_line(const TraceHeader& header) {
  char digest[17];
  std::snprintf(digest, sizeof digest, "%016llx", static_cast<unsigned long long>(header.digest));
  ordered_json j;
  j["header"]["model"] = header.model;
  j["header"]["backend"] = backend_name(header.backend);
  j["header"]["digest"] = digest;
  return j.dump();
}

void write_trace(std::ostream& out, const Trace& trace, bool with_header) {
  if (with_header) out << header_line(trace.header) << '\n';
  for (const auto& e : trace.entries) out << to_json_line(e) << '\n';
}

std::vector<std::string> read_trace_lines(std::istream& in) {
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.rfind("{\"header\":", 0) == 0) continue;
    lines.push_back(std::move(line));
  }
  return lines;
}

std::optional<TraceDiff> diff_traces(const Trace& a, const Trace& b) {
  const std::size_t n = std::max(a.entries.size(), b.entries.size());
  for (std::size_t i = 0; i < n; ++i) {
    const bool left = i < a.entries.size();
    const bool right = i < b.entries.size();
    if (left && right && a.entries[i] == b.entries[i]) continue;
    TraceDiff d{i, std::nullopt, std::nullopt};
    if (left) d.left = to_json_line(a.entries[i]);
    if (right) d.right = to_json_line(b.entries[i]);
    return d;
  }
  return std::nullopt;
}

std::optional<TraceDiff> diff_trace_lines(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  const std::size_t n = std::max(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (i < a.size() && i < b.size() && a[i] == b[i]) continue;
    return TraceDiff{i, at(a, i), at(b, i)};
  }
  return std::nullopt;
}

std::string format_diff(const TraceDiff& d) {
  return "traces diverge at entry " + std::to_string(d.index) + "\n< " + d.left.value_or("(end of trace)") + "\n> " +
         d.right.value_or("(end of trace)");
}

}  // namespace devsim
