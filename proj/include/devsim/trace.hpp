#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "devsim/backend.hpp"

namespace devsim {

enum class EntryKind : std::uint8_t { ext, internal, out };

std::string_view entry_kind_name(EntryKind k) noexcept;

struct TraceEntry {
  double time = 0.0;
  std::string path;
  EntryKind kind = EntryKind::ext;
  // Transitions.
  std::string from;
  std::string to;
  std::vector<std::pair<std::string, Value>> vars;
  // Outputs.
  std::string port;
  Value value{std::int64_t{0}};

  bool operator==(const TraceEntry&) const = default;
};

enum class Termination : std::uint8_t {
  quiescent,  // nothing scheduled and no input left
  end_time,
  budget,
};

struct TraceHeader {
  std::string model;
  BackendKind backend = BackendKind::conditional;
  std::uint64_t digest = 0;
};

struct Trace {
  TraceHeader header;
  std::vector<TraceEntry> entries;
  Termination termination = Termination::quiescent;
};

// `{"t":3.0,"path":"root.c","kind":"int","from":"POS","to":"ZERO","vars":{"n":0}}`
std::string to_json_line(const TraceEntry& entry);
// `{"header":{"model":"counter","backend":"state","digest":"..."}}`
std::string header_line(const TraceHeader& header);

void write_trace(std::ostream& out, const Trace& trace, bool with_header);

// Body lines of a serialized trace; header lines are dropped.
std::vector<std::string> read_trace_lines(std::istream& in);

struct TraceDiff {
  std::size_t index = 0;
  // Empty when that side ended first.
  std::optional<std::string> left;
  std::optional<std::string> right;
};

// First differing entry; headers are not compared.
std::optional<TraceDiff> diff_traces(const Trace& a, const Trace& b);
std::optional<TraceDiff> diff_trace_lines(const std::vector<std::string>& a, const std::vector<std::string>& b);

std::string format_diff(const TraceDiff& d);

}  // namespace devsim
