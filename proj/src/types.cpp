#include "slpspan/types.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <limits>

namespace slpspan {

ParseError::ParseError(const std::string& what, std::size_t line, std::size_t column)
    : Error(line == 0 ? what
                      : "line " + std::to_string(line) + ", column " + std::to_string(column) +
                            ": " + what),
      line_(line),
      column_(column) {}

MarkerSet MarkerSet::of(std::initializer_list<Marker> markers) {
  MarkerSet s;
  for (Marker m : markers) s.insert(m);
  return s;
}

void MarkerSet::insert(Marker m) {
  if (m.variable >= kMaxVariables) throw InvalidArgument("at most 32 variables are supported");
  bits_ |= std::uint64_t{1} << m.code();
}

std::size_t MarkerSet::size() const noexcept { return static_cast<std::size_t>(std::popcount(bits_)); }

std::vector<Marker> MarkerSet::markers() const {
  std::vector<Marker> out;
  for (std::uint64_t b = bits_; b != 0; b &= b - 1) {
    out.push_back(Marker::from_code(static_cast<std::uint32_t>(std::countr_zero(b))));
  }
  return out;
}

VariableSet::VariableSet(std::vector<std::string> names) {
  for (auto& n : names) {
    if (find(n)) throw InvalidArgument("duplicate variable '" + n + "'");
    names_.push_back(std::move(n));
  }
  if (names_.size() > MarkerSet::kMaxVariables) throw InvalidArgument("at most 32 variables are supported");
}

std::optional<std::uint32_t> VariableSet::find(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return static_cast<std::uint32_t>(i);
  }
  return std::nullopt;
}

std::uint32_t VariableSet::add(const std::string& name) {
  if (auto v = find(name)) return *v;
  if (names_.size() >= MarkerSet::kMaxVariables) throw InvalidArgument("at most 32 variables are supported");
  names_.push_back(name);
  return static_cast<std::uint32_t>(names_.size() - 1);
}

std::size_t LabelHash::operator()(const Label& l) const noexcept {
  std::uint64_t h = static_cast<std::uint64_t>(l.kind());
  h = h * 0x9E3779B97F4A7C15ULL + static_cast<unsigned char>(l.terminal());
  h = h * 0x9E3779B97F4A7C15ULL + l.marker_set().bits();
  return static_cast<std::size_t>(h ^ (h >> 29));
}

PartialMarkerSet PartialMarkerSet::from_entries(std::vector<MarkerEntry> entries) {
  std::sort(entries.begin(), entries.end());
  if (std::adjacent_find(entries.begin(), entries.end()) != entries.end()) {
    throw InvalidArgument("duplicate (marker, position) pair");
  }
  if (!entries.empty() && entries.front().position < 1) throw InvalidArgument("marker positions start at 1");
  PartialMarkerSet s;
  s.entries_ = std::move(entries);
  return s;
}

PartialMarkerSet PartialMarkerSet::from_sorted(std::vector<MarkerEntry> entries) noexcept {
  PartialMarkerSet s;
  s.entries_ = std::move(entries);
  return s;
}

std::uint64_t PartialMarkerSet::marker_bits() const noexcept {
  std::uint64_t bits = 0;
  for (const auto& e : entries_) bits |= std::uint64_t{1} << e.marker;
  return bits;
}

PartialMarkerSet shift_right(const PartialMarkerSet& set, Position shift) {
  std::vector<MarkerEntry> out(set.entries().begin(), set.entries().end());
  for (auto& e : out) {
    if (e.position > std::numeric_limits<Position>::max() - shift) throw InvalidArgument("position overflow in shift");
    e.position += shift;
  }
  return PartialMarkerSet::from_sorted(std::move(out));
}

PartialMarkerSet join(const PartialMarkerSet& left, const PartialMarkerSet& right, Position shift) {
  if (left.max_position() > shift) throw InvalidArgument("join: left operand extends past the shift");
  if ((left.marker_bits() & right.marker_bits()) != 0) throw InvalidArgument("join: marker occurs in both operands");
  std::vector<MarkerEntry> out;
  out.reserve(left.size() + right.size());
  out.insert(out.end(), left.entries().begin(), left.entries().end());
  for (const auto& e : right.entries()) {
    if (e.position > std::numeric_limits<Position>::max() - shift) throw InvalidArgument("position overflow in join");
    out.push_back({e.position + shift, e.marker});
  }
  return PartialMarkerSet::from_sorted(std::move(out));
}

std::strong_ordering compare_marker_sets(const PartialMarkerSet& a, const PartialMarkerSet& b) noexcept {
  auto ea = a.entries();
  auto eb = b.entries();
  const std::size_t n = std::min(ea.size(), eb.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (auto c = ea[i] <=> eb[i]; c != 0) return c;
  }
  // Equal up to the shorter length: the prefix is larger.
  return eb.size() <=> ea.size();
}

SpanTuple::SpanTuple(std::vector<std::optional<Span>> spans) : spans_(std::move(spans)) {
  for (const auto& s : spans_) {
    if (s && (s->begin < 1 || s->begin > s->end)) throw InvalidArgument("span must satisfy 1 <= begin <= end");
  }
}

void SpanTuple::set(std::size_t v, std::optional<Span> span) {
  if (span && (span->begin < 1 || span->begin > span->end)) {
    throw InvalidArgument("span must satisfy 1 <= begin <= end");
  }
  spans_.at(v) = span;
}

PartialMarkerSet tuple_to_marker_set(const SpanTuple& tuple) {
  std::vector<MarkerEntry> entries;
  for (std::size_t v = 0; v < tuple.variable_count(); ++v) {
    if (const auto& s = tuple[v]) {
      const auto var = static_cast<std::uint32_t>(v);
      entries.push_back({s->begin, Marker{var, false}.code()});
      entries.push_back({s->end, Marker{var, true}.code()});
    }
  }
  return PartialMarkerSet::from_entries(std::move(entries));
}

SpanTuple marker_set_to_tuple(const PartialMarkerSet& set, std::size_t variable_count, Position document_length) {
  std::vector<std::optional<Position>> open(variable_count), close(variable_count);
  for (const auto& e : set.entries()) {
    const Marker m = Marker::from_code(e.marker);
    if (m.variable >= variable_count) throw InvalidArgument("marker of an undeclared variable");
    if (e.position > document_length + 1) throw InvalidArgument("marker position beyond the document");
    auto& slot = m.close ? close[m.variable] : open[m.variable];
    if (slot) throw InvalidArgument("marker occurs more than once");
    slot = e.position;
  }
  SpanTuple t(variable_count);
  for (std::size_t v = 0; v < variable_count; ++v) {
    if (open[v].has_value() != close[v].has_value()) throw InvalidArgument("variable with only one marker");
    if (open[v]) {
      if (*open[v] > *close[v]) throw InvalidArgument("close marker before open marker");
      t.set(v, Span{*open[v], *close[v]});
    }
  }
  return t;
}

std::string format_tuple(const SpanTuple& tuple, const VariableSet& variables) {
  std::string out;
  for (std::size_t v = 0; v < tuple.variable_count(); ++v) {
    if (v > 0) out += ' ';
    out += variables.name(static_cast<std::uint32_t>(v));
    out += '=';
    if (const auto& s = tuple[v]) {
      out += '[' + std::to_string(s->begin) + ',' + std::to_string(s->end) + '>';
    } else {
      out += '_';
    }
  }
  return out;
}

namespace {

Position parse_position(std::string_view text, std::size_t column) {
  Position value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw ParseError("expected a position, got '" + std::string(text) + "'", 1, column);
  }
  return value;
}

}  // namespace

SpanTuple parse_tuple(std::string_view text, const VariableSet& variables) {
  SpanTuple t(variables.size());
  std::vector<bool> seen(variables.size(), false);
  std::size_t i = 0;
  while (i < text.size()) {
    if (std::isspace(static_cast<unsigned char>(text[i]))) {
      ++i;
      continue;
    }
    const std::size_t item_begin = i;
    const std::size_t eq = text.find('=', i);
    if (eq == std::string_view::npos) throw ParseError("expected '<var>=<span>'", 1, i + 1);
    const std::string_view name = text.substr(i, eq - i);
    const auto var = variables.find(name);
    if (!var) throw ParseError("unknown variable '" + std::string(name) + "'", 1, item_begin + 1);
    if (seen[*var]) throw ParseError("variable '" + std::string(name) + "' assigned twice", 1, item_begin + 1);
    seen[*var] = true;
    i = eq + 1;
    if (i < text.size() && text[i] == '_') {
      ++i;
    } else {
      if (i >= text.size() || text[i] != '[') throw ParseError("expected '[' or '_'", 1, i + 1);
      const std::size_t comma = text.find(',', i);
      const std::size_t close = text.find('>', i);
      if (comma == std::string_view::npos || close == std::string_view::npos || comma > close) {
        throw ParseError("expected '[i,j>'", 1, i + 1);
      }
      const Position b = parse_position(text.substr(i + 1, comma - i - 1), i + 2);
      const Position e = parse_position(text.substr(comma + 1, close - comma - 1), comma + 2);
      if (b < 1 || b > e) throw ParseError("span must satisfy 1 <= i <= j", 1, i + 1);
      t.set(*var, Span{b, e});
      i = close + 1;
    }
    if (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) {
      throw ParseError("expected whitespace between assignments", 1, i + 1);
    }
  }
  return t;
}

std::string format_marker_set(MarkerSet set, const VariableSet& variables) {
  std::string out = "{";
  bool first = true;
  for (Marker m : set.markers()) {
    if (!first) out += ',';
    first = false;
    out += m.close ? "close(" : "open(";
    out += m.variable < variables.size() ? variables.name(m.variable) : "#" + std::to_string(m.variable);
    out += ')';
  }
  return out + "}";
}

std::string format_partial_marker_set(const PartialMarkerSet& set, const VariableSet& variables) {
  std::string out = "{";
  bool first = true;
  for (const auto& e : set.entries()) {
    if (!first) out += ',';
    first = false;
    const Marker m = Marker::from_code(e.marker);
    out += m.close ? "(close(" : "(open(";
    out += m.variable < variables.size() ? variables.name(m.variable) : "#" + std::to_string(m.variable);
    out += ")," + std::to_string(e.position) + ")";
  }
  return out + "}";
}

}  // namespace slpspan
