#pragma once

// Core value types shared by every module: positions, markers, marker-set
// labels, partial marker sets and span-tuples.

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace slpspan {

/// Document positions and lengths (1-based positions, 64-bit RAM word).
using Position = std::uint64_t;

/// Automaton state index. 0-based in memory, printed 1-based.
using StateId = std::uint32_t;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed text input. Line and column are 1-based; 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column);
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// A precondition on an argument does not hold (incompatible marker set,
/// out-of-range position, sentinel collision, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A configured resource cap was exceeded.
class LimitExceeded : public Error {
 public:
  using Error::Error;
};

/// Open or close marker of a variable. Variables are indices into a
/// VariableSet; the code 2*var+close fixes the marker order
/// open(x1) < close(x1) < open(x2) < ...
struct Marker {
  std::uint32_t variable = 0;
  bool close = false;

  constexpr std::uint32_t code() const noexcept { return 2 * variable + (close ? 1U : 0U); }
  static constexpr Marker from_code(std::uint32_t code) noexcept {
    return Marker{code / 2, (code & 1U) != 0};
  }
  friend constexpr auto operator<=>(const Marker& a, const Marker& b) noexcept {
    return a.code() <=> b.code();
  }
  friend constexpr bool operator==(const Marker&, const Marker&) noexcept = default;
};

/// A subset of the marker alphabet, used as a single automaton letter.
class MarkerSet {
 public:
  static constexpr std::uint32_t kMaxVariables = 32;

  constexpr MarkerSet() noexcept = default;
  static constexpr MarkerSet from_bits(std::uint64_t bits) noexcept {
    MarkerSet s;
    s.bits_ = bits;
    return s;
  }
  static MarkerSet of(std::initializer_list<Marker> markers);

  void insert(Marker m);
  constexpr bool contains(Marker m) const noexcept { return ((bits_ >> m.code()) & 1U) != 0; }
  constexpr bool empty() const noexcept { return bits_ == 0; }
  std::size_t size() const noexcept;
  constexpr std::uint64_t bits() const noexcept { return bits_; }
  constexpr bool intersects(MarkerSet o) const noexcept { return (bits_ & o.bits_) != 0; }
  constexpr MarkerSet operator|(MarkerSet o) const noexcept { return from_bits(bits_ | o.bits_); }

  /// Markers in ascending marker order.
  std::vector<Marker> markers() const;

  friend constexpr auto operator<=>(const MarkerSet&, const MarkerSet&) noexcept = default;

 private:
  std::uint64_t bits_ = 0;
};

/// Declared variables, in declaration order (which is also the marker order).
class VariableSet {
 public:
  VariableSet() = default;
  explicit VariableSet(std::vector<std::string> names);

  std::size_t size() const noexcept { return names_.size(); }
  bool empty() const noexcept { return names_.empty(); }
  const std::string& name(std::uint32_t v) const { return names_.at(v); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  std::optional<std::uint32_t> find(std::string_view name) const;
  /// Adds a variable if absent; returns its index.
  std::uint32_t add(const std::string& name);

  friend bool operator==(const VariableSet&, const VariableSet&) = default;

 private:
  std::vector<std::string> names_;
};

/// Letter of an automaton or of an SLP: epsilon, a document terminal, or a
/// non-empty marker set.
class Label {
 public:
  enum class Kind : std::uint8_t { Epsilon, Terminal, Markers };

  constexpr Label() noexcept = default;
  static constexpr Label epsilon() noexcept { return Label{}; }
  static constexpr Label terminal(char c) noexcept {
    Label l;
    l.kind_ = Kind::Terminal;
    l.terminal_ = static_cast<unsigned char>(c);
    return l;
  }
  static constexpr Label markers(MarkerSet s) noexcept {
    Label l;
    l.kind_ = Kind::Markers;
    l.markers_ = s;
    return l;
  }

  constexpr Kind kind() const noexcept { return kind_; }
  constexpr bool is_epsilon() const noexcept { return kind_ == Kind::Epsilon; }
  constexpr bool is_terminal() const noexcept { return kind_ == Kind::Terminal; }
  constexpr bool is_markers() const noexcept { return kind_ == Kind::Markers; }
  constexpr char terminal() const noexcept { return static_cast<char>(terminal_); }
  constexpr MarkerSet marker_set() const noexcept { return markers_; }

  friend constexpr auto operator<=>(const Label&, const Label&) noexcept = default;

 private:
  Kind kind_ = Kind::Epsilon;
  unsigned char terminal_ = 0;
  MarkerSet markers_;
};

struct LabelHash {
  std::size_t operator()(const Label& l) const noexcept;
};

/// One (marker, position) pair. The default ordering is position-major,
/// marker-minor: the element order underlying compare_marker_sets.
struct MarkerEntry {
  Position position = 0;
  std::uint32_t marker = 0;  // Marker::code()

  friend constexpr auto operator<=>(const MarkerEntry&, const MarkerEntry&) noexcept = default;
};

/// A set of (marker, position) pairs kept as a sorted, duplicate-free
/// sequence.
class PartialMarkerSet {
 public:
  PartialMarkerSet() = default;
  /// Sorts; rejects duplicate pairs and positions < 1.
  static PartialMarkerSet from_entries(std::vector<MarkerEntry> entries);
  /// Caller guarantees entries are strictly increasing and positions >= 1.
  static PartialMarkerSet from_sorted(std::vector<MarkerEntry> entries) noexcept;

  std::span<const MarkerEntry> entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  /// 0 for the empty set.
  Position max_position() const noexcept { return entries_.empty() ? 0 : entries_.back().position; }
  /// Markers occurring in the set (a multiset collapses to a set).
  std::uint64_t marker_bits() const noexcept;

  friend bool operator==(const PartialMarkerSet&, const PartialMarkerSet&) = default;

 private:
  std::vector<MarkerEntry> entries_;
};

/// The l-rightshift {(m, k + l)}.
PartialMarkerSet shift_right(const PartialMarkerSet& set, Position shift);

/// set ∪ shift_right(right, shift). Every position of `left` must be
/// <= shift; a marker present in both operands is rejected.
PartialMarkerSet join(const PartialMarkerSet& left, const PartialMarkerSet& right, Position shift);

/// Total order on marker sets: compare the position-major element sequences
/// at the leftmost difference; a proper prefix is the larger one.
std::strong_ordering compare_marker_sets(const PartialMarkerSet& a, const PartialMarkerSet& b) noexcept;

struct MarkerSetLess {
  bool operator()(const PartialMarkerSet& a, const PartialMarkerSet& b) const noexcept {
    return compare_marker_sets(a, b) < 0;
  }
};

/// Half-open span [begin, end>, 1 <= begin <= end.
struct Span {
  Position begin = 1;
  Position end = 1;
  friend constexpr auto operator<=>(const Span&, const Span&) noexcept = default;
};

/// Partial assignment of the declared variables to spans.
class SpanTuple {
 public:
  SpanTuple() = default;
  explicit SpanTuple(std::size_t variable_count) : spans_(variable_count) {}
  explicit SpanTuple(std::vector<std::optional<Span>> spans);

  std::size_t variable_count() const noexcept { return spans_.size(); }
  const std::optional<Span>& operator[](std::size_t v) const { return spans_.at(v); }
  void set(std::size_t v, std::optional<Span> span);
  const std::vector<std::optional<Span>>& spans() const noexcept { return spans_; }

  friend auto operator<=>(const SpanTuple&, const SpanTuple&) = default;

 private:
  std::vector<std::optional<Span>> spans_;
};

PartialMarkerSet tuple_to_marker_set(const SpanTuple& tuple);

/// Inverse of tuple_to_marker_set. Requires a complete marker set: each
/// variable has both markers or none, exactly once, open <= close, and all
/// positions <= document_length + 1.
SpanTuple marker_set_to_tuple(const PartialMarkerSet& set, std::size_t variable_count,
                              Position document_length);

/// "x=[i,j> y=_" with variables in declaration order.
std::string format_tuple(const SpanTuple& tuple, const VariableSet& variables);
SpanTuple parse_tuple(std::string_view text, const VariableSet& variables);

/// "{open(x),close(y)}"
std::string format_marker_set(MarkerSet set, const VariableSet& variables);
/// "{(open(x),1),(close(x),3)}"
std::string format_partial_marker_set(const PartialMarkerSet& set, const VariableSet& variables);

}  // namespace slpspan
