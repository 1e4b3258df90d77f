#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace srd {

/// Pattern resources for detection. condition_terms is keyed by diagnosis
/// label (BD, MDD, ...); inclusion/exclusion/doctor lists are shared.
struct PatternSet {
  std::vector<std::string> inclusion_patterns;
  std::vector<std::string> exclusion_patterns;
  std::map<std::string, std::vector<std::string>> condition_terms;
  std::vector<std::string> doctor_terms;
};

enum class SpanKind : std::uint8_t { inclusion, exclusion, condition, doctor };

std::string_view to_string(SpanKind kind);

struct MatchSpan {
  std::size_t pattern_id = 0;  // index into CompiledMatcher::alternatives()
  std::size_t start = 0;       // byte offsets into the normalized text
  std::size_t end = 0;
  SpanKind kind = SpanKind::inclusion;

  bool operator==(const MatchSpan&) const = default;
};

/// Reads a pattern file: one pattern per line, '#' starts a comment line,
/// surrounding whitespace dropped. '*' may only end a word. With
/// `allow_placeholders`, ALL-CAPS tokens must be CONDITION or DOCTOR; term
/// files pass false so entries like "BD-II" stay literal. Throws ParseError.
std::vector<std::string> parse_pattern_file(std::string_view text, bool allow_placeholders = true);

/// Term files share the pattern syntax minus placeholders.
std::vector<std::string> parse_term_file(std::string_view text);

/// Loads inclusion.txt, exclusion.txt, doctor.txt and conditions/<LABEL>.txt
/// from a pattern directory.
PatternSet load_pattern_set(const std::string& dir);

/// Substitutes every CONDITION/DOCTOR occurrence with each term (cartesian
/// product over occurrences). Throws DataError when a referenced term list
/// is empty.
std::vector<std::string> expand_placeholders(std::string_view pattern,
                                             std::span<const std::string> condition_terms,
                                             std::span<const std::string> doctor_terms);

/// One expanded, normalized alternative. `pieces` are the literal chunks
/// between wildcards; a wildcard follows every piece except possibly the last.
struct Alternative {
  std::string text;  // normalized, '*' kept
  SpanKind kind = SpanKind::inclusion;
  std::size_t source = 0;  // index of the originating pattern/term in its list
  std::vector<std::string> pieces;
  bool trailing_wildcard = false;
};

/// Immutable multi-pattern matcher for one diagnosis label. An Aho-Corasick
/// automaton over the first literal piece of each alternative finds
/// candidates; the remaining pieces, wildcards and word boundaries are
/// verified in place.
class CompiledMatcher {
 public:
  CompiledMatcher() = default;

  const std::string& label() const { return label_; }
  std::span<const Alternative> alternatives() const { return alternatives_; }
  std::size_t alternative_count(SpanKind kind) const;

  /// Spans sorted by (start, end, pattern_id). `text` must be normalized.
  std::vector<MatchSpan> find_matches(std::string_view text) const;

 private:
  friend CompiledMatcher compile_matcher(const PatternSet&, const std::string&);

  struct Node {
    std::uint32_t first_edge = 0;
    std::uint32_t edge_count = 0;
    std::uint32_t fail = 0;
    std::uint32_t output_link = 0;  // nearest proper suffix node with outputs
    std::uint32_t first_output = 0;
    std::uint32_t output_count = 0;
  };
  struct Edge {
    unsigned char byte;
    std::uint32_t target;
  };

  std::uint32_t step(std::uint32_t state, unsigned char c) const;
  void verify(std::string_view text, std::size_t alt, std::size_t end_of_first,
              std::vector<MatchSpan>& out) const;

  std::string label_;
  std::vector<Alternative> alternatives_;
  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
  std::vector<std::uint32_t> outputs_;
  std::uint32_t root_children_[256] = {};
};

/// Compiles inclusion, exclusion, condition (for `diagnosis_label`) and
/// doctor alternatives. Duplicates within a kind collapse to the first.
/// Throws DataError when the label is unknown or an expansion fails.
CompiledMatcher compile_matcher(const PatternSet& patterns, const std::string& diagnosis_label);

/// Characters between the nearest endpoints of two spans; 0 when they touch
/// or overlap.
std::size_t span_distance(const MatchSpan& a, const MatchSpan& b, std::string_view text);

/// True iff some (condition, inclusion) pair is strictly closer than
/// `threshold_chars`.
bool proximity_satisfied(std::span<const MatchSpan> condition_spans,
                         std::span<const MatchSpan> inclusion_spans,
                         std::size_t threshold_chars, std::string_view text);

} // namespace srd
