#include "srd/pattern.hpp"

#include <algorithm>
#include <deque>
#include <filesystem>
#include <map>
#include <set>

#include "srd/error.hpp"
#include "srd/io.hpp"
#include "srd/text.hpp"

namespace srd {

std::string_view to_string(SpanKind kind) {
  switch (kind) {
    case SpanKind::inclusion: return "inclusion";
    case SpanKind::exclusion: return "exclusion";
    case SpanKind::condition: return "condition";
    case SpanKind::doctor: return "doctor";
  }
  return "?";
}

namespace {

bool ascii_alnum(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}
bool ascii_upper(char c) { return c >= 'A' && c <= 'Z'; }
bool ascii_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v'; }

struct Placeholder {
  std::size_t pos;
  std::size_t len;
};

// All-uppercase ASCII letter runs of length >= 2 that are not glued to
// other letters/digits.
std::vector<Placeholder> find_placeholders(std::string_view s) {
  std::vector<Placeholder> out;
  std::size_t i = 0;
  while (i < s.size()) {
    if (!ascii_alnum(s[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    bool upper = true;
    while (j < s.size() && (ascii_alnum(s[j]) || s[j] == '_')) {
      if (!ascii_upper(s[j]) && s[j] != '_') upper = false;
      ++j;
    }
    if (upper && j - i >= 2) out.push_back({i, j - i});
    i = j;
  }
  return out;
}

// '*' must close a non-empty word: preceded by a non-space character and
// followed by whitespace or the end.
bool wildcards_valid(std::string_view s) {
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (s[k] != '*') continue;
    if (k == 0 || ascii_space(s[k - 1]) || s[k - 1] == '*') return false;
    if (k + 1 < s.size() && !ascii_space(s[k + 1])) return false;
  }
  return true;
}

std::vector<std::string> parse_lines(std::string_view text, bool allow_placeholders) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    ++line_no;
    const auto line = trim(text.substr(pos, nl - pos));
    pos = nl + 1;
    if (line.empty() || line.front() == '#') continue;
    if (!wildcards_valid(line))
      throw ParseError(line_no, "'*' is only allowed at the end of a word: " + std::string(line));
    for (const auto& ph : find_placeholders(line)) {
      const auto name = line.substr(ph.pos, ph.len);
      if (!allow_placeholders)
        continue;
      if (name != "CONDITION" && name != "DOCTOR")
        throw ParseError(line_no, "unknown placeholder '" + std::string(name) + "'");
    }
    out.emplace_back(line);
  }
  return out;
}

} // namespace

std::vector<std::string> parse_pattern_file(std::string_view text, bool allow_placeholders) {
  return parse_lines(text, allow_placeholders);
}

std::vector<std::string> parse_term_file(std::string_view text) {
  return parse_lines(text, false);
}

PatternSet load_pattern_set(const std::string& dir) {
  namespace fs = std::filesystem;
  const fs::path root(dir);
  auto load = [&](const fs::path& p, bool patterns) {
    try {
      const auto text = read_file(p);
      return patterns ? parse_pattern_file(text) : parse_term_file(text);
    } catch (const ParseError& e) {
      throw DataError(p.string() + ": " + e.what());
    }
  };
  PatternSet ps;
  ps.inclusion_patterns = load(root / "inclusion.txt", true);
  ps.exclusion_patterns = load(root / "exclusion.txt", true);
  ps.doctor_terms = load(root / "doctor.txt", false);
  const fs::path cond = root / "conditions";
  if (!fs::is_directory(cond)) throw DataError("missing condition directory " + cond.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(cond))
    if (entry.is_regular_file() && entry.path().extension() == ".txt") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  for (const auto& f : files) ps.condition_terms[f.stem().string()] = load(f, false);
  return ps;
}

std::vector<std::string> expand_placeholders(std::string_view pattern,
                                             std::span<const std::string> condition_terms,
                                             std::span<const std::string> doctor_terms) {
  std::vector<std::string> partial{""};
  std::size_t cursor = 0;
  for (const auto& ph : find_placeholders(pattern)) {
    const auto name = pattern.substr(ph.pos, ph.len);
    std::span<const std::string> terms;
    if (name == "CONDITION")
      terms = condition_terms;
    else if (name == "DOCTOR")
      terms = doctor_terms;
    else
      continue;  // literal upper-case text in term-derived strings
    if (terms.empty())
      throw DataError("pattern '" + std::string(pattern) + "' uses " + std::string(name) +
                      " but its term list is empty");
    const auto literal = pattern.substr(cursor, ph.pos - cursor);
    std::vector<std::string> next;
    next.reserve(partial.size() * terms.size());
    for (const auto& prefix : partial)
      for (const auto& term : terms) {
        std::string s = prefix;
        s.append(literal).append(term);
        next.push_back(std::move(s));
      }
    partial = std::move(next);
    cursor = ph.pos + ph.len;
  }
  for (auto& s : partial) s.append(pattern.substr(cursor));
  return partial;
}

std::size_t CompiledMatcher::alternative_count(SpanKind kind) const {
  return static_cast<std::size_t>(std::count_if(alternatives_.begin(), alternatives_.end(),
                                                [&](const Alternative& a) { return a.kind == kind; }));
}

namespace {

Alternative make_alternative(std::string raw, SpanKind kind, std::size_t source) {
  Alternative alt;
  alt.text = normalize_text(raw);
  alt.kind = kind;
  alt.source = source;
  if (alt.text.empty()) throw DataError("empty alternative from '" + raw + "'");
  if (!wildcards_valid(alt.text))
    throw DataError("'*' not at the end of a word in expanded alternative '" + alt.text + "'");
  std::size_t start = 0;
  while (true) {
    const auto star = alt.text.find('*', start);
    if (star == std::string::npos) {
      if (start < alt.text.size()) alt.pieces.push_back(alt.text.substr(start));
      break;
    }
    alt.pieces.push_back(alt.text.substr(start, star - start));
    start = star + 1;
    if (start == alt.text.size()) {
      alt.trailing_wildcard = true;
      break;
    }
  }
  return alt;
}

} // namespace

CompiledMatcher compile_matcher(const PatternSet& patterns, const std::string& diagnosis_label) {
  auto cond_it = patterns.condition_terms.find(diagnosis_label);
  if (cond_it == patterns.condition_terms.end())
    throw DataError("no condition terms for diagnosis label '" + diagnosis_label + "'");
  const auto& conditions = cond_it->second;

  CompiledMatcher m;
  m.label_ = diagnosis_label;
  std::set<std::pair<SpanKind, std::string>> seen;
  auto add = [&](std::string raw, SpanKind kind, std::size_t source) {
    Alternative alt = make_alternative(std::move(raw), kind, source);
    if (seen.emplace(kind, alt.text).second) m.alternatives_.push_back(std::move(alt));
  };
  auto add_patterns = [&](const std::vector<std::string>& list, SpanKind kind) {
    for (std::size_t i = 0; i < list.size(); ++i)
      for (auto& alt : expand_placeholders(list[i], conditions, patterns.doctor_terms))
        add(std::move(alt), kind, i);
  };
  add_patterns(patterns.inclusion_patterns, SpanKind::inclusion);
  add_patterns(patterns.exclusion_patterns, SpanKind::exclusion);
  for (std::size_t i = 0; i < conditions.size(); ++i) add(conditions[i], SpanKind::condition, i);
  for (std::size_t i = 0; i < patterns.doctor_terms.size(); ++i)
    add(patterns.doctor_terms[i], SpanKind::doctor, i);

  // Trie over first pieces.
  struct BuildNode {
    std::map<unsigned char, std::uint32_t> children;
    std::vector<std::uint32_t> outputs;
  };
  std::vector<BuildNode> trie(1);
  for (std::size_t a = 0; a < m.alternatives_.size(); ++a) {
    std::uint32_t state = 0;
    for (unsigned char c : m.alternatives_[a].pieces.front()) {
      auto it = trie[state].children.find(c);
      if (it == trie[state].children.end()) {
        const auto next = static_cast<std::uint32_t>(trie.size());
        trie[state].children.emplace(c, next);
        trie.emplace_back();
        state = next;
      } else {
        state = it->second;
      }
    }
    trie[state].outputs.push_back(static_cast<std::uint32_t>(a));
  }

  m.nodes_.resize(trie.size());
  for (std::size_t s = 0; s < trie.size(); ++s) {
    auto& node = m.nodes_[s];
    node.first_edge = static_cast<std::uint32_t>(m.edges_.size());
    node.edge_count = static_cast<std::uint32_t>(trie[s].children.size());
    for (const auto& [c, t] : trie[s].children) m.edges_.push_back({c, t});
    node.first_output = static_cast<std::uint32_t>(m.outputs_.size());
    node.output_count = static_cast<std::uint32_t>(trie[s].outputs.size());
    m.outputs_.insert(m.outputs_.end(), trie[s].outputs.begin(), trie[s].outputs.end());
  }
  for (const auto& [c, t] : trie[0].children) m.root_children_[c] = t;

  // Failure and output links, breadth first.
  std::deque<std::uint32_t> queue;
  for (const auto& [c, t] : trie[0].children) {
    m.nodes_[t].fail = 0;
    queue.push_back(t);
  }
  while (!queue.empty()) {
    const auto s = queue.front();
    queue.pop_front();
    for (const auto& [c, t] : trie[s].children) {
      std::uint32_t f = m.nodes_[s].fail;
      std::uint32_t target = 0;
      while (true) {
        auto it = trie[f].children.find(c);
        if (it != trie[f].children.end() && it->second != t) {
          target = it->second;
          break;
        }
        if (f == 0) break;
        f = m.nodes_[f].fail;
      }
      m.nodes_[t].fail = target;
      m.nodes_[t].output_link =
          m.nodes_[target].output_count > 0 ? target : m.nodes_[target].output_link;
      queue.push_back(t);
    }
  }
  return m;
}

std::uint32_t CompiledMatcher::step(std::uint32_t state, unsigned char c) const {
  while (state != 0) {
    const auto& node = nodes_[state];
    const Edge* begin = edges_.data() + node.first_edge;
    const Edge* end = begin + node.edge_count;
    const Edge* it = std::lower_bound(begin, end, c, [](const Edge& e, unsigned char v) { return e.byte < v; });
    if (it != end && it->byte == c) return it->target;
    state = node.fail;
  }
  return root_children_[c];
}

namespace {

std::size_t skip_word_chars(std::string_view text, std::size_t pos) {
  while (pos < text.size()) {
    std::size_t len = 1;
    const char32_t cp = decode_at(text, pos, &len);
    if (!is_word_char(cp)) break;
    pos += len;
  }
  return pos;
}

} // namespace

void CompiledMatcher::verify(std::string_view text, std::size_t alt_index, std::size_t end_of_first,
                             std::vector<MatchSpan>& out) const {
  const Alternative& alt = alternatives_[alt_index];
  const std::string& first = alt.pieces.front();
  const std::size_t start = end_of_first - first.size();
  if (is_word_at(first, 0) && is_word_before(text, start)) return;

  std::size_t pos = end_of_first;
  for (std::size_t k = 1; k < alt.pieces.size(); ++k) {
    pos = skip_word_chars(text, pos);
    const std::string& piece = alt.pieces[k];
    if (text.compare(pos, piece.size(), piece) != 0) return;
    pos += piece.size();
  }
  if (alt.trailing_wildcard) {
    pos = skip_word_chars(text, pos);
  } else {
    const std::string& last = alt.pieces.back();
    if (is_word_before(last, last.size()) && is_word_at(text, pos)) return;
  }
  out.push_back({alt_index, start, pos, alt.kind});
}

std::vector<MatchSpan> CompiledMatcher::find_matches(std::string_view text) const {
  std::vector<MatchSpan> out;
  if (nodes_.empty()) return out;
  std::uint32_t state = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    state = step(state, static_cast<unsigned char>(text[i]));
    std::uint32_t s = nodes_[state].output_count > 0 ? state : nodes_[state].output_link;
    while (s != 0) {
      const auto& node = nodes_[s];
      for (std::uint32_t k = 0; k < node.output_count; ++k) verify(text, outputs_[node.first_output + k], i + 1, out);
      s = node.output_link;
    }
  }
  std::sort(out.begin(), out.end(), [](const MatchSpan& a, const MatchSpan& b) {
    if (a.start != b.start) return a.start < b.start;
    if (a.end != b.end) return a.end < b.end;
    return a.pattern_id < b.pattern_id;
  });
  return out;
}

std::size_t span_distance(const MatchSpan& a, const MatchSpan& b, std::string_view text) {
  if (a.start < b.end && b.start < a.end) return 0;
  if (a.end <= b.start) return count_chars(text, a.end, b.start);
  return count_chars(text, b.end, a.start);
}

bool proximity_satisfied(std::span<const MatchSpan> condition_spans,
                         std::span<const MatchSpan> inclusion_spans,
                         std::size_t threshold_chars, std::string_view text) {
  for (const auto& c : condition_spans)
    for (const auto& i : inclusion_spans)
      if (span_distance(c, i, text) < threshold_chars) return true;
  return false;
}

} // namespace srd
