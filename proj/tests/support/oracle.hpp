#pragma once
// Naive reference implementations used as test oracles. They share no code
// with the library beyond normalize_text.

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "srd/pattern.hpp"
#include "srd/text.hpp"

namespace oracle {

// Decodes the code point at byte i (valid UTF-8 only, up to 3 bytes).
inline char32_t decode(std::string_view s, std::size_t i, std::size_t& len) {
  const auto b = static_cast<unsigned char>(s[i]);
  if (b < 0x80) {
    len = 1;
    return b;
  }
  if ((b & 0xE0) == 0xC0) {
    len = 2;
    return ((b & 0x1F) << 6) | (static_cast<unsigned char>(s[i + 1]) & 0x3F);
  }
  len = 3;
  return ((b & 0x0F) << 12) | ((static_cast<unsigned char>(s[i + 1]) & 0x3F) << 6) |
         (static_cast<unsigned char>(s[i + 2]) & 0x3F);
}

inline bool is_continuation(char c) { return (static_cast<unsigned char>(c) & 0xC0) == 0x80; }

// Word characters for the generator alphabet: ASCII letters, digits, '_',
// plus the few non-ASCII letters the generators emit.
inline bool word(char32_t cp) {
  if (cp < 0x80) return (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z') || (cp >= '0' && cp <= '9') || cp == '_';
  return cp == 0xE9 || cp == 0xFC || cp == 0x4E2D;
}

inline bool word_at(std::string_view s, std::size_t i) {
  if (i >= s.size()) return false;
  std::size_t len;
  return word(decode(s, i, len));
}

inline bool word_before(std::string_view s, std::size_t i) {
  if (i == 0) return false;
  std::size_t j = i - 1;
  while (j > 0 && is_continuation(s[j])) --j;
  return word_at(s, j);
}

inline std::size_t chars_between(std::string_view s, std::size_t a, std::size_t b) {
  std::size_t n = 0;
  for (std::size_t i = a; i < b; ++i)
    if (!is_continuation(s[i])) ++n;
  return n;
}

// Every substitution of CONDITION/DOCTOR, left to right.
inline void expand(const std::string& p, const std::vector<std::string>& conds, const std::vector<std::string>& docs,
                   std::vector<std::string>& out) {
  const auto c = p.find("CONDITION");
  const auto d = p.find("DOCTOR");
  if (c == std::string::npos && d == std::string::npos) {
    out.push_back(p);
    return;
  }
  const bool use_c = d == std::string::npos || (c != std::string::npos && c < d);
  const std::size_t at = use_c ? c : d;
  const std::size_t len = use_c ? 9 : 6;
  for (const auto& t : use_c ? conds : docs) expand(p.substr(0, at) + t + p.substr(at + len), conds, docs, out);
}

struct Alt {
  srd::SpanKind kind;
  std::string text;  // normalized, '*' kept
};

inline std::vector<Alt> alternatives(const srd::PatternSet& ps, const std::string& label) {
  std::vector<Alt> out;
  std::set<std::pair<int, std::string>> seen;
  auto add = [&](srd::SpanKind k, const std::vector<std::string>& src) {
    const auto it = ps.condition_terms.find(label);
    const std::vector<std::string> conds = it == ps.condition_terms.end() ? std::vector<std::string>{} : it->second;
    for (const auto& p : src) {
      std::vector<std::string> expanded;
      expand(p, conds, ps.doctor_terms, expanded);
      for (const auto& e : expanded) {
        std::string n = srd::normalize_text(e);
        if (seen.insert({static_cast<int>(k), n}).second) out.push_back({k, n});
      }
    }
  };
  add(srd::SpanKind::inclusion, ps.inclusion_patterns);
  add(srd::SpanKind::exclusion, ps.exclusion_patterns);
  add(srd::SpanKind::condition, ps.condition_terms.at(label));
  add(srd::SpanKind::doctor, ps.doctor_terms);
  return out;
}

using Hit = std::tuple<std::size_t, std::size_t, int, std::string>;  // start, end, kind, alternative text

// Tries the alternative at every character start.
inline std::vector<Hit> find(const std::vector<Alt>& alts, std::string_view text) {
  std::vector<Hit> out;
  for (const auto& alt : alts) {
    std::vector<std::string> pieces;
    std::string cur;
    bool trailing = false;
    for (std::size_t i = 0; i < alt.text.size(); ++i) {
      if (alt.text[i] == '*') {
        pieces.push_back(cur);
        cur.clear();
        trailing = i + 1 == alt.text.size();
      } else {
        cur += alt.text[i];
      }
    }
    if (!cur.empty() || pieces.empty()) pieces.push_back(cur);
    const bool first_word = word_at(alt.text, 0);
    std::size_t last_len = 0;
    const char32_t last_cp = alt.text.empty() ? 0 : [&] {
      std::size_t j = alt.text.size() - 1;
      while (j > 0 && is_continuation(alt.text[j])) --j;
      return decode(alt.text, j, last_len);
    }();
    for (std::size_t s = 0; s < text.size(); ++s) {
      if (is_continuation(text[s])) continue;
      if (first_word && word_before(text, s)) continue;
      std::size_t pos = s;
      bool ok = true;
      for (std::size_t k = 0; k < pieces.size() && ok; ++k) {
        if (text.substr(pos, pieces[k].size()) != pieces[k]) {
          ok = false;
          break;
        }
        pos += pieces[k].size();
        const bool wildcard_follows = k + 1 < pieces.size() || trailing;
        if (wildcard_follows)
          while (word_at(text, pos)) {
            std::size_t len;
            decode(text, pos, len);
            pos += len;
          }
      }
      if (!ok) continue;
      if (!trailing && word(last_cp) && word_at(text, pos)) continue;
      out.emplace_back(s, pos, static_cast<int>(alt.kind), alt.text);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<Hit> as_hits(const srd::CompiledMatcher& m, const std::vector<srd::MatchSpan>& spans) {
  std::vector<Hit> out;
  for (const auto& s : spans)
    out.emplace_back(s.start, s.end, static_cast<int>(s.kind), m.alternatives()[s.pattern_id].text);
  std::sort(out.begin(), out.end());
  return out;
}

// Gap in characters between two byte spans, 0 when they overlap or touch.
inline std::size_t distance(std::size_t a0, std::size_t a1, std::size_t b0, std::size_t b1, std::string_view text) {
  if (a0 < b1 && b0 < a1) return 0;
  if (a1 <= b0) return chars_between(text, a1, b0);
  return chars_between(text, b1, a0);
}

// ---------------------------------------------------------------------------
// Generators.

inline const std::vector<std::string>& vocabulary() {
  static const std::vector<std::string> v = {"ab", "ba", "abc", "a", "b", "c", "caf\xC3\xA9", "\xC3\xBC" "ber",
                                              "\xE4\xB8\xAD", "ab-c", "x_y", "d1"};
  return v;
}

inline std::string random_text(std::mt19937_64& rng, std::size_t max_tokens) {
  const auto& v = vocabulary();
  static const char* seps[] = {" ", " ", " ", "-", ",", "'", ". "};
  std::uniform_int_distribution<std::size_t> n_tok(0, max_tokens), pick(0, v.size() - 1), sep(0, 6);
  std::uniform_int_distribution<int> coin(0, 3);
  std::string out;
  const std::size_t n = n_tok(rng);
  for (std::size_t i = 0; i < n; ++i) {
    if (i) out += seps[sep(rng)];
    std::string w = v[pick(rng)];
    if (coin(rng) == 0) w += v[pick(rng)];  // glued words exercise the wildcard
    if (coin(rng) == 0 && !w.empty() && w[0] >= 'a' && w[0] <= 'z') w[0] = static_cast<char>(w[0] - 'a' + 'A');
    out += w;
  }
  return out;
}

inline std::string random_pattern(std::mt19937_64& rng, bool placeholders) {
  const auto& v = vocabulary();
  std::uniform_int_distribution<std::size_t> n_tok(1, 3), pick(0, v.size() - 1);
  std::uniform_int_distribution<int> coin(0, 3);
  std::string out;
  const std::size_t n = n_tok(rng);
  for (std::size_t i = 0; i < n; ++i) {
    if (i) out += ' ';
    const int r = coin(rng);
    if (placeholders && r == 0)
      out += coin(rng) < 2 ? "CONDITION" : "DOCTOR";
    else
      out += v[pick(rng)];
    if (r != 0 && coin(rng) == 0) out += '*';
  }
  return out;
}

inline srd::PatternSet random_pattern_set(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> count(1, 4), excl(0, 2);
  srd::PatternSet ps;
  for (int i = count(rng); i > 0; --i) ps.inclusion_patterns.push_back(random_pattern(rng, true));
  for (int i = excl(rng); i > 0; --i) ps.exclusion_patterns.push_back(random_pattern(rng, true));
  auto& terms = ps.condition_terms["X"];
  for (int i = count(rng); i > 0; --i) terms.push_back(random_pattern(rng, false));
  for (int i = count(rng); i > 0; --i) ps.doctor_terms.push_back(random_pattern(rng, false));
  return ps;
}

} // namespace oracle
