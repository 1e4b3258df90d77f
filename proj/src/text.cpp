#include "srd/text.hpp"

#include <clocale>
#include <cwctype>
#include <locale.h>

namespace srd {

namespace {

locale_t utf8_locale() {
  static const locale_t loc = [] {
    locale_t l = newlocale(LC_CTYPE_MASK, "C.UTF-8", static_cast<locale_t>(0));
    if (l == static_cast<locale_t>(0))
      l = newlocale(LC_CTYPE_MASK, "C.utf8", static_cast<locale_t>(0));
    return l;
  }();
  return loc;
}

char32_t to_lower(char32_t cp) {
  if (cp < 0x80) return (cp >= 'A' && cp <= 'Z') ? cp + 32 : cp;
  locale_t loc = utf8_locale();
  if (loc == static_cast<locale_t>(0)) return cp;
  return static_cast<char32_t>(towlower_l(static_cast<wint_t>(cp), loc));
}

bool is_space(char32_t cp) {
  if (cp < 0x80) return cp == ' ' || (cp >= '\t' && cp <= '\r');
  if (cp == 0xA0 || cp == 0x2007 || cp == 0x202F) return true;  // no-break spaces
  locale_t loc = utf8_locale();
  if (loc == static_cast<locale_t>(0)) return false;
  return iswspace_l(static_cast<wint_t>(cp), loc) != 0;
}

bool is_apostrophe(char32_t cp) {
  return cp == 0x2019 || cp == 0x2018 || cp == 0x02BC;
}

} // namespace

char32_t decode_at(std::string_view s, std::size_t pos, std::size_t* len) {
  const auto b0 = static_cast<unsigned char>(s[pos]);
  auto fail = [&]() -> char32_t {
    if (len) *len = 1;
    return b0;
  };
  if (b0 < 0x80) {
    if (len) *len = 1;
    return b0;
  }
  std::size_t n;
  char32_t cp;
  if ((b0 & 0xE0) == 0xC0) {
    n = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    n = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    n = 4;
    cp = b0 & 0x07;
  } else {
    return fail();
  }
  if (pos + n > s.size()) return fail();
  for (std::size_t k = 1; k < n; ++k) {
    const auto b = static_cast<unsigned char>(s[pos + k]);
    if ((b & 0xC0) != 0x80) return fail();
    cp = (cp << 6) | (b & 0x3F);
  }
  if (len) *len = n;
  return cp;
}

std::size_t previous_boundary(std::string_view s, std::size_t pos) {
  std::size_t p = pos - 1;
  std::size_t steps = 0;
  while (p > 0 && steps < 3 && (static_cast<unsigned char>(s[p]) & 0xC0) == 0x80) {
    --p;
    ++steps;
  }
  std::size_t len = 0;
  decode_at(s, p, &len);
  // A stray continuation byte decodes as a single byte.
  return p + len == pos ? p : pos - 1;
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

bool is_word_char(char32_t cp) {
  if (cp < 0x80)
    return (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z') ||
           (cp >= '0' && cp <= '9') || cp == '_';
  locale_t loc = utf8_locale();
  if (loc == static_cast<locale_t>(0)) return false;
  return iswalnum_l(static_cast<wint_t>(cp), loc) != 0;
}

bool is_word_before(std::string_view s, std::size_t pos) {
  if (pos == 0) return false;
  const auto b = static_cast<unsigned char>(s[pos - 1]);
  if (b < 0x80) return is_word_char(b);
  return is_word_char(decode_at(s, previous_boundary(s, pos)));
}

bool is_word_at(std::string_view s, std::size_t pos) {
  if (pos >= s.size()) return false;
  return is_word_char(decode_at(s, pos));
}

std::size_t count_chars(std::string_view s, std::size_t begin, std::size_t end) {
  std::size_t n = 0;
  for (std::size_t p = begin; p < end;) {
    std::size_t len = 1;
    decode_at(s, p, &len);
    p += len;
    ++n;
  }
  return n;
}

std::string_view trim(std::string_view s) {
  const char* ws = " \t\r\n\f\v";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::string strip_quotes(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool first = true;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const auto line = text.substr(pos, nl - pos);
    const auto lead = line.find_first_not_of(" \t\r\f\v");
    const bool quoted = lead != std::string_view::npos && line[lead] == '>';
    if (!quoted) {
      if (!first) out.push_back('\n');
      out.append(line);
      first = false;
    }
    pos = nl + 1;
  }
  return out;
}

std::string normalize_text(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (std::size_t p = 0; p < text.size();) {
    std::size_t len = 1;
    char32_t cp = decode_at(text, p, &len);
    const bool valid = !(len == 1 && cp >= 0x80);
    p += len;
    if (valid && is_space(cp)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    if (!valid) {
      out.push_back(static_cast<char>(cp));
      continue;
    }
    if (is_apostrophe(cp)) cp = '\'';
    append_utf8(out, to_lower(cp));
  }
  return out;
}

} // namespace srd
