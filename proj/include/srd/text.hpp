#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace srd {

/// Removes every line whose first non-whitespace character is '>'
/// (Markdown block quotes). Remaining lines keep their order and content.
std::string strip_quotes(std::string_view text);

/// Canonical matching form: Unicode lowercase, typographic apostrophes folded
/// to "'", whitespace runs collapsed to one space, trimmed.
std::string normalize_text(std::string_view text);

// UTF-8 helpers. Offsets are byte offsets; invalid bytes decode as themselves
// (one byte, code point == byte value) so scanning never stalls.

char32_t decode_at(std::string_view s, std::size_t pos, std::size_t* len = nullptr);

/// Start offset of the code point ending right before `pos` (pos > 0).
std::size_t previous_boundary(std::string_view s, std::size_t pos);

void append_utf8(std::string& out, char32_t cp);

/// Letters, digits (any script) and underscore.
bool is_word_char(char32_t cp);

bool is_word_before(std::string_view s, std::size_t pos);
bool is_word_at(std::string_view s, std::size_t pos);

/// Number of code points in s[begin, end).
std::size_t count_chars(std::string_view s, std::size_t begin, std::size_t end);

std::string_view trim(std::string_view s);

} // namespace srd
