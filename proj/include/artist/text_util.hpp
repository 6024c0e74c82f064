#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace artist::text {

// Number of UTF-8 code points; this is the "character" count used by every
// length rule.
std::size_t char_length(std::string_view s);

std::string to_lower(std::string_view s);
std::string_view trim(std::string_view s);

// Word characters are ASCII letters/digits and any non-ASCII byte, so a
// multi-byte letter never splits a word. Apostrophes between word characters
// stay inside the word ("doesn't").
bool is_word_byte(unsigned char c);

struct WordSpan {
  std::size_t begin = 0;
  std::size_t end = 0;  // one past the last byte
};

std::vector<WordSpan> word_spans(std::string_view s);

// Lowercased words in order of appearance.
std::vector<std::string> words(std::string_view s);

// Byte offset of the first case-insensitive occurrence of `phrase` at or after
// `from` that is bounded by non-word characters (or the text edges).
std::optional<std::size_t> find_whole_word(std::string_view text, std::string_view phrase,
                                           std::size_t from = 0);

bool iequals(std::string_view a, std::string_view b);

std::vector<std::string_view> split_lines(std::string_view s);

}  // namespace artist::text
