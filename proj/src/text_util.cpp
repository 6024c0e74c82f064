#include "artist/text_util.hpp"

#include <cctype>

namespace artist::text {

std::size_t char_length(std::string_view s) {
  std::size_t n = 0;
  for (unsigned char c : s) {
    if ((c & 0xC0) != 0x80) ++n;
  }
  return n;
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
  };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

bool is_word_byte(unsigned char c) { return std::isalnum(c) || c >= 0x80; }

std::vector<WordSpan> word_spans(std::string_view s) {
  std::vector<WordSpan> out;
  std::size_t i = 0;
  while (i < s.size()) {
    if (!is_word_byte(static_cast<unsigned char>(s[i]))) {
      ++i;
      continue;
    }
    const std::size_t begin = i;
    while (i < s.size()) {
      const auto c = static_cast<unsigned char>(s[i]);
      if (is_word_byte(c)) {
        ++i;
      } else if (c == '\'' && i + 1 < s.size() &&
                 is_word_byte(static_cast<unsigned char>(s[i + 1]))) {
        i += 2;
      } else {
        break;
      }
    }
    out.push_back({begin, i});
  }
  return out;
}

std::vector<std::string> words(std::string_view s) {
  std::vector<std::string> out;
  for (const auto& span : word_spans(s)) {
    out.push_back(to_lower(s.substr(span.begin, span.end - span.begin)));
  }
  return out;
}

bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(a[i])) !=
        std::tolower(static_cast<unsigned char>(b[i]))) {
      return false;
    }
  }
  return true;
}

std::optional<std::size_t> find_whole_word(std::string_view text, std::string_view phrase,
                                           std::size_t from) {
  if (phrase.empty() || phrase.size() > text.size()) return std::nullopt;
  for (std::size_t pos = from; pos + phrase.size() <= text.size(); ++pos) {
    if (!iequals(text.substr(pos, phrase.size()), phrase)) continue;
    const bool left_ok = pos == 0 || !is_word_byte(static_cast<unsigned char>(text[pos - 1]));
    const std::size_t end = pos + phrase.size();
    const bool right_ok =
        end == text.size() || !is_word_byte(static_cast<unsigned char>(text[end]));
    if (left_ok && right_ok) return pos;
  }
  return std::nullopt;
}

std::vector<std::string_view> split_lines(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto nl = s.find('\n', start);
    if (nl == std::string_view::npos) {
      out.push_back(s.substr(start));
      break;
    }
    std::string_view line = s.substr(start, nl - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    out.push_back(line);
    start = nl + 1;
  }
  return out;
}

}  // namespace artist::text
