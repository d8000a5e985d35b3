#include "natpert/text.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace natpert::text {

bool is_ascii_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && is_ascii_space(s[b])) ++b;
  while (e > b && is_ascii_space(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

std::string collapse_whitespace(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool in_ws = true;  // swallow leading whitespace
  for (char c : s) {
    if (is_ascii_space(c)) {
      in_ws = true;
    } else {
      if (in_ws && !out.empty()) out.push_back(' ');
      out.push_back(c);
      in_ws = false;
    }
  }
  return out;
}

std::string to_lower_ascii(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::vector<std::string> split_words(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  const std::size_t n = s.size();
  while (i < n) {
    while (i < n && is_ascii_space(s[i])) ++i;
    std::size_t b = i;
    while (i < n && !is_ascii_space(s[i])) ++i;
    if (i > b) out.emplace_back(s.substr(b, i - b));
  }
  return out;
}

std::vector<std::string> split_lines(std::string_view s) {
  std::vector<std::string> out;
  std::size_t b = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == '\n') {
      std::string line(s.substr(b, i - b));
      if (!line.empty() && line.back() == '\r') line.pop_back();
      out.push_back(std::move(line));
      b = i + 1;
    }
  }
  return out;
}

std::size_t utf8_length(std::string_view s) {
  std::size_t n = 0;
  for (unsigned char c : s)
    if ((c & 0xC0) != 0x80) ++n;
  return n;
}

bool contains(std::string_view hay, std::string_view needle) {
  return hay.find(needle) != std::string_view::npos;
}

namespace {

bool is_terminator(char c) { return c == '.' || c == '?' || c == '!'; }

bool is_abbreviation(std::string_view word) {
  static const std::array<std::string_view, 20> kStoplist = {
      "mr",  "mrs", "ms",  "dr",   "prof", "st",  "jr",  "sr",   "vs",  "etc",
      "fig", "no",  "inc", "ltd",  "co",   "mt",  "gen", "capt", "col", "approx"};
  std::string w = to_lower_ascii(word);
  // strip inner periods so "e.g" and "u.s" also match single-letter logic below
  for (std::string_view a : kStoplist)
    if (w == a) return true;
  return false;
}

// Word of letters immediately before position `pos` (exclusive).
std::string_view word_before(std::string_view s, std::size_t pos) {
  std::size_t e = pos;
  std::size_t b = e;
  while (b > 0 && (std::isalpha(static_cast<unsigned char>(s[b - 1])) || s[b - 1] == '.')) --b;
  // drop leading dots so "U.S" yields "U.S" but ".Foo" yields "Foo"
  while (b < e && s[b] == '.') ++b;
  return s.substr(b, e - b);
}

}  // namespace

std::vector<SentenceSpan> sentence_spans(std::string_view s) {
  std::vector<SentenceSpan> spans;
  if (s.empty()) return spans;
  std::size_t start = 0;
  std::size_t i = 0;
  const std::size_t n = s.size();
  while (i < n) {
    if (!is_terminator(s[i])) {
      ++i;
      continue;
    }
    std::size_t term_begin = i;
    while (i < n && is_terminator(s[i])) ++i;
    std::size_t after = i;
    std::size_t ws = after;
    while (ws < n && is_ascii_space(s[ws])) ++ws;
    const bool boundary_shape =
        ws > after && ws < n && std::isupper(static_cast<unsigned char>(s[ws]));
    if (!boundary_shape) continue;
    std::string_view prev = word_before(s, term_begin);
    if (is_abbreviation(prev)) continue;
    // single capital initial, as in "J. Smith"
    if (prev.size() == 1 && std::isupper(static_cast<unsigned char>(prev[0]))) continue;
    if (prev.find('.') != std::string_view::npos) continue;  // "U.S." style
    spans.push_back({start, ws});
    start = ws;
  }
  if (start < n) spans.push_back({start, n});
  return spans;
}

std::vector<std::string> split_sentences(std::string_view s) {
  std::vector<std::string> out;
  for (const SentenceSpan& sp : sentence_spans(s)) {
    std::string sent = trim(s.substr(sp.begin, sp.end - sp.begin));
    if (!sent.empty()) out.push_back(std::move(sent));
  }
  return out;
}

}  // namespace natpert::text
