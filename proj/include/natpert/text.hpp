#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace natpert::text {

bool is_ascii_space(char c);

std::string trim(std::string_view s);

// Runs of whitespace become a single space; leading/trailing removed.
std::string collapse_whitespace(std::string_view s);

std::string to_lower_ascii(std::string_view s);

std::vector<std::string> split_words(std::string_view s);

std::vector<std::string> split_lines(std::string_view s);

std::size_t utf8_length(std::string_view s);

bool contains(std::string_view hay, std::string_view needle);

// Sentence boundaries: a run of [.?!] followed by whitespace and an uppercase
// letter, unless the token before the terminator is a known abbreviation or a
// single initial. Spans partition the input; trailing whitespace belongs to
// the sentence it follows.
struct SentenceSpan {
  std::size_t begin = 0;
  std::size_t end = 0;  // half-open
};

std::vector<SentenceSpan> sentence_spans(std::string_view s);
std::vector<std::string> split_sentences(std::string_view s);

}  // namespace natpert::text
