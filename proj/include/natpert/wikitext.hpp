#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace natpert::wikitext {

struct RawRevision {
  std::string page_title;
  std::uint64_t rev_id = 0;
  std::optional<std::uint64_t> parent_id;
  std::string timestamp;  // ISO-8601, e.g. "2023-05-01T12:00:00Z"
  std::string wikitext;
};

struct CleanDocument {
  std::string page_title;
  std::uint64_t rev_id = 0;
  std::vector<std::string> paragraphs;
};

// Best-effort wikitext-to-prose conversion, not a renderer. Internal links
// keep their display label, labelled external links keep the label,
// templates/tables/refs/comments/category and file links are removed, quote
// markup and heading decoration are dropped (heading text stays on its own
// line), HTML entities are decoded. The pass pipeline runs to a fixpoint, so
// the function is idempotent and the output never contains the marker
// strings [[ ]] {{ }} ''' == for any input.
std::string strip_markup(std::string_view wikitext);

// Blank-line paragraph segmentation. Trims, drops empty segments, and drops
// lines that still look like headings (==...==), which only survive in input
// that bypassed strip_markup.
std::vector<std::string> segment_paragraphs(std::string_view plain_text);

CleanDocument clean_revision(const RawRevision& rev);

}  // namespace natpert::wikitext
