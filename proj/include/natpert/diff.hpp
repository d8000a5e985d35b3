#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "natpert/harvest.hpp"
#include "natpert/wikitext.hpp"

namespace natpert::diff {

enum class EditPattern { Identical, Addition, Deletion, Modification };

const char* edit_pattern_name(EditPattern p);

struct AlignedUnit {
  std::optional<std::string> prev_paragraph;
  std::optional<std::string> curr_paragraph;
  EditPattern pattern = EditPattern::Identical;
  double similarity = 0.0;  // in [0,1]
};

struct CandidatePair {
  std::string page_title;
  std::uint64_t prev_rev_id = 0;
  std::uint64_t curr_rev_id = 0;
  std::string original;   // prior-version paragraph
  std::string perturbed;  // current-version paragraph
};

struct PipelineConfig {
  std::size_t min_paragraph_chars = 500;         // strict >, counted in code points
  double alignment_similarity_threshold = 0.5;   // in (0,1]
  std::uint64_t rng_seed = 0;
  std::size_t workers = 1;
};

// Word-token LCS similarity: 2*LCS(a,b) / (|a|+|b|). Symmetric, 1 iff the
// token sequences are equal.
double paragraph_similarity(std::string_view a, std::string_view b);

// Every paragraph of both documents lands in exactly one unit. Equal texts
// pair as Identical; the rest pair greedily by descending similarity and
// become Modification when they clear the threshold; leftovers are
// Addition/Deletion.
std::vector<AlignedUnit> align_paragraphs(const wikitext::CleanDocument& prev,
                                          const wikitext::CleanDocument& curr,
                                          const PipelineConfig& cfg);

struct RevisionMeta {
  std::string page_title;
  std::uint64_t prev_rev_id = 0;
  std::uint64_t curr_rev_id = 0;
};

// Modification units whose both sides exceed min_paragraph_chars.
std::vector<CandidatePair> extract_candidates(const std::vector<AlignedUnit>& units,
                                              const RevisionMeta& meta,
                                              const PipelineConfig& cfg);

// clean -> align -> extract over every adjacent revision pair of the page,
// de-duplicated on the (original, perturbed) text pair.
std::vector<CandidatePair> mine_page(const harvest::PageRef& page,
                                     const harvest::RevisionCache& cache,
                                     const PipelineConfig& cfg);

// Pages mined in parallel (cfg.workers); output order follows `pages`.
std::vector<CandidatePair> mine_pages(const std::vector<harvest::PageRef>& pages,
                                      const harvest::RevisionCache& cache,
                                      const PipelineConfig& cfg);

void save_candidates(const std::vector<CandidatePair>& candidates,
                     const std::filesystem::path& path);
std::vector<CandidatePair> load_candidates(const std::filesystem::path& path);

}  // namespace natpert::diff
