#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "natpert/dataset.hpp"
#include "natpert/diff.hpp"

namespace natpert::testset {

struct Provenance {
  std::string page_title;
  std::uint64_t prev_rev_id = 0;
  std::uint64_t curr_rev_id = 0;
};

// Original and perturbed halves share qids, questions and gold answer texts;
// only the contexts differ.
struct PairedTestSet {
  mrc::MrcDataset original;
  mrc::MrcDataset perturbed;
  std::map<std::string, Provenance> provenance;  // qid -> source revision pair
};

// Whitespace-normalized form used for context <-> candidate equality.
std::string match_key(std::string_view context);

// Context -> selected candidate. Multi-candidate contexts pick uniformly at
// random from a stream derived from (seed, context), so parallel evaluation
// order cannot change the choice.
std::map<std::string, diff::CandidatePair> match_passages(
    const mrc::MrcDataset& dataset, const std::vector<diff::CandidatePair>& candidates,
    std::uint64_t seed);

// Keeps a QaItem iff every gold (or plausible) answer occurs verbatim in the
// perturbed paragraph; answer_start is recomputed to the first occurrence.
std::vector<mrc::QaItem> filter_answer_preserving(const std::string& perturbed_context,
                                                  const std::vector<mrc::QaItem>& qas);

PairedTestSet build_paired_sets(const mrc::MrcDataset& dataset,
                                const std::vector<diff::CandidatePair>& candidates,
                                const diff::PipelineConfig& cfg);

// Perturbed instances only, qids suffixed "-nat", ready to concatenate with
// the original training file.
mrc::MrcDataset build_augmentation(const mrc::MrcDataset& train,
                                   const std::vector<diff::CandidatePair>& candidates,
                                   const diff::PipelineConfig& cfg);

// Supporting passages are swapped for their matched perturbed versions;
// distractors pass through; nullopt when no supporting passage matched.
std::optional<mrc::GenericRecord> perturb_multipassage(
    const mrc::GenericRecord& record,
    const std::map<std::string, diff::CandidatePair>& matches);

// Generic-schema counterpart of build_paired_sets, built on
// perturb_multipassage per record.
PairedTestSet build_paired_generic(const mrc::MrcDataset& dataset,
                                   const std::vector<diff::CandidatePair>& candidates,
                                   const diff::PipelineConfig& cfg);

std::string provenance_to_json(const std::map<std::string, Provenance>& provenance);

}  // namespace natpert::testset
