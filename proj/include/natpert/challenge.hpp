#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "natpert/dataset.hpp"
#include "natpert/testset.hpp"

namespace natpert::challenge {

// A model lacks robustness on an answerable question when it scores EM 1 on
// the original but under this F1 bound (strict) on the perturbed. For
// unanswerable questions the correctness rules below apply instead.
struct RobustnessRule {
  double perturbed_f1_below = 0.4;
};

enum class Correctness { Correct, Wrong, Neither };

// Answerable: Correct iff EM=1; Wrong iff F1=0 or the prediction is the
// no-answer marker; the 0<F1<1 band is Neither. Unanswerable: Correct iff
// the prediction is the marker, otherwise Wrong.
Correctness question_correctness(std::string_view prediction, const mrc::QaItem& qa);

bool lacks_robustness(std::string_view orig_pred, std::string_view pert_pred,
                      const mrc::QaItem& qa, const RobustnessRule& rule);

// Predictions of one model for a passage pair's questions, one map per side.
struct ModelPredictions {
  std::string model_name;
  std::unordered_map<std::string, std::string> side_a;  // qid -> prediction on P
  std::unordered_map<std::string, std::string> side_b;  // qid -> prediction on P'
};

struct OrientationDecision {
  bool forward = true;  // true: P original / P' perturbed
  std::size_t n_forward = 0;   // N
  std::size_t n_reverse = 0;   // N'
  std::size_t q_forward = 0;   // Q
  std::size_t q_reverse = 0;   // Q'
  bool tie_broken_randomly = false;
};

// N vs N', then Q vs Q', then a seeded coin. The seed should be derived per
// pair, keyed by page title, so parallel runs reproduce.
OrientationDecision orient_pair(const std::vector<mrc::QaItem>& qas,
                                const std::vector<ModelPredictions>& models,
                                const RobustnessRule& rule, std::uint64_t seed);

enum class CaseLabel { C2W, C2C, W2C };
const char* case_label_name(CaseLabel label);

// C2W: >=1 model Correct->Wrong. C2C: all models Correct on both. W2C: >=2
// models Wrong->Correct. Evaluated in that precedence; absent otherwise.
// side_a holds original-side predictions, side_b perturbed-side.
std::map<std::string, CaseLabel> classify_cases(const std::vector<ModelPredictions>& models,
                                                const std::vector<mrc::QaItem>& qas);

struct PairInput {
  std::string key;  // page title (or another stable id) for seeding/reporting
  std::string context_a;
  std::string context_b;
  std::vector<mrc::QaItem> qas;
  testset::Provenance provenance;
};

struct PairDecision {
  std::string key;
  OrientationDecision orientation;
  std::size_t questions_reserved = 0;
  bool dev_constrained_out = false;
  bool dropped_duplicate = false;
};

struct ChallengeResult {
  testset::PairedTestSet set;
  std::vector<PairDecision> decisions;
};

// Appendix-H style search: orient every pair, keep questions where at least
// one model lacks robustness, require the chosen original to appear in the
// dev set, and resolve multi-occurrence originals by most reserved questions.
ChallengeResult build_challenge_set(const std::vector<PairInput>& pairs,
                                    const std::vector<ModelPredictions>& models,
                                    const mrc::MrcDataset& dev_set, const RobustnessRule& rule,
                                    std::uint64_t seed);

std::string decisions_to_json(const std::vector<PairDecision>& decisions);

// Byte-level Levenshtein distance between the UTF-8 encodings.
std::uint64_t perturbation_magnitude(std::string_view original, std::string_view perturbed);

// (M1 - M0) / s * sqrt(p*q) with the population standard deviation;
// DegenerateInput when either class is empty or s is zero.
double point_biserial(const std::vector<double>& values, const std::vector<int>& labels);

struct AnalyzedPair {
  std::string original;
  std::string perturbed;
  std::vector<mrc::QaItem> qas;
};

// Percentage of answerable questions (with answers locatable in the
// original) whose answer sentences all survive verbatim in the perturbed
// passage.
double answer_sentence_unmodified_rate(const std::vector<AnalyzedPair>& pairs);

}  // namespace natpert::challenge
