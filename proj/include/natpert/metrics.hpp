#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "natpert/dataset.hpp"

namespace natpert::metrics {

struct PredictionSet {
  std::string model_name;
  std::unordered_map<std::string, std::string> predictions;  // qid -> answer string
};

PredictionSet load_predictions(const std::filesystem::path& path, std::string model_name = "");

// Lowercase phrases whose presence in a response marks it as claiming the
// question is unanswerable. Defaults are the hand-collected indicator set
// with slash templates ("this/the", "context/question/.../passage does not")
// expanded into every alternative.
struct UnanswerablePhraseSet {
  std::vector<std::string> phrases;

  static UnanswerablePhraseSet defaults();
  static UnanswerablePhraseSet load(const std::filesystem::path& path);
};

// SQuAD answer normalization: lowercase, strip punctuation, drop the articles
// a/an/the as whole tokens, collapse whitespace.
std::string normalize_text(std::string_view s);
std::vector<std::string> normalized_tokens(std::string_view s);

// A span prediction that means "no answer": empty or the literal
// "unanswerable" after normalization.
bool is_unanswerable_marker(std::string_view prediction);

// Max over golds of token-overlap F1. Empty golds = unanswerable question:
// scores 1 when the prediction is the no-answer marker, else 0.
double token_f1(std::string_view prediction, const std::vector<std::string>& golds);
int exact_match(std::string_view prediction, const std::vector<std::string>& golds);

bool detect_unanswerable(std::string_view response, const UnanswerablePhraseSet& phrases);

// Answerable: the (normalized) response contains a gold answer and does not
// claim unanswerability. Unanswerable: it claims unanswerability.
int inclusion_match(std::string_view response, const std::vector<std::string>& golds,
                    bool is_impossible, const UnanswerablePhraseSet& phrases);

enum class MetricKind { TokenF1, InclusionMatch };
MetricKind metric_kind_from_name(std::string_view name);  // "f1" | "im"
const char* metric_kind_name(MetricKind kind);

struct QuestionScore {
  int em = 0;
  double f1 = 0.0;
  int im = 0;
  std::string prediction;  // raw response, kept for audit
};

struct ScoreReport {
  MetricKind metric = MetricKind::TokenF1;
  std::map<std::string, QuestionScore> per_question;
  double em = 0.0;
  double f1 = 0.0;
  double im = 0.0;
  std::optional<double> answerable_f1;
  std::optional<double> unanswerable_f1;
  std::size_t n_total = 0;
  std::size_t n_answerable = 0;
  std::size_t n_unanswerable = 0;

  double headline() const { return metric == MetricKind::TokenF1 ? f1 : im; }
};

// Errors with MissingPrediction if any dataset qid has no prediction.
ScoreReport score(const mrc::MrcDataset& dataset, const PredictionSet& preds,
                  MetricKind kind, const UnanswerablePhraseSet& phrases);

std::string report_to_json(const ScoreReport& report);
void save_report(const ScoreReport& report, const std::filesystem::path& path);

// 100 * (perturbed - original) / original. DivisionByZero when original == 0.
double relative_change(double original_score, double perturbed_score);

// Half-away-from-zero rounding to 2 decimals, the reporting convention.
double round2(double x);

}  // namespace natpert::metrics
