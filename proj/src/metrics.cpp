#include "natpert/metrics.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "json.hpp"
#include "natpert/error.hpp"
#include "natpert/text.hpp"

namespace natpert::metrics {

using ordered_json = nlohmann::ordered_json;

PredictionSet load_predictions(const std::filesystem::path& path, std::string model_name) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorCode::Io, "cannot open predictions: " + path.string());
  ordered_json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    raise(ErrorCode::Parse, std::string("invalid predictions JSON: ") + e.what());
  }
  if (!j.is_object()) raise(ErrorCode::Parse, "predictions must be a JSON object {qid: answer}");
  PredictionSet out;
  out.model_name = model_name.empty() ? path.stem().string() : std::move(model_name);
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!it.value().is_string())
      raise(ErrorCode::Parse, "prediction for qid " + it.key() + " is not a string");
    out.predictions[it.key()] = it.value().get<std::string>();
  }
  return out;
}

UnanswerablePhraseSet UnanswerablePhraseSet::defaults() {
  UnanswerablePhraseSet set;
  // "I cannot answer this/the question"
  set.phrases = {
      "i cannot answer this question",
      "i cannot answer the question",
      "unanswerable",
      "there is no indication in the provided article",
      "the context provided does not provide enough information",
      "there is no reference in the given article",
      "the answer to the question is not provided in the given article",
      "it is not possible",
      "question cannot be answered",
  };
  // "context/question/article/text/article provided/passage does not"
  for (const char* subject :
       {"context", "question", "article", "text", "article provided", "passage"}) {
    set.phrases.push_back(std::string(subject) + " does not");
  }
  return set;
}

UnanswerablePhraseSet UnanswerablePhraseSet::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorCode::Io, "cannot open phrase file: " + path.string());
  ordered_json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    raise(ErrorCode::Parse, std::string("invalid phrase JSON: ") + e.what());
  }
  UnanswerablePhraseSet set;
  const ordered_json& arr = j.is_object() ? j.at("phrases") : j;
  for (const auto& p : arr) set.phrases.push_back(text::to_lower_ascii(p.get<std::string>()));
  if (set.phrases.empty()) raise(ErrorCode::Parse, "phrase set is empty");
  return set;
}

std::string normalize_text(std::string_view s) {
  std::string lowered;
  lowered.reserve(s.size());
  for (char c : s) {
    unsigned char uc = static_cast<unsigned char>(c);
    char lc = static_cast<char>(std::tolower(uc));
    if (uc < 0x80 && std::ispunct(uc)) continue;  // strip ASCII punctuation
    lowered.push_back(lc);
  }
  std::vector<std::string> tokens = text::split_words(lowered);
  std::string out;
  for (const std::string& tok : tokens) {
    if (tok == "a" || tok == "an" || tok == "the") continue;
    if (!out.empty()) out.push_back(' ');
    out += tok;
  }
  return out;
}

std::vector<std::string> normalized_tokens(std::string_view s) {
  return text::split_words(normalize_text(s));
}

bool is_unanswerable_marker(std::string_view prediction) {
  std::string norm = normalize_text(prediction);
  return norm.empty() || norm == "unanswerable";
}

namespace {

double single_f1(const std::vector<std::string>& pred_tokens,
                 const std::vector<std::string>& gold_tokens) {
  if (pred_tokens.empty() && gold_tokens.empty()) return 1.0;
  if (pred_tokens.empty() || gold_tokens.empty()) return 0.0;
  std::unordered_map<std::string, std::size_t> counts;
  for (const std::string& t : gold_tokens) ++counts[t];
  std::size_t overlap = 0;
  for (const std::string& t : pred_tokens) {
    auto it = counts.find(t);
    if (it != counts.end() && it->second > 0) {
      --it->second;
      ++overlap;
    }
  }
  if (overlap == 0) return 0.0;
  const double precision = static_cast<double>(overlap) / static_cast<double>(pred_tokens.size());
  const double recall = static_cast<double>(overlap) / static_cast<double>(gold_tokens.size());
  return 2.0 * precision * recall / (precision + recall);
}

}  // namespace

double token_f1(std::string_view prediction, const std::vector<std::string>& golds) {
  if (golds.empty()) return is_unanswerable_marker(prediction) ? 1.0 : 0.0;
  const std::vector<std::string> pred_tokens = normalized_tokens(prediction);
  double best = 0.0;
  for (const std::string& gold : golds)
    best = std::max(best, single_f1(pred_tokens, normalized_tokens(gold)));
  return best;
}

int exact_match(std::string_view prediction, const std::vector<std::string>& golds) {
  if (golds.empty()) return is_unanswerable_marker(prediction) ? 1 : 0;
  const std::string norm = normalize_text(prediction);
  for (const std::string& gold : golds)
    if (norm == normalize_text(gold)) return 1;
  return 0;
}

bool detect_unanswerable(std::string_view response, const UnanswerablePhraseSet& phrases) {
  const std::string haystack = text::to_lower_ascii(text::collapse_whitespace(response));
  for (const std::string& phrase : phrases.phrases)
    if (text::contains(haystack, phrase)) return true;
  return false;
}

int inclusion_match(std::string_view response, const std::vector<std::string>& golds,
                    bool is_impossible, const UnanswerablePhraseSet& phrases) {
  const bool claims_unanswerable = detect_unanswerable(response, phrases);
  if (is_impossible) return claims_unanswerable ? 1 : 0;
  if (claims_unanswerable) return 0;
  const std::string norm_response = normalize_text(response);
  for (const std::string& gold : golds) {
    const std::string norm_gold = normalize_text(gold);
    if (!norm_gold.empty() && text::contains(norm_response, norm_gold)) return 1;
  }
  return 0;
}

MetricKind metric_kind_from_name(std::string_view name) {
  if (name == "f1") return MetricKind::TokenF1;
  if (name == "im") return MetricKind::InclusionMatch;
  raise(ErrorCode::InvalidArgument, "unknown metric: " + std::string(name) + " (expected f1|im)");
}

const char* metric_kind_name(MetricKind kind) {
  return kind == MetricKind::TokenF1 ? "f1" : "im";
}

namespace {

void score_one(const mrc::QaItem& qa, const std::string& prediction,
               const UnanswerablePhraseSet& phrases, ScoreReport& report) {
  std::vector<std::string> em_f1_golds;
  if (!qa.is_impossible)
    for (const mrc::Answer& a : qa.answers) em_f1_golds.push_back(a.text);
  QuestionScore qs;
  qs.prediction = prediction;
  qs.em = exact_match(prediction, em_f1_golds);
  qs.f1 = token_f1(prediction, em_f1_golds);
  std::vector<std::string> im_golds = em_f1_golds;
  qs.im = inclusion_match(prediction, im_golds, qa.is_impossible, phrases);
  report.per_question.emplace(qa.qid, std::move(qs));
}

const std::string& prediction_for(const PredictionSet& preds, const std::string& qid) {
  auto it = preds.predictions.find(qid);
  if (it == preds.predictions.end())
    raise(ErrorCode::MissingPrediction, "no prediction for qid " + qid);
  return it->second;
}

}  // namespace

ScoreReport score(const mrc::MrcDataset& dataset, const PredictionSet& preds,
                  MetricKind kind, const UnanswerablePhraseSet& phrases) {
  ScoreReport report;
  report.metric = kind;
  std::vector<const mrc::QaItem*> items;
  std::vector<mrc::QaItem> generic_items;  // storage when converting records
  if (dataset.schema == mrc::Schema::GenericJsonl) {
    generic_items.reserve(dataset.records.size());
    for (const mrc::GenericRecord& r : dataset.records) {
      mrc::QaItem qa;
      qa.qid = r.qid;
      qa.question = r.question;
      qa.is_impossible = r.answers.empty();
      for (const std::string& a : r.answers) qa.answers.push_back({a, std::nullopt});
      generic_items.push_back(std::move(qa));
    }
    for (const mrc::QaItem& qa : generic_items) items.push_back(&qa);
  } else {
    for (const mrc::Article& art : dataset.articles)
      for (const mrc::Paragraph& par : art.paragraphs)
        for (const mrc::QaItem& qa : par.qas) items.push_back(&qa);
  }

  double em_sum = 0, f1_sum = 0, im_sum = 0;
  double ans_f1_sum = 0, unans_f1_sum = 0;
  for (const mrc::QaItem* qa : items) {
    score_one(*qa, prediction_for(preds, qa->qid), phrases, report);
    const QuestionScore& qs = report.per_question.at(qa->qid);
    em_sum += qs.em;
    f1_sum += qs.f1;
    im_sum += qs.im;
    if (qa->is_impossible) {
      ++report.n_unanswerable;
      unans_f1_sum += qs.f1;
    } else {
      ++report.n_answerable;
      ans_f1_sum += qs.f1;
    }
    ++report.n_total;
  }
  if (report.n_total > 0) {
    report.em = em_sum / static_cast<double>(report.n_total);
    report.f1 = f1_sum / static_cast<double>(report.n_total);
    report.im = im_sum / static_cast<double>(report.n_total);
  }
  if (report.n_answerable > 0)
    report.answerable_f1 = ans_f1_sum / static_cast<double>(report.n_answerable);
  if (report.n_unanswerable > 0)
    report.unanswerable_f1 = unans_f1_sum / static_cast<double>(report.n_unanswerable);
  return report;
}

std::string report_to_json(const ScoreReport& report) {
  ordered_json j;
  j["metric"] = metric_kind_name(report.metric);
  ordered_json agg;
  agg["em"] = report.em;
  agg["f1"] = report.f1;
  agg["im"] = report.im;
  agg["answerable_f1"] = report.answerable_f1 ? ordered_json(*report.answerable_f1) : ordered_json(nullptr);
  agg["unanswerable_f1"] =
      report.unanswerable_f1 ? ordered_json(*report.unanswerable_f1) : ordered_json(nullptr);
  j["aggregates"] = std::move(agg);
  ordered_json counts;
  counts["total"] = report.n_total;
  counts["answerable"] = report.n_answerable;
  counts["unanswerable"] = report.n_unanswerable;
  j["counts"] = std::move(counts);
  ordered_json per;
  for (const auto& [qid, qs] : report.per_question) {
    ordered_json q;
    q["em"] = qs.em;
    q["f1"] = qs.f1;
    q["im"] = qs.im;
    q["prediction"] = qs.prediction;
    per[qid] = std::move(q);
  }
  j["per_question"] = std::move(per);
  return j.dump(2);
}

void save_report(const ScoreReport& report, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) raise(ErrorCode::Io, "cannot write report: " + path.string());
  out << report_to_json(report) << '\n';
}

double relative_change(double original_score, double perturbed_score) {
  if (original_score == 0.0)
    raise(ErrorCode::DivisionByZero, "relative_change: original score is zero");
  return 100.0 * (perturbed_score - original_score) / original_score;
}

double round2(double x) {
  return std::round(x * 100.0) / 100.0;
}

}  // namespace natpert::metrics
