#include "natpert/challenge.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_set>

#include "json.hpp"
#include "natpert/error.hpp"
#include "natpert/metrics.hpp"
#include "natpert/rng.hpp"
#include "natpert/text.hpp"

namespace natpert::challenge {

using ordered_json = nlohmann::ordered_json;

Correctness question_correctness(std::string_view prediction, const mrc::QaItem& qa) {
  if (qa.is_impossible)
    return metrics::is_unanswerable_marker(prediction) ? Correctness::Correct
                                                       : Correctness::Wrong;
  std::vector<std::string> golds;
  for (const mrc::Answer& a : qa.answers) golds.push_back(a.text);
  if (metrics::exact_match(prediction, golds) == 1) return Correctness::Correct;
  if (metrics::is_unanswerable_marker(prediction)) return Correctness::Wrong;
  if (metrics::token_f1(prediction, golds) == 0.0) return Correctness::Wrong;
  return Correctness::Neither;
}

bool lacks_robustness(std::string_view orig_pred, std::string_view pert_pred,
                      const mrc::QaItem& qa, const RobustnessRule& rule) {
  if (qa.is_impossible) {
    return question_correctness(orig_pred, qa) == Correctness::Correct &&
           question_correctness(pert_pred, qa) == Correctness::Wrong;
  }
  std::vector<std::string> golds;
  for (const mrc::Answer& a : qa.answers) golds.push_back(a.text);
  if (metrics::exact_match(orig_pred, golds) != 1) return false;
  return metrics::token_f1(pert_pred, golds) < rule.perturbed_f1_below;
}

namespace {

const std::string* lookup(const std::unordered_map<std::string, std::string>& preds,
                          const std::string& qid) {
  auto it = preds.find(qid);
  if (it == preds.end())
    raise(ErrorCode::MissingPrediction, "no prediction for qid " + qid);
  return &it->second;
}

struct ScenarioCounts {
  std::size_t n = 0;  // model-question failures
  std::size_t q = 0;  // questions with >=1 failing model
  std::vector<std::string> reserved_qids;
};

ScenarioCounts evaluate_scenario(const std::vector<mrc::QaItem>& qas,
                                 const std::vector<ModelPredictions>& models,
                                 const RobustnessRule& rule, bool forward) {
  ScenarioCounts out;
  for (const mrc::QaItem& qa : qas) {
    std::size_t failing = 0;
    for (const ModelPredictions& m : models) {
      const std::string& orig = forward ? *lookup(m.side_a, qa.qid) : *lookup(m.side_b, qa.qid);
      const std::string& pert = forward ? *lookup(m.side_b, qa.qid) : *lookup(m.side_a, qa.qid);
      if (lacks_robustness(orig, pert, qa, rule)) ++failing;
    }
    out.n += failing;
    if (failing > 0) {
      ++out.q;
      out.reserved_qids.push_back(qa.qid);
    }
  }
  return out;
}

}  // namespace

OrientationDecision orient_pair(const std::vector<mrc::QaItem>& qas,
                                const std::vector<ModelPredictions>& models,
                                const RobustnessRule& rule, std::uint64_t seed) {
  const ScenarioCounts fwd = evaluate_scenario(qas, models, rule, true);
  const ScenarioCounts rev = evaluate_scenario(qas, models, rule, false);
  OrientationDecision d;
  d.n_forward = fwd.n;
  d.n_reverse = rev.n;
  d.q_forward = fwd.q;
  d.q_reverse = rev.q;
  if (fwd.n != rev.n) {
    d.forward = fwd.n > rev.n;
  } else if (fwd.q != rev.q) {
    d.forward = fwd.q > rev.q;
  } else {
    rng::Rng stream(seed);
    d.forward = stream.index(2) == 0;
    d.tie_broken_randomly = true;
  }
  return d;
}

const char* case_label_name(CaseLabel label) {
  switch (label) {
    case CaseLabel::C2W: return "C2W";
    case CaseLabel::C2C: return "C2C";
    case CaseLabel::W2C: return "W2C";
  }
  return "unknown";
}

std::map<std::string, CaseLabel> classify_cases(const std::vector<ModelPredictions>& models,
                                                const std::vector<mrc::QaItem>& qas) {
  std::map<std::string, CaseLabel> out;
  for (const mrc::QaItem& qa : qas) {
    std::size_t c2w = 0, w2c = 0;
    bool all_correct_both = !models.empty();
    for (const ModelPredictions& m : models) {
      const Correctness before = question_correctness(*lookup(m.side_a, qa.qid), qa);
      const Correctness after = question_correctness(*lookup(m.side_b, qa.qid), qa);
      if (before == Correctness::Correct && after == Correctness::Wrong) ++c2w;
      if (before == Correctness::Wrong && after == Correctness::Correct) ++w2c;
      if (before != Correctness::Correct || after != Correctness::Correct)
        all_correct_both = false;
    }
    if (c2w >= 1)
      out.emplace(qa.qid, CaseLabel::C2W);
    else if (all_correct_both)
      out.emplace(qa.qid, CaseLabel::C2C);
    else if (w2c >= 2)
      out.emplace(qa.qid, CaseLabel::W2C);
  }
  return out;
}

ChallengeResult build_challenge_set(const std::vector<PairInput>& pairs,
                                    const std::vector<ModelPredictions>& models,
                                    const mrc::MrcDataset& dev_set, const RobustnessRule& rule,
                                    std::uint64_t seed) {
  std::unordered_set<std::string> dev_contexts;
  for (const mrc::Article& a : dev_set.articles)
    for (const mrc::Paragraph& p : a.paragraphs)
      dev_contexts.insert(testset::match_key(p.context));

  struct Oriented {
    const PairInput* pair;
    OrientationDecision decision;
    std::string original_context, perturbed_context;
    std::vector<std::string> reserved;  // qids with >=1 failing model
  };

  ChallengeResult result;
  std::vector<Oriented> oriented;
  for (const PairInput& pair : pairs) {
    OrientationDecision d =
        orient_pair(pair.qas, models, rule, rng::derive_seed(seed, pair.key));
    Oriented o;
    o.pair = &pair;
    o.decision = d;
    o.original_context = d.forward ? pair.context_a : pair.context_b;
    o.perturbed_context = d.forward ? pair.context_b : pair.context_a;
    const ScenarioCounts chosen = evaluate_scenario(pair.qas, models, rule, d.forward);
    o.reserved = chosen.reserved_qids;
    oriented.push_back(std::move(o));
  }

  // originals must come from the official dev set
  std::map<std::string, std::size_t> best_by_original;  // normalized original -> oriented index
  std::vector<bool> keep(oriented.size(), false);
  for (std::size_t i = 0; i < oriented.size(); ++i) {
    Oriented& o = oriented[i];
    PairDecision pd;
    pd.key = o.pair->key;
    pd.orientation = o.decision;
    pd.questions_reserved = o.reserved.size();
    if (o.reserved.empty()) {
      result.decisions.push_back(std::move(pd));
      continue;
    }
    const std::string norm = testset::match_key(o.original_context);
    if (!dev_contexts.count(norm)) {
      pd.dev_constrained_out = true;
      result.decisions.push_back(std::move(pd));
      continue;
    }
    auto [it, inserted] = best_by_original.emplace(norm, i);
    if (inserted) {
      keep[i] = true;
    } else if (o.reserved.size() > oriented[it->second].reserved.size()) {
      keep[it->second] = false;
      // mark the displaced pair's decision as a dropped duplicate
      for (PairDecision& prev : result.decisions)
        if (prev.key == oriented[it->second].pair->key) prev.dropped_duplicate = true;
      it->second = i;
      keep[i] = true;
    } else {
      pd.dropped_duplicate = true;
    }
    result.decisions.push_back(std::move(pd));
  }

  mrc::MrcDataset& orig_ds = result.set.original;
  mrc::MrcDataset& pert_ds = result.set.perturbed;
  orig_ds.schema = pert_ds.schema = dev_set.schema;
  orig_ds.version = pert_ds.version = dev_set.version;
  orig_ds.name = "challenge-original";
  pert_ds.name = "challenge-perturbed";
  for (std::size_t i = 0; i < oriented.size(); ++i) {
    if (!keep[i]) continue;
    const Oriented& o = oriented[i];
    std::set<std::string> reserved(o.reserved.begin(), o.reserved.end());
    mrc::Paragraph orig_par, pert_par;
    orig_par.context = o.original_context;
    pert_par.context = o.perturbed_context;
    for (const mrc::QaItem& qa : o.pair->qas) {
      if (!reserved.count(qa.qid)) continue;
      mrc::QaItem orig_qa = qa;
      mrc::QaItem pert_qa = qa;
      auto relocate = [](std::vector<mrc::Answer>& answers, const std::string& ctx) {
        for (mrc::Answer& a : answers) {
          std::size_t pos = ctx.find(a.text);
          if (pos == std::string::npos)
            a.answer_start.reset();
          else
            a.answer_start = static_cast<std::int64_t>(pos);
        }
      };
      relocate(orig_qa.answers, orig_par.context);
      relocate(orig_qa.plausible_answers, orig_par.context);
      relocate(pert_qa.answers, pert_par.context);
      relocate(pert_qa.plausible_answers, pert_par.context);
      orig_par.qas.push_back(std::move(orig_qa));
      pert_par.qas.push_back(std::move(pert_qa));
      result.set.provenance[qa.qid] = o.pair->provenance;
    }
    mrc::Article orig_article{o.pair->key, {std::move(orig_par)}};
    mrc::Article pert_article{o.pair->key, {std::move(pert_par)}};
    orig_ds.articles.push_back(std::move(orig_article));
    pert_ds.articles.push_back(std::move(pert_article));
  }
  if (orig_ds.articles.empty())
    raise(ErrorCode::EmptyResult, "no passage pair produced a challenge question");
  return result;
}

std::string decisions_to_json(const std::vector<PairDecision>& decisions) {
  ordered_json arr = ordered_json::array();
  for (const PairDecision& d : decisions) {
    ordered_json j;
    j["key"] = d.key;
    j["n_forward"] = d.orientation.n_forward;
    j["n_reverse"] = d.orientation.n_reverse;
    j["q_forward"] = d.orientation.q_forward;
    j["q_reverse"] = d.orientation.q_reverse;
    j["orientation"] = d.orientation.forward ? "forward" : "reverse";
    j["tie_broken_randomly"] = d.orientation.tie_broken_randomly;
    j["questions_reserved"] = d.questions_reserved;
    j["dev_constrained_out"] = d.dev_constrained_out;
    j["dropped_duplicate"] = d.dropped_duplicate;
    arr.push_back(std::move(j));
  }
  ordered_json root;
  root["pairs"] = std::move(arr);
  return root.dump(2);
}

std::uint64_t perturbation_magnitude(std::string_view original, std::string_view perturbed) {
  const std::size_t n = original.size(), m = perturbed.size();
  if (n == 0) return m;
  if (m == 0) return n;
  std::vector<std::uint64_t> prev(m + 1), curr(m + 1);
  for (std::size_t j = 0; j <= m; ++j) prev[j] = j;
  for (std::size_t i = 1; i <= n; ++i) {
    curr[0] = i;
    for (std::size_t j = 1; j <= m; ++j) {
      const std::uint64_t sub = prev[j - 1] + (original[i - 1] == perturbed[j - 1] ? 0 : 1);
      curr[j] = std::min({prev[j] + 1, curr[j - 1] + 1, sub});
    }
    std::swap(prev, curr);
  }
  return prev[m];
}

double point_biserial(const std::vector<double>& values, const std::vector<int>& labels) {
  if (values.size() != labels.size() || values.empty())
    raise(ErrorCode::InvalidArgument, "point_biserial: size mismatch or empty input");
  double sum1 = 0, sum0 = 0;
  std::size_t n1 = 0, n0 = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (labels[i]) {
      sum1 += values[i];
      ++n1;
    } else {
      sum0 += values[i];
      ++n0;
    }
  }
  if (n1 == 0 || n0 == 0)
    raise(ErrorCode::DegenerateInput, "point_biserial: one class is empty");
  const double n = static_cast<double>(values.size());
  double mean = (sum1 + sum0) / n;
  double var = 0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= n;  // population variance
  if (var == 0.0)
    raise(ErrorCode::DegenerateInput, "point_biserial: values have zero variance");
  const double m1 = sum1 / static_cast<double>(n1);
  const double m0 = sum0 / static_cast<double>(n0);
  const double p = static_cast<double>(n1) / n;
  const double q = static_cast<double>(n0) / n;
  return (m1 - m0) / std::sqrt(var) * std::sqrt(p * q);
}

double answer_sentence_unmodified_rate(const std::vector<AnalyzedPair>& pairs) {
  std::size_t total = 0, unmodified = 0;
  for (const AnalyzedPair& pair : pairs) {
    const auto spans = text::sentence_spans(pair.original);
    for (const mrc::QaItem& qa : pair.qas) {
      if (qa.is_impossible) continue;
      // locate each answer: given offset if valid, else first occurrence
      std::vector<std::pair<std::size_t, std::size_t>> locations;
      bool locatable = !qa.answers.empty();
      for (const mrc::Answer& a : qa.answers) {
        std::size_t pos;
        if (a.answer_start && *a.answer_start >= 0 &&
            pair.original.compare(static_cast<std::size_t>(*a.answer_start), a.text.size(),
                                  a.text) == 0) {
          pos = static_cast<std::size_t>(*a.answer_start);
        } else {
          pos = pair.original.find(a.text);
          if (pos == std::string::npos) {
            locatable = false;
            break;
          }
        }
        locations.emplace_back(pos, pos + a.text.size());
      }
      if (!locatable) continue;
      ++total;
      bool all_survive = true;
      for (const auto& [abeg, aend] : locations) {
        for (const text::SentenceSpan& sp : spans) {
          if (sp.end <= abeg || sp.begin >= aend) continue;  // no overlap
          std::string sentence =
              text::trim(std::string_view(pair.original).substr(sp.begin, sp.end - sp.begin));
          if (pair.perturbed.find(sentence) == std::string::npos) {
            all_survive = false;
            break;
          }
        }
        if (!all_survive) break;
      }
      if (all_survive) ++unmodified;
    }
  }
  if (total == 0) return 0.0;
  return 100.0 * static_cast<double>(unmodified) / static_cast<double>(total);
}

}  // namespace natpert::challenge
