#include "natpert/testset.hpp"

#include <algorithm>
#include <unordered_map>

#include "json.hpp"
#include "natpert/error.hpp"
#include "natpert/rng.hpp"
#include "natpert/text.hpp"

namespace natpert::testset {

using ordered_json = nlohmann::ordered_json;

std::string match_key(std::string_view context) { return text::collapse_whitespace(context); }

namespace {

// Candidate lists per normalized original, in stable input order.
std::unordered_map<std::string, std::vector<const diff::CandidatePair*>> index_candidates(
    const std::vector<diff::CandidatePair>& candidates) {
  std::unordered_map<std::string, std::vector<const diff::CandidatePair*>> by_original;
  for (const diff::CandidatePair& c : candidates) by_original[match_key(c.original)].push_back(&c);
  return by_original;
}

const diff::CandidatePair* select_candidate(
    const std::unordered_map<std::string, std::vector<const diff::CandidatePair*>>& by_original,
    const std::string& context, std::uint64_t seed) {
  auto it = by_original.find(match_key(context));
  if (it == by_original.end()) return nullptr;
  const std::vector<const diff::CandidatePair*>& hits = it->second;
  if (hits.size() == 1) return hits.front();
  rng::Rng stream(rng::derive_seed(seed, match_key(context)));
  return hits[stream.index(hits.size())];
}

}  // namespace

std::map<std::string, diff::CandidatePair> match_passages(
    const mrc::MrcDataset& dataset, const std::vector<diff::CandidatePair>& candidates,
    std::uint64_t seed) {
  auto by_original = index_candidates(candidates);
  std::map<std::string, diff::CandidatePair> out;
  auto consider = [&](const std::string& context) {
    if (out.count(context)) return;
    if (const diff::CandidatePair* hit = select_candidate(by_original, context, seed))
      out.emplace(context, *hit);
  };
  if (dataset.schema == mrc::Schema::GenericJsonl) {
    for (const mrc::GenericRecord& r : dataset.records)
      for (const mrc::GenericPassage& p : r.passages) consider(p.text);
  } else {
    for (const mrc::Article& a : dataset.articles)
      for (const mrc::Paragraph& p : a.paragraphs) consider(p.context);
  }
  return out;
}

std::vector<mrc::QaItem> filter_answer_preserving(const std::string& perturbed_context,
                                                  const std::vector<mrc::QaItem>& qas) {
  std::vector<mrc::QaItem> out;
  for (const mrc::QaItem& qa : qas) {
    const std::vector<mrc::Answer>& golds = qa.is_impossible ? qa.plausible_answers : qa.answers;
    if (!qa.is_impossible && golds.empty()) continue;
    // unanswerable items without recorded plausible answers survive vacuously
    bool all_present = true;
    for (const mrc::Answer& a : golds) {
      if (perturbed_context.find(a.text) == std::string::npos) {
        all_present = false;
        break;
      }
    }
    if (!all_present) continue;
    mrc::QaItem kept = qa;
    auto relocate = [&](std::vector<mrc::Answer>& answers) {
      for (mrc::Answer& a : answers)
        a.answer_start = static_cast<std::int64_t>(perturbed_context.find(a.text));
    };
    relocate(kept.answers);
    relocate(kept.plausible_answers);
    out.push_back(std::move(kept));
  }
  return out;
}

namespace {

struct PairedParagraphs {
  mrc::Paragraph original;
  mrc::Paragraph perturbed;
  Provenance provenance;
};

// Shared core of build_paired_sets / build_augmentation for SQuAD schemas.
std::vector<std::pair<std::string, std::vector<PairedParagraphs>>> pair_articles(
    const mrc::MrcDataset& dataset, const std::vector<diff::CandidatePair>& candidates,
    const diff::PipelineConfig& cfg) {
  auto matches = match_passages(dataset, candidates, cfg.rng_seed);
  std::vector<std::pair<std::string, std::vector<PairedParagraphs>>> out;
  for (const mrc::Article& article : dataset.articles) {
    std::vector<PairedParagraphs> pairs;
    for (const mrc::Paragraph& par : article.paragraphs) {
      auto hit = matches.find(par.context);
      if (hit == matches.end()) continue;
      const diff::CandidatePair& cand = hit->second;
      std::vector<mrc::QaItem> kept = filter_answer_preserving(cand.perturbed, par.qas);
      if (kept.empty()) continue;
      PairedParagraphs pp;
      pp.perturbed.context = cand.perturbed;
      pp.perturbed.qas = kept;
      pp.original.context = par.context;
      for (const mrc::QaItem& k : kept) {
        // original half keeps the source items untouched
        for (const mrc::QaItem& src : par.qas)
          if (src.qid == k.qid) pp.original.qas.push_back(src);
      }
      pp.provenance = {cand.page_title, cand.prev_rev_id, cand.curr_rev_id};
      pairs.push_back(std::move(pp));
    }
    if (!pairs.empty()) out.emplace_back(article.title, std::move(pairs));
  }
  return out;
}

}  // namespace

PairedTestSet build_paired_sets(const mrc::MrcDataset& dataset,
                                const std::vector<diff::CandidatePair>& candidates,
                                const diff::PipelineConfig& cfg) {
  if (dataset.schema == mrc::Schema::GenericJsonl)
    return build_paired_generic(dataset, candidates, cfg);
  auto paired = pair_articles(dataset, candidates, cfg);
  if (paired.empty()) raise(ErrorCode::EmptyResult, "no context matched any candidate");
  PairedTestSet out;
  out.original.schema = out.perturbed.schema = dataset.schema;
  out.original.version = out.perturbed.version = dataset.version;
  out.original.name = dataset.name + "-original";
  out.perturbed.name = dataset.name + "-perturbed";
  for (auto& [title, pairs] : paired) {
    mrc::Article orig_article{title, {}};
    mrc::Article pert_article{title, {}};
    for (PairedParagraphs& pp : pairs) {
      for (const mrc::QaItem& qa : pp.perturbed.qas) out.provenance[qa.qid] = pp.provenance;
      orig_article.paragraphs.push_back(std::move(pp.original));
      pert_article.paragraphs.push_back(std::move(pp.perturbed));
    }
    out.original.articles.push_back(std::move(orig_article));
    out.perturbed.articles.push_back(std::move(pert_article));
  }
  return out;
}

mrc::MrcDataset build_augmentation(const mrc::MrcDataset& train,
                                   const std::vector<diff::CandidatePair>& candidates,
                                   const diff::PipelineConfig& cfg) {
  auto paired = pair_articles(train, candidates, cfg);
  if (paired.empty()) raise(ErrorCode::EmptyResult, "no training context matched any candidate");
  mrc::MrcDataset out;
  out.schema = train.schema;
  out.version = train.version;
  out.name = train.name + "-augmentation";
  for (auto& [title, pairs] : paired) {
    mrc::Article article{title, {}};
    for (PairedParagraphs& pp : pairs) {
      for (mrc::QaItem& qa : pp.perturbed.qas) qa.qid += "-nat";
      article.paragraphs.push_back(std::move(pp.perturbed));
    }
    out.articles.push_back(std::move(article));
  }
  return out;
}

std::optional<mrc::GenericRecord> perturb_multipassage(
    const mrc::GenericRecord& record,
    const std::map<std::string, diff::CandidatePair>& matches) {
  mrc::GenericRecord out = record;
  bool any_supporting_perturbed = false;
  for (mrc::GenericPassage& passage : out.passages) {
    if (!passage.is_supporting) continue;  // distractors stay untouched
    auto hit = matches.find(passage.text);
    if (hit == matches.end()) continue;
    passage.text = hit->second.perturbed;
    any_supporting_perturbed = true;
  }
  if (!any_supporting_perturbed) return std::nullopt;
  return out;
}

PairedTestSet build_paired_generic(const mrc::MrcDataset& dataset,
                                   const std::vector<diff::CandidatePair>& candidates,
                                   const diff::PipelineConfig& cfg) {
  auto matches = match_passages(dataset, candidates, cfg.rng_seed);
  PairedTestSet out;
  out.original.schema = out.perturbed.schema = mrc::Schema::GenericJsonl;
  out.original.name = dataset.name + "-original";
  out.perturbed.name = dataset.name + "-perturbed";
  for (const mrc::GenericRecord& record : dataset.records) {
    std::optional<mrc::GenericRecord> perturbed = perturb_multipassage(record, matches);
    if (!perturbed) continue;
    // provenance from the first perturbed supporting passage
    for (std::size_t i = 0; i < record.passages.size(); ++i) {
      if (!record.passages[i].is_supporting) continue;
      auto hit = matches.find(record.passages[i].text);
      if (hit != matches.end()) {
        out.provenance[record.qid] = {hit->second.page_title, hit->second.prev_rev_id,
                                      hit->second.curr_rev_id};
        break;
      }
    }
    out.original.records.push_back(record);
    out.perturbed.records.push_back(std::move(*perturbed));
  }
  if (out.perturbed.records.empty())
    raise(ErrorCode::EmptyResult, "no record had a perturbable supporting passage");
  return out;
}

std::string provenance_to_json(const std::map<std::string, Provenance>& provenance) {
  ordered_json j = ordered_json::object();
  for (const auto& [qid, p] : provenance) {
    ordered_json entry;
    entry["page_title"] = p.page_title;
    entry["prev_rev_id"] = p.prev_rev_id;
    entry["curr_rev_id"] = p.curr_rev_id;
    j[qid] = std::move(entry);
  }
  return j.dump(2);
}

}  // namespace natpert::testset
