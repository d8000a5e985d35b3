#include "natpert.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "natpert/challenge.hpp"
#include "natpert/dataset.hpp"
#include "natpert/diff.hpp"
#include "natpert/error.hpp"
#include "natpert/harvest.hpp"
#include "natpert/manifest.hpp"
#include "natpert/metrics.hpp"
#include "natpert/synth.hpp"
#include "natpert/testset.hpp"
#include "natpert/version.hpp"
#include "natpert/wikitext.hpp"

using namespace natpert;

namespace {

thread_local std::string g_last_error;

np_status status_from(ErrorCode code) {
  switch (code) {
    case ErrorCode::Io: return NP_ERR_IO;
    case ErrorCode::Parse: return NP_ERR_PARSE;
    case ErrorCode::PageNotFound: return NP_ERR_PAGE_NOT_FOUND;
    case ErrorCode::Network: return NP_ERR_NETWORK;
    case ErrorCode::CacheCorrupt: return NP_ERR_CACHE_CORRUPT;
    case ErrorCode::MalformedDump: return NP_ERR_MALFORMED_DUMP;
    case ErrorCode::InsufficientHistory: return NP_ERR_INSUFFICIENT_HISTORY;
    case ErrorCode::EmptyResult: return NP_ERR_EMPTY_RESULT;
    case ErrorCode::MissingPrediction: return NP_ERR_MISSING_PREDICTION;
    case ErrorCode::DegenerateInput: return NP_ERR_DEGENERATE_INPUT;
    case ErrorCode::MissingResource: return NP_ERR_MISSING_RESOURCE;
    case ErrorCode::EmptyInput: return NP_ERR_EMPTY_INPUT;
    case ErrorCode::MalformedResource: return NP_ERR_MALFORMED_RESOURCE;
    case ErrorCode::DivisionByZero: return NP_ERR_DIVISION_BY_ZERO;
    case ErrorCode::InvalidArgument: return NP_ERR_INVALID_ARGUMENT;
  }
  return NP_ERR_INTERNAL;
}

template <typename Fn>
np_status guarded(Fn&& fn) {
  try {
    fn();
    return NP_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return status_from(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return NP_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return NP_ERR_INTERNAL;
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

np_status require(bool condition, const char* message) {
  if (condition) return NP_OK;
  g_last_error = message;
  return NP_ERR_INVALID_ARGUMENT;
}

synth::PerturbSpec make_spec(const char* method, double rate, uint64_t seed) {
  synth::PerturbSpec spec;
  spec.method = synth::method_from_name(method);
  spec.rate = rate;
  spec.seed = seed;
  return spec;
}

std::vector<challenge::ModelPredictions> load_model_predictions(const char* manifest_path) {
  std::ifstream in(manifest_path, std::ios::binary);
  if (!in) raise(ErrorCode::Io, std::string("cannot open predictions manifest: ") + manifest_path);
  nlohmann::ordered_json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    raise(ErrorCode::Parse, std::string("invalid predictions manifest: ") + e.what());
  }
  if (!j.contains("models") || !j["models"].is_array())
    raise(ErrorCode::Parse, "predictions manifest missing models array");
  std::vector<challenge::ModelPredictions> out;
  const std::filesystem::path base = std::filesystem::path(manifest_path).parent_path();
  auto resolve = [&](const std::string& p) {
    std::filesystem::path fp(p);
    return fp.is_absolute() ? fp : base / fp;
  };
  for (const auto& mj : j["models"]) {
    challenge::ModelPredictions m;
    m.model_name = mj.at("name").get<std::string>();
    m.side_a = metrics::load_predictions(resolve(mj.at("original").get<std::string>())).predictions;
    m.side_b = metrics::load_predictions(resolve(mj.at("perturbed").get<std::string>())).predictions;
    out.push_back(std::move(m));
  }
  if (out.empty()) raise(ErrorCode::Parse, "predictions manifest lists no models");
  return out;
}

// Walk two paragraph-aligned datasets into challenge pair inputs.
std::vector<challenge::PairInput> pair_inputs_from(const mrc::MrcDataset& a,
                                                   const mrc::MrcDataset& b) {
  if (a.articles.size() != b.articles.size())
    raise(ErrorCode::InvalidArgument, "paired datasets have different article counts");
  std::vector<challenge::PairInput> out;
  for (std::size_t ai = 0; ai < a.articles.size(); ++ai) {
    const mrc::Article& aa = a.articles[ai];
    const mrc::Article& ba = b.articles[ai];
    if (aa.paragraphs.size() != ba.paragraphs.size())
      raise(ErrorCode::InvalidArgument, "paired datasets have different paragraph counts");
    for (std::size_t pi = 0; pi < aa.paragraphs.size(); ++pi) {
      const mrc::Paragraph& ap = aa.paragraphs[pi];
      const mrc::Paragraph& bp = ba.paragraphs[pi];
      if (ap.qas.size() != bp.qas.size())
        raise(ErrorCode::InvalidArgument, "paired paragraphs have different question counts");
      challenge::PairInput pair;
      pair.key = aa.title;
      pair.context_a = ap.context;
      pair.context_b = bp.context;
      pair.qas = ap.qas;
      pair.provenance = {aa.title, 0, 0};
      out.push_back(std::move(pair));
    }
  }
  return out;
}

}  // namespace

struct np_config {
  diff::PipelineConfig pipeline;
  harvest::HarvestOptions harvest_opts;
  double f1_threshold = 0.4;
};

struct np_cache {
  harvest::RevisionCache cache;
};

struct np_candidates {
  std::vector<diff::CandidatePair> pairs;
};

struct np_dataset {
  mrc::MrcDataset ds;
};

struct np_predictions {
  metrics::PredictionSet preds;
};

struct np_phrases {
  metrics::UnanswerablePhraseSet set;
};

struct np_report {
  metrics::ScoreReport report;
};

struct np_resource {
  synth::SubstitutionResource res;
};

extern "C" {

const char* np_version(void) { return kVersion; }

const char* np_status_name(np_status s) {
  switch (s) {
    case NP_OK: return "ok";
    case NP_ERR_IO: return "io";
    case NP_ERR_PARSE: return "parse";
    case NP_ERR_PAGE_NOT_FOUND: return "page_not_found";
    case NP_ERR_NETWORK: return "network";
    case NP_ERR_CACHE_CORRUPT: return "cache_corrupt";
    case NP_ERR_MALFORMED_DUMP: return "malformed_dump";
    case NP_ERR_INSUFFICIENT_HISTORY: return "insufficient_history";
    case NP_ERR_EMPTY_RESULT: return "empty_result";
    case NP_ERR_MISSING_PREDICTION: return "missing_prediction";
    case NP_ERR_DEGENERATE_INPUT: return "degenerate_input";
    case NP_ERR_MISSING_RESOURCE: return "missing_resource";
    case NP_ERR_EMPTY_INPUT: return "empty_input";
    case NP_ERR_MALFORMED_RESOURCE: return "malformed_resource";
    case NP_ERR_DIVISION_BY_ZERO: return "division_by_zero";
    case NP_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case NP_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* np_last_error(void) { return g_last_error.c_str(); }

void np_string_free(char* s) { std::free(s); }

np_status np_config_create(np_config** out) {
  if (np_status s = require(out != nullptr, "out is NULL"); s != NP_OK) return s;
  return guarded([&] { *out = new np_config(); });
}

void np_config_destroy(np_config* cfg) { delete cfg; }

np_status np_config_set(np_config* cfg, const char* key, const char* value) {
  if (np_status s = require(cfg && key && value, "cfg/key/value is NULL"); s != NP_OK) return s;
  return guarded([&] {
    const std::string k = key;
    const std::string v = value;
    if (k == "min_paragraph_chars") cfg->pipeline.min_paragraph_chars = std::stoull(v);
    else if (k == "alignment_similarity_threshold") cfg->pipeline.alignment_similarity_threshold = std::stod(v);
    else if (k == "seed") cfg->pipeline.rng_seed = std::stoull(v);
    else if (k == "workers") cfg->pipeline.workers = std::stoull(v);
    else if (k == "f1_threshold") cfg->f1_threshold = std::stod(v);
    else if (k == "api_endpoint") cfg->harvest_opts.api_endpoint = v;
    else if (k == "api_path") cfg->harvest_opts.api_path = v;
    else if (k == "user_agent") cfg->harvest_opts.user_agent = v;
    else if (k == "max_timestamp") cfg->harvest_opts.max_timestamp = v;
    else if (k == "max_retries") cfg->harvest_opts.max_retries = std::stoi(v);
    else raise(ErrorCode::InvalidArgument, "unknown config key: " + k);
  });
}

np_status np_config_to_json(const np_config* cfg, char** out_json) {
  if (np_status s = require(cfg && out_json, "cfg/out is NULL"); s != NP_OK) return s;
  return guarded([&] {
    nlohmann::ordered_json j;
    j["min_paragraph_chars"] = cfg->pipeline.min_paragraph_chars;
    j["alignment_similarity_threshold"] = cfg->pipeline.alignment_similarity_threshold;
    j["seed"] = cfg->pipeline.rng_seed;
    j["workers"] = cfg->pipeline.workers;
    j["f1_threshold"] = cfg->f1_threshold;
    j["api_endpoint"] = cfg->harvest_opts.api_endpoint;
    j["api_path"] = cfg->harvest_opts.api_path;
    j["user_agent"] = cfg->harvest_opts.user_agent;
    j["max_timestamp"] =
        cfg->harvest_opts.max_timestamp ? nlohmann::ordered_json(*cfg->harvest_opts.max_timestamp)
                                        : nlohmann::ordered_json(nullptr);
    j["max_retries"] = cfg->harvest_opts.max_retries;
    *out_json = dup_string(j.dump(2));
  });
}

np_status np_strip_markup(const char* wikitext, char** out_text) {
  if (np_status s = require(wikitext && out_text, "input/out is NULL"); s != NP_OK) return s;
  return guarded([&] { *out_text = dup_string(wikitext::strip_markup(wikitext)); });
}

np_status np_cache_open(const char* root_dir, np_cache** out) {
  if (np_status s = require(root_dir && out, "root/out is NULL"); s != NP_OK) return s;
  return guarded([&] { *out = new np_cache{harvest::RevisionCache(root_dir)}; });
}

void np_cache_close(np_cache* cache) { delete cache; }

np_status np_cache_page_count(const np_cache* cache, size_t* out) {
  if (np_status s = require(cache && out, "cache/out is NULL"); s != NP_OK) return s;
  return guarded([&] { *out = cache->cache.page_titles().size(); });
}

np_status np_cache_page_title(const np_cache* cache, size_t index, char** out_title) {
  if (np_status s = require(cache && out_title, "cache/out is NULL"); s != NP_OK) return s;
  return guarded([&] {
    const std::vector<std::string> titles = cache->cache.page_titles();
    if (index >= titles.size()) raise(ErrorCode::InvalidArgument, "page index out of range");
    *out_title = dup_string(titles[index]);
  });
}

np_status np_harvest_page(np_cache* cache, const char* title, const np_config* cfg,
                          uint64_t* out_revision_count) {
  if (np_status s = require(cache && title && cfg, "cache/title/cfg is NULL"); s != NP_OK) return s;
  return guarded([&] {
    auto transport = harvest::make_http_transport(cfg->harvest_opts.api_endpoint,
                                                  cfg->harvest_opts.user_agent);
    auto revs = harvest::fetch_history({title}, cache->cache, *transport, cfg->harvest_opts);
    if (out_revision_count) *out_revision_count = revs.size();
  });
}

np_status np_ingest_dump(np_cache* cache, const char* dump_path, const char* const* titles,
                         size_t n_titles, uint64_t* out_ingested) {
  if (np_status s = require(cache && dump_path, "cache/dump_path is NULL"); s != NP_OK) return s;
  return guarded([&] {
    std::set<std::string> title_set;
    for (size_t i = 0; i < n_titles; ++i) title_set.insert(titles[i]);
    auto stats = harvest::ingest_dump(dump_path, title_set, cache->cache);
    if (out_ingested) *out_ingested = stats.revisions_ingested;
  });
}

np_status np_mine_pages(np_cache* cache, const char* const* titles, size_t n_titles,
                        const np_config* cfg, np_candidates** out) {
  if (np_status s = require(cache && cfg && out, "cache/cfg/out is NULL"); s != NP_OK) return s;
  return guarded([&] {
    std::vector<harvest::PageRef> pages;
    if (n_titles == 0) {
      for (const std::string& title : cache->cache.page_titles()) pages.push_back({title});
    } else {
      for (size_t i = 0; i < n_titles; ++i) pages.push_back({titles[i]});
    }
    *out = new np_candidates{diff::mine_pages(pages, cache->cache, cfg->pipeline)};
  });
}

np_status np_candidates_load(const char* jsonl_path, np_candidates** out) {
  if (np_status s = require(jsonl_path && out, "path/out is NULL"); s != NP_OK) return s;
  return guarded([&] { *out = new np_candidates{diff::load_candidates(jsonl_path)}; });
}

np_status np_candidates_save(const np_candidates* cands, const char* jsonl_path) {
  if (np_status s = require(cands && jsonl_path, "cands/path is NULL"); s != NP_OK) return s;
  return guarded([&] { diff::save_candidates(cands->pairs, jsonl_path); });
}

np_status np_candidates_count(const np_candidates* cands, size_t* out) {
  if (np_status s = require(cands && out, "cands/out is NULL"); s != NP_OK) return s;
  *out = cands->pairs.size();
  return NP_OK;
}

void np_candidates_destroy(np_candidates* cands) { delete cands; }

np_status np_dataset_load(const char* path, np_dataset** out) {
  if (np_status s = require(path && out, "path/out is NULL"); s != NP_OK) return s;
  return guarded([&] { *out = new np_dataset{mrc::load_dataset(path)}; });
}

np_status np_dataset_save(const np_dataset* ds, const char* path) {
  if (np_status s = require(ds && path, "ds/path is NULL"); s != NP_OK) return s;
  return guarded([&] { mrc::save_dataset(ds->ds, path); });
}

np_status np_dataset_question_count(const np_dataset* ds, size_t* out) {
  if (np_status s = require(ds && out, "ds/out is NULL"); s != NP_OK) return s;
  *out = ds->ds.question_count();
  return NP_OK;
}

np_status np_dataset_context_count(const np_dataset* ds, size_t* out) {
  if (np_status s = require(ds && out, "ds/out is NULL"); s != NP_OK) return s;
  *out = ds->ds.context_count();
  return NP_OK;
}

void np_dataset_destroy(np_dataset* ds) { delete ds; }

np_status np_build_paired(const np_dataset* dataset, const np_candidates* cands,
                          const np_config* cfg, np_dataset** out_original,
                          np_dataset** out_perturbed, char** out_provenance_json) {
  if (np_status s = require(dataset && cands && cfg && out_original && out_perturbed,
                            "dataset/cands/cfg/outs is NULL");
      s != NP_OK)
    return s;
  return guarded([&] {
    testset::PairedTestSet paired =
        testset::build_paired_sets(dataset->ds, cands->pairs, cfg->pipeline);
    *out_original = new np_dataset{std::move(paired.original)};
    *out_perturbed = new np_dataset{std::move(paired.perturbed)};
    if (out_provenance_json)
      *out_provenance_json = dup_string(testset::provenance_to_json(paired.provenance));
  });
}

np_status np_build_augmentation(const np_dataset* train, const np_candidates* cands,
                                const np_config* cfg, np_dataset** out) {
  if (np_status s = require(train && cands && cfg && out, "train/cands/cfg/out is NULL");
      s != NP_OK)
    return s;
  return guarded([&] {
    *out = new np_dataset{testset::build_augmentation(train->ds, cands->pairs, cfg->pipeline)};
  });
}

np_status np_resource_load(const char* jsonl_path, np_resource** out) {
  if (np_status s = require(jsonl_path && out, "path/out is NULL"); s != NP_OK) return s;
  return guarded([&] { *out = new np_resource{synth::load_resource(jsonl_path)}; });
}

void np_resource_destroy(np_resource* res) { delete res; }

np_status np_perturb_text(const char* text, const char* method, double rate, uint64_t seed,
                          const np_resource* resource, const char* ocr_map_path,
                          char** out_text) {
  if (np_status s = require(text && method && out_text, "text/method/out is NULL"); s != NP_OK)
    return s;
  return guarded([&] {
    synth::OcrMap ocr;
    const synth::OcrMap* ocr_ptr = nullptr;
    if (ocr_map_path) {
      ocr = synth::load_ocr_map(ocr_map_path);
      ocr_ptr = &ocr;
    }
    *out_text = dup_string(synth::perturb(text, make_spec(method, rate, seed),
                                          resource ? &resource->res : nullptr, ocr_ptr));
  });
}

np_status np_perturb_dataset(const np_dataset* ds, const char* method, double rate, uint64_t seed,
                             const np_resource* resource, const char* ocr_map_path,
                             np_dataset** out) {
  if (np_status s = require(ds && method && out, "ds/method/out is NULL"); s != NP_OK) return s;
  return guarded([&] {
    synth::OcrMap ocr;
    const synth::OcrMap* ocr_ptr = nullptr;
    if (ocr_map_path) {
      ocr = synth::load_ocr_map(ocr_map_path);
      ocr_ptr = &ocr;
    }
    *out = new np_dataset{synth::perturb_dataset(ds->ds, make_spec(method, rate, seed),
                                                 resource ? &resource->res : nullptr, ocr_ptr)};
  });
}

np_status np_predictions_load(const char* path, np_predictions** out) {
  if (np_status s = require(path && out, "path/out is NULL"); s != NP_OK) return s;
  return guarded([&] { *out = new np_predictions{metrics::load_predictions(path)}; });
}

void np_predictions_destroy(np_predictions* preds) { delete preds; }

np_status np_phrases_default(np_phrases** out) {
  if (np_status s = require(out != nullptr, "out is NULL"); s != NP_OK) return s;
  return guarded([&] { *out = new np_phrases{metrics::UnanswerablePhraseSet::defaults()}; });
}

np_status np_phrases_load(const char* path, np_phrases** out) {
  if (np_status s = require(path && out, "path/out is NULL"); s != NP_OK) return s;
  return guarded([&] { *out = new np_phrases{metrics::UnanswerablePhraseSet::load(path)}; });
}

void np_phrases_destroy(np_phrases* phrases) { delete phrases; }

np_status np_score(const np_dataset* ds, const np_predictions* preds, const char* metric,
                   const np_phrases* phrases, np_report** out) {
  if (np_status s = require(ds && preds && metric && phrases && out,
                            "ds/preds/metric/phrases/out is NULL");
      s != NP_OK)
    return s;
  return guarded([&] {
    *out = new np_report{metrics::score(ds->ds, preds->preds,
                                        metrics::metric_kind_from_name(metric), phrases->set)};
  });
}

np_status np_report_aggregate(const np_report* report, const char* name, double* out) {
  if (np_status s = require(report && name && out, "report/name/out is NULL"); s != NP_OK)
    return s;
  return guarded([&] {
    const std::string n = name;
    const metrics::ScoreReport& r = report->report;
    if (n == "em") *out = r.em;
    else if (n == "f1") *out = r.f1;
    else if (n == "im") *out = r.im;
    else if (n == "headline") *out = r.headline();
    else if (n == "answerable_f1") {
      if (!r.answerable_f1) raise(ErrorCode::DegenerateInput, "no answerable questions");
      *out = *r.answerable_f1;
    } else if (n == "unanswerable_f1") {
      if (!r.unanswerable_f1) raise(ErrorCode::DegenerateInput, "no unanswerable questions");
      *out = *r.unanswerable_f1;
    } else {
      raise(ErrorCode::InvalidArgument, "unknown aggregate: " + n);
    }
  });
}

np_status np_report_to_json(const np_report* report, char** out_json) {
  if (np_status s = require(report && out_json, "report/out is NULL"); s != NP_OK) return s;
  return guarded([&] { *out_json = dup_string(metrics::report_to_json(report->report)); });
}

void np_report_destroy(np_report* report) { delete report; }

np_status np_relative_change(double original, double perturbed, double* out_percent) {
  if (np_status s = require(out_percent != nullptr, "out is NULL"); s != NP_OK) return s;
  return guarded([&] { *out_percent = metrics::relative_change(original, perturbed); });
}

np_status np_build_challenge(const np_dataset* side_original, const np_dataset* side_perturbed,
                             const char* preds_manifest_path, const np_dataset* dev_set,
                             const np_config* cfg, np_dataset** out_original,
                             np_dataset** out_perturbed, char** out_decisions_json) {
  if (np_status s = require(side_original && side_perturbed && preds_manifest_path && dev_set &&
                                cfg && out_original && out_perturbed,
                            "required argument is NULL");
      s != NP_OK)
    return s;
  return guarded([&] {
    const auto pairs = pair_inputs_from(side_original->ds, side_perturbed->ds);
    const auto models = load_model_predictions(preds_manifest_path);
    challenge::RobustnessRule rule{cfg->f1_threshold};
    challenge::ChallengeResult result = challenge::build_challenge_set(
        pairs, models, dev_set->ds, rule, cfg->pipeline.rng_seed);
    *out_original = new np_dataset{std::move(result.set.original)};
    *out_perturbed = new np_dataset{std::move(result.set.perturbed)};
    if (out_decisions_json)
      *out_decisions_json = dup_string(challenge::decisions_to_json(result.decisions));
  });
}

np_status np_analyze(const np_dataset* original, const np_dataset* perturbed,
                     const char* preds_manifest_path, char** out_report_json) {
  if (np_status s = require(original && perturbed && out_report_json,
                            "original/perturbed/out is NULL");
      s != NP_OK)
    return s;
  return guarded([&] {
    const auto pairs = pair_inputs_from(original->ds, perturbed->ds);
    nlohmann::ordered_json report;

    std::vector<challenge::AnalyzedPair> analyzed;
    nlohmann::ordered_json magnitudes = nlohmann::ordered_json::array();
    std::unordered_map<std::string, double> magnitude_by_qid;
    for (const auto& pair : pairs) {
      challenge::AnalyzedPair ap{pair.context_a, pair.context_b, pair.qas};
      const std::uint64_t mag =
          challenge::perturbation_magnitude(pair.context_a, pair.context_b);
      nlohmann::ordered_json mj;
      mj["key"] = pair.key;
      mj["magnitude"] = mag;
      magnitudes.push_back(std::move(mj));
      for (const mrc::QaItem& qa : pair.qas)
        magnitude_by_qid[qa.qid] = static_cast<double>(mag);
      analyzed.push_back(std::move(ap));
    }
    report["magnitudes"] = std::move(magnitudes);
    report["answer_sentence_unmodified_rate"] =
        challenge::answer_sentence_unmodified_rate(analyzed);

    if (preds_manifest_path) {
      const auto models = load_model_predictions(preds_manifest_path);
      std::map<std::string, challenge::CaseLabel> labels;
      for (const auto& pair : pairs) {
        auto pair_labels = challenge::classify_cases(models, pair.qas);
        labels.insert(pair_labels.begin(), pair_labels.end());
      }
      nlohmann::ordered_json cases = nlohmann::ordered_json::object();
      std::vector<double> values;
      std::vector<int> fail_labels;
      std::vector<challenge::AnalyzedPair> c2w_pairs, c2c_pairs;
      for (const auto& pair : pairs) {
        challenge::AnalyzedPair c2w{pair.context_a, pair.context_b, {}};
        challenge::AnalyzedPair c2c{pair.context_a, pair.context_b, {}};
        for (const mrc::QaItem& qa : pair.qas) {
          auto it = labels.find(qa.qid);
          if (it == labels.end()) continue;
          if (it->second == challenge::CaseLabel::C2W) c2w.qas.push_back(qa);
          if (it->second == challenge::CaseLabel::C2C) c2c.qas.push_back(qa);
        }
        if (!c2w.qas.empty()) c2w_pairs.push_back(std::move(c2w));
        if (!c2c.qas.empty()) c2c_pairs.push_back(std::move(c2c));
      }
      for (const auto& [qid, label] : labels) {
        cases[qid] = challenge::case_label_name(label);
        if (label == challenge::CaseLabel::C2W || label == challenge::CaseLabel::C2C) {
          values.push_back(magnitude_by_qid.at(qid));
          fail_labels.push_back(label == challenge::CaseLabel::C2W ? 1 : 0);
        }
      }
      report["cases"] = std::move(cases);
      try {
        report["point_biserial_magnitude_vs_failure"] =
            challenge::point_biserial(values, fail_labels);
      } catch (const Error&) {
        report["point_biserial_magnitude_vs_failure"] = nullptr;  // degenerate split
      }
      report["answer_sentence_unmodified_rate_c2w"] =
          c2w_pairs.empty() ? nlohmann::ordered_json(nullptr)
                            : nlohmann::ordered_json(
                                  challenge::answer_sentence_unmodified_rate(c2w_pairs));
      report["answer_sentence_unmodified_rate_c2c"] =
          c2c_pairs.empty() ? nlohmann::ordered_json(nullptr)
                            : nlohmann::ordered_json(
                                  challenge::answer_sentence_unmodified_rate(c2c_pairs));
    }
    *out_report_json = dup_string(report.dump(2));
  });
}

np_status np_edit_distance(const char* a, const char* b, uint64_t* out) {
  if (np_status s = require(a && b && out, "a/b/out is NULL"); s != NP_OK) return s;
  return guarded([&] { *out = challenge::perturbation_magnitude(a, b); });
}

np_status np_point_biserial(const double* values, const int* labels, size_t n, double* out) {
  if (np_status s = require(values && labels && out, "values/labels/out is NULL"); s != NP_OK)
    return s;
  return guarded([&] {
    std::vector<double> v(values, values + n);
    std::vector<int> l(labels, labels + n);
    *out = challenge::point_biserial(v, l);
  });
}

np_status np_manifest_write(const char* out_path, const char* command, const char* config_json,
                            uint64_t seed, const char* const* input_paths, size_t n_inputs,
                            const char* started_at, const char* finished_at) {
  if (np_status s = require(out_path && command, "out_path/command is NULL"); s != NP_OK)
    return s;
  return guarded([&] {
    std::vector<std::string> inputs;
    for (size_t i = 0; i < n_inputs; ++i) inputs.emplace_back(input_paths[i]);
    manifest::RunManifest m = manifest::make_manifest(
        command, config_json ? config_json : "", seed, inputs,
        started_at ? started_at : "", finished_at ? finished_at : "");
    manifest::write_manifest(m, out_path);
  });
}

np_status np_now_iso8601(char** out) {
  if (np_status s = require(out != nullptr, "out is NULL"); s != NP_OK) return s;
  return guarded([&] { *out = dup_string(harvest::now_iso8601()); });
}

}  // extern "C"
