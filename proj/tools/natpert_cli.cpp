// natpert command-line front end. Talks to the pipeline exclusively through
// the C API in natpert.h; every run writes its outputs plus a run manifest.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "natpert.h"

namespace {

struct OwnedString {
  char* ptr = nullptr;
  ~OwnedString() { np_string_free(ptr); }
  std::string str() const { return ptr ? ptr : ""; }
};

struct Fail {
  np_status status;
  std::string message;
};

void check(np_status status, const std::string& what) {
  if (status == NP_OK) return;
  throw Fail{status, what + ": [" + np_status_name(status) + "] " + np_last_error()};
}

using ConfigPtr = std::unique_ptr<np_config, decltype(&np_config_destroy)>;

ConfigPtr make_config() {
  np_config* cfg = nullptr;
  check(np_config_create(&cfg), "config");
  return ConfigPtr(cfg, &np_config_destroy);
}

void config_set(np_config* cfg, const char* key, const std::string& value) {
  check(np_config_set(cfg, key, value.c_str()), std::string("config ") + key);
}

std::vector<std::string> read_title_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Fail{NP_ERR_IO, "cannot open title list: " + path};
  std::vector<std::string> titles;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (!line.empty()) titles.push_back(line);
  }
  return titles;
}

std::vector<const char*> c_titles(const std::vector<std::string>& titles) {
  std::vector<const char*> out;
  out.reserve(titles.size());
  for (const std::string& t : titles) out.push_back(t.c_str());
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Fail{NP_ERR_IO, "cannot write " + path.string()};
  out << body;
  if (!body.empty() && body.back() != '\n') out << '\n';
}

// One manifest per run: run_manifest.json for directory outputs,
// <stem>.manifest.json next to single-file outputs.
struct ManifestScope {
  std::string command;
  np_config* cfg = nullptr;
  std::uint64_t seed = 0;
  std::vector<std::string> inputs;
  std::filesystem::path out_file;
  std::string started;

  ManifestScope(std::string cmd, np_config* config, std::uint64_t seed_value,
                std::vector<std::string> input_paths, std::filesystem::path manifest_path)
      : command(std::move(cmd)),
        cfg(config),
        seed(seed_value),
        inputs(std::move(input_paths)),
        out_file(std::move(manifest_path)) {
    OwnedString now;
    check(np_now_iso8601(&now.ptr), "clock");
    started = now.str();
  }

  void finish() const {
    OwnedString now, cfg_json;
    check(np_now_iso8601(&now.ptr), "clock");
    if (cfg) check(np_config_to_json(cfg, &cfg_json.ptr), "config snapshot");
    auto input_ptrs = c_titles(inputs);
    check(np_manifest_write(out_file.string().c_str(), command.c_str(),
                            cfg.operator bool() ? cfg_json.ptr : nullptr, seed,
                            input_ptrs.data(), input_ptrs.size(), started.c_str(),
                            now.str().c_str()),
          "manifest");
  }
};

std::filesystem::path sibling_manifest(const std::filesystem::path& out_file) {
  std::filesystem::path p = out_file;
  p += ".manifest.json";
  return p;
}

// ---- subcommand options ----------------------------------------------------

struct CommonOpts {
  std::uint64_t seed = 0;
  std::size_t workers = 1;
};

int run_cli(int argc, char** argv) {
  CLI::App app{"natpert: natural-perturbation test sets for reading comprehension"};
  app.set_version_flag("--version", np_version());
  app.set_config("--config", "", "Configuration file (INI/TOML sections per subcommand)");
  app.require_subcommand(1);

  // ---------------- harvest ----------------
  auto* harvest = app.add_subcommand("harvest", "Fetch full revision histories into the cache");
  std::vector<std::string> titles;
  std::string titles_file, cache_dir, api_endpoint, api_path, user_agent, max_timestamp;
  int max_retries = -1;
  harvest->add_option("--title", titles, "Page title (repeatable)");
  harvest->add_option("--titles", titles_file, "File with one title per line");
  harvest->add_option("--cache", cache_dir, "Cache root directory")
      ->envname("NATPERT_CACHE")
      ->required();
  harvest->add_option("--api", api_endpoint, "API origin, e.g. https://en.wikipedia.org");
  harvest->add_option("--api-path", api_path, "API path (default /w/api.php)");
  harvest->add_option("--user-agent", user_agent, "HTTP User-Agent header");
  harvest->add_option("--max-timestamp", max_timestamp,
                      "Keep only revisions with timestamp <= this ISO-8601 cutoff");
  harvest->add_option("--max-retries", max_retries, "Retry budget per request");

  // ---------------- ingest-dump ----------------
  auto* ingest = app.add_subcommand("ingest-dump",
                                    "Stream a pages-meta-history XML dump into the cache");
  std::string dump_path;
  std::vector<std::string> ingest_titles;
  std::string ingest_titles_file, ingest_cache;
  ingest->add_option("--dump", dump_path, "Dump file (.xml or .xml.gz)")->required();
  ingest->add_option("--title", ingest_titles, "Page title to keep (repeatable)");
  ingest->add_option("--titles", ingest_titles_file, "File with one title per line");
  ingest->add_option("--cache", ingest_cache, "Cache root directory")
      ->envname("NATPERT_CACHE")
      ->required();

  // ---------------- mine ----------------
  auto* mine = app.add_subcommand("mine", "Mine candidate original/perturbed paragraph pairs");
  std::string mine_cache, mine_out;
  std::vector<std::string> mine_titles;
  std::size_t min_chars = 500;
  double threshold = 0.5;
  CommonOpts mine_common;
  mine->add_option("--cache", mine_cache, "Cache root directory")
      ->envname("NATPERT_CACHE")
      ->required();
  mine->add_option("--title", mine_titles, "Restrict to these pages (default: all cached)");
  mine->add_option("--out", mine_out, "Output candidates JSON-Lines file")->required();
  mine->add_option("--min-chars", min_chars, "Minimum paragraph length (strictly exceeded)");
  mine->add_option("--threshold", threshold, "Alignment similarity threshold");
  mine->add_option("--workers", mine_common.workers, "Worker threads across pages");

  // ---------------- build-testset ----------------
  auto* build = app.add_subcommand("build-testset",
                                   "Build paired Original/Perturbed test sets from candidates");
  std::string build_dataset, build_candidates, build_out_dir;
  CommonOpts build_common;
  build->add_option("--dataset", build_dataset, "Source dataset (.json SQuAD or .jsonl generic)")
      ->required();
  build->add_option("--candidates", build_candidates, "Candidates JSON-Lines file")->required();
  build->add_option("--seed", build_common.seed, "Random seed for multi-match selection");
  build->add_option("--out-dir", build_out_dir, "Output directory")->required();

  // ---------------- augment ----------------
  auto* augment = app.add_subcommand("augment",
                                     "Build a perturbed training augmentation set");
  std::string aug_dataset, aug_candidates, aug_out;
  CommonOpts aug_common;
  augment->add_option("--dataset", aug_dataset, "Training dataset (.json)")->required();
  augment->add_option("--candidates", aug_candidates, "Candidates JSON-Lines file")->required();
  augment->add_option("--seed", aug_common.seed, "Random seed");
  augment->add_option("--out", aug_out, "Output dataset file")->required();

  // ---------------- perturb-synth ----------------
  auto* synth = app.add_subcommand("perturb-synth", "Apply a synthetic perturbation method");
  std::string method, synth_in, synth_out, resource_path, ocr_map_path;
  double rate = 0.30;
  CommonOpts synth_common;
  synth->add_option("--method", method,
                    "CharOCR|CharInsert|CharSubstitute|CharSwapMid|CharSwapRand|WInsertCWE|"
                    "WSubstituteCWE|WSplit|WSwap|WDelete|WCrop|WSynSub|WInsertWE")
      ->required();
  synth->add_option("--rate", rate, "Perturbation rate (default 0.30)");
  synth->add_option("--seed", synth_common.seed, "Random seed");
  synth->add_option("--resource", resource_path, "Substitution resource JSON-Lines file");
  synth->add_option("--ocr-map", ocr_map_path, "OCR confusion map JSON (overrides built-in)");
  synth->add_option("--in", synth_in, "Input dataset (.json)")->required();
  synth->add_option("--out", synth_out, "Output dataset file")->required();

  // ---------------- evaluate ----------------
  auto* evaluate = app.add_subcommand("evaluate", "Score a prediction file against a dataset");
  std::string eval_dataset, eval_preds, eval_metric = "f1", eval_phrases, eval_out;
  double baseline = -1.0;
  evaluate->add_option("--dataset", eval_dataset, "Dataset file")->required();
  evaluate->add_option("--predictions", eval_preds, "Prediction JSON {qid: answer}")->required();
  evaluate->add_option("--metric", eval_metric, "f1 or im")
      ->check(CLI::IsMember({"f1", "im"}));
  evaluate->add_option("--phrases", eval_phrases,
                       "Unanswerable phrase JSON (default: built-in indicator set)");
  evaluate->add_option("--out", eval_out, "Report JSON output path")->required();
  evaluate->add_option("--baseline", baseline,
                       "Original-run headline score; prints the relative change");

  // ---------------- challenge ----------------
  auto* challenge = app.add_subcommand(
      "challenge", "Exhaustive orientation search for a challenge test set");
  std::string ch_original, ch_perturbed, ch_preds, ch_dev, ch_out_dir;
  double f1_threshold = 0.4;
  CommonOpts ch_common;
  challenge->add_option("--original", ch_original, "Paired set, original half")->required();
  challenge->add_option("--perturbed", ch_perturbed, "Paired set, perturbed half")->required();
  challenge->add_option("--preds", ch_preds,
                        "Predictions manifest JSON {models:[{name,original,perturbed}]}")
      ->required();
  challenge->add_option("--dev", ch_dev, "Official development set constraining originals")
      ->required();
  challenge->add_option("--seed", ch_common.seed, "Random seed for full ties");
  challenge->add_option("--f1-threshold", f1_threshold,
                        "Perturbed-side F1 bound of the lack-of-robustness rule");
  challenge->add_option("--out-dir", ch_out_dir, "Output directory")->required();

  // ---------------- analyze ----------------
  auto* analyze = app.add_subcommand(
      "analyze", "Case labels, perturbation magnitudes and answer-sentence analysis");
  std::string an_original, an_perturbed, an_preds, an_out;
  analyze->add_option("--original", an_original, "Paired set, original half")->required();
  analyze->add_option("--perturbed", an_perturbed, "Paired set, perturbed half")->required();
  analyze->add_option("--preds", an_preds, "Predictions manifest JSON (optional)");
  analyze->add_option("--out", an_out, "Analysis report JSON output path")->required();

  CLI11_PARSE(app, argc, argv);

  auto cfg = make_config();

  if (*harvest) {
    if (!titles_file.empty())
      for (auto& t : read_title_list(titles_file)) titles.push_back(t);
    if (titles.empty()) throw Fail{NP_ERR_INVALID_ARGUMENT, "no titles given"};
    if (!api_endpoint.empty()) config_set(cfg.get(), "api_endpoint", api_endpoint);
    if (!api_path.empty()) config_set(cfg.get(), "api_path", api_path);
    if (!user_agent.empty()) config_set(cfg.get(), "user_agent", user_agent);
    if (!max_timestamp.empty()) config_set(cfg.get(), "max_timestamp", max_timestamp);
    if (max_retries >= 0) config_set(cfg.get(), "max_retries", std::to_string(max_retries));
    ManifestScope manifest("harvest", cfg.get(), 0, {},
                           std::filesystem::path(cache_dir) / "run_manifest.json");
    np_cache* cache = nullptr;
    check(np_cache_open(cache_dir.c_str(), &cache), "cache");
    std::unique_ptr<np_cache, decltype(&np_cache_close)> cache_guard(cache, &np_cache_close);
    for (const std::string& title : titles) {
      uint64_t revisions = 0;
      check(np_harvest_page(cache, title.c_str(), cfg.get(), &revisions),
            "harvest " + title);
      std::cout << title << ": " << revisions << " revisions\n";
    }
    manifest.finish();
    return 0;
  }

  if (*ingest) {
    if (!ingest_titles_file.empty())
      for (auto& t : read_title_list(ingest_titles_file)) ingest_titles.push_back(t);
    if (ingest_titles.empty()) throw Fail{NP_ERR_INVALID_ARGUMENT, "no titles given"};
    ManifestScope manifest("ingest-dump", cfg.get(), 0, {dump_path},
                           std::filesystem::path(ingest_cache) / "run_manifest.json");
    np_cache* cache = nullptr;
    check(np_cache_open(ingest_cache.c_str(), &cache), "cache");
    std::unique_ptr<np_cache, decltype(&np_cache_close)> cache_guard(cache, &np_cache_close);
    auto title_ptrs = c_titles(ingest_titles);
    uint64_t ingested = 0;
    check(np_ingest_dump(cache, dump_path.c_str(), title_ptrs.data(), title_ptrs.size(),
                         &ingested),
          "ingest-dump");
    std::cout << "ingested " << ingested << " revisions\n";
    manifest.finish();
    return 0;
  }

  if (*mine) {
    config_set(cfg.get(), "min_paragraph_chars", std::to_string(min_chars));
    config_set(cfg.get(), "alignment_similarity_threshold", std::to_string(threshold));
    config_set(cfg.get(), "workers", std::to_string(mine_common.workers));
    ManifestScope manifest("mine", cfg.get(), 0, {}, sibling_manifest(mine_out));
    np_cache* cache = nullptr;
    check(np_cache_open(mine_cache.c_str(), &cache), "cache");
    std::unique_ptr<np_cache, decltype(&np_cache_close)> cache_guard(cache, &np_cache_close);
    auto title_ptrs = c_titles(mine_titles);
    np_candidates* cands = nullptr;
    check(np_mine_pages(cache, title_ptrs.data(), title_ptrs.size(), cfg.get(), &cands), "mine");
    std::unique_ptr<np_candidates, decltype(&np_candidates_destroy)> guard(
        cands, &np_candidates_destroy);
    check(np_candidates_save(cands, mine_out.c_str()), "save candidates");
    size_t count = 0;
    np_candidates_count(cands, &count);
    std::cout << "mined " << count << " candidate pairs\n";
    manifest.finish();
    return 0;
  }

  if (*build) {
    config_set(cfg.get(), "seed", std::to_string(build_common.seed));
    std::filesystem::create_directories(build_out_dir);
    ManifestScope manifest("build-testset", cfg.get(), build_common.seed,
                           {build_dataset, build_candidates},
                           std::filesystem::path(build_out_dir) / "run_manifest.json");
    np_dataset* dataset = nullptr;
    check(np_dataset_load(build_dataset.c_str(), &dataset), "load dataset");
    std::unique_ptr<np_dataset, decltype(&np_dataset_destroy)> ds_guard(dataset,
                                                                        &np_dataset_destroy);
    np_candidates* cands = nullptr;
    check(np_candidates_load(build_candidates.c_str(), &cands), "load candidates");
    std::unique_ptr<np_candidates, decltype(&np_candidates_destroy)> cand_guard(
        cands, &np_candidates_destroy);
    np_dataset* original = nullptr;
    np_dataset* perturbed = nullptr;
    OwnedString provenance;
    check(np_build_paired(dataset, cands, cfg.get(), &original, &perturbed, &provenance.ptr),
          "build-testset");
    std::unique_ptr<np_dataset, decltype(&np_dataset_destroy)> orig_guard(original,
                                                                          &np_dataset_destroy);
    std::unique_ptr<np_dataset, decltype(&np_dataset_destroy)> pert_guard(perturbed,
                                                                          &np_dataset_destroy);
    const std::string ext = std::filesystem::path(build_dataset).extension().string();
    const std::filesystem::path out_dir(build_out_dir);
    check(np_dataset_save(original, (out_dir / ("original" + ext)).string().c_str()),
          "save original");
    check(np_dataset_save(perturbed, (out_dir / ("perturbed" + ext)).string().c_str()),
          "save perturbed");
    write_text(out_dir / "provenance.json", provenance.str());
    size_t questions = 0;
    np_dataset_question_count(perturbed, &questions);
    std::cout << "paired test set with " << questions << " questions\n";
    manifest.finish();
    return 0;
  }

  if (*augment) {
    config_set(cfg.get(), "seed", std::to_string(aug_common.seed));
    ManifestScope manifest("augment", cfg.get(), aug_common.seed, {aug_dataset, aug_candidates},
                           sibling_manifest(aug_out));
    np_dataset* dataset = nullptr;
    check(np_dataset_load(aug_dataset.c_str(), &dataset), "load dataset");
    std::unique_ptr<np_dataset, decltype(&np_dataset_destroy)> ds_guard(dataset,
                                                                        &np_dataset_destroy);
    np_candidates* cands = nullptr;
    check(np_candidates_load(aug_candidates.c_str(), &cands), "load candidates");
    std::unique_ptr<np_candidates, decltype(&np_candidates_destroy)> cand_guard(
        cands, &np_candidates_destroy);
    np_dataset* out = nullptr;
    check(np_build_augmentation(dataset, cands, cfg.get(), &out), "augment");
    std::unique_ptr<np_dataset, decltype(&np_dataset_destroy)> out_guard(out,
                                                                         &np_dataset_destroy);
    check(np_dataset_save(out, aug_out.c_str()), "save augmentation");
    size_t questions = 0;
    np_dataset_question_count(out, &questions);
    std::cout << "augmentation set with " << questions << " questions\n";
    manifest.finish();
    return 0;
  }

  if (*synth) {
    std::vector<std::string> inputs = {synth_in};
    if (!resource_path.empty()) inputs.push_back(resource_path);
    if (!ocr_map_path.empty()) inputs.push_back(ocr_map_path);
    ManifestScope manifest("perturb-synth", cfg.get(), synth_common.seed, inputs,
                           sibling_manifest(synth_out));
    np_dataset* dataset = nullptr;
    check(np_dataset_load(synth_in.c_str(), &dataset), "load dataset");
    std::unique_ptr<np_dataset, decltype(&np_dataset_destroy)> ds_guard(dataset,
                                                                        &np_dataset_destroy);
    np_resource* resource = nullptr;
    if (!resource_path.empty())
      check(np_resource_load(resource_path.c_str(), &resource), "load resource");
    std::unique_ptr<np_resource, decltype(&np_resource_destroy)> res_guard(resource,
                                                                           &np_resource_destroy);
    np_dataset* out = nullptr;
    check(np_perturb_dataset(dataset, method.c_str(), rate, synth_common.seed, resource,
                             ocr_map_path.empty() ? nullptr : ocr_map_path.c_str(), &out),
          "perturb-synth");
    std::unique_ptr<np_dataset, decltype(&np_dataset_destroy)> out_guard(out,
                                                                         &np_dataset_destroy);
    check(np_dataset_save(out, synth_out.c_str()), "save perturbed dataset");
    size_t questions = 0;
    np_dataset_question_count(out, &questions);
    std::cout << method << " kept " << questions << " questions\n";
    manifest.finish();
    return 0;
  }

  if (*evaluate) {
    std::vector<std::string> inputs = {eval_dataset, eval_preds};
    if (!eval_phrases.empty()) inputs.push_back(eval_phrases);
    ManifestScope manifest("evaluate", cfg.get(), 0, inputs, sibling_manifest(eval_out));
    np_dataset* dataset = nullptr;
    check(np_dataset_load(eval_dataset.c_str(), &dataset), "load dataset");
    std::unique_ptr<np_dataset, decltype(&np_dataset_destroy)> ds_guard(dataset,
                                                                        &np_dataset_destroy);
    np_predictions* preds = nullptr;
    check(np_predictions_load(eval_preds.c_str(), &preds), "load predictions");
    std::unique_ptr<np_predictions, decltype(&np_predictions_destroy)> preds_guard(
        preds, &np_predictions_destroy);
    np_phrases* phrases = nullptr;
    check(eval_phrases.empty() ? np_phrases_default(&phrases)
                               : np_phrases_load(eval_phrases.c_str(), &phrases),
          "phrases");
    std::unique_ptr<np_phrases, decltype(&np_phrases_destroy)> phrase_guard(phrases,
                                                                            &np_phrases_destroy);
    np_report* report = nullptr;
    check(np_score(dataset, preds, eval_metric.c_str(), phrases, &report), "score");
    std::unique_ptr<np_report, decltype(&np_report_destroy)> report_guard(report,
                                                                          &np_report_destroy);
    OwnedString json;
    check(np_report_to_json(report, &json.ptr), "report json");
    write_text(eval_out, json.str());
    double headline = 0.0;
    check(np_report_aggregate(report, "headline", &headline), "aggregate");
    std::printf("%s = %.4f\n", eval_metric.c_str(), headline);
    if (baseline > 0.0) {
      double change = 0.0;
      check(np_relative_change(baseline, headline * 100.0, &change), "relative change");
      std::printf("relative_change = %.2f%%\n", change);
    }
    manifest.finish();
    return 0;
  }

  if (*challenge) {
    config_set(cfg.get(), "seed", std::to_string(ch_common.seed));
    config_set(cfg.get(), "f1_threshold", std::to_string(f1_threshold));
    std::filesystem::create_directories(ch_out_dir);
    ManifestScope manifest("challenge", cfg.get(), ch_common.seed,
                           {ch_original, ch_perturbed, ch_preds, ch_dev},
                           std::filesystem::path(ch_out_dir) / "run_manifest.json");
    np_dataset *original = nullptr, *perturbed = nullptr, *dev = nullptr;
    check(np_dataset_load(ch_original.c_str(), &original), "load original");
    std::unique_ptr<np_dataset, decltype(&np_dataset_destroy)> g1(original, &np_dataset_destroy);
    check(np_dataset_load(ch_perturbed.c_str(), &perturbed), "load perturbed");
    std::unique_ptr<np_dataset, decltype(&np_dataset_destroy)> g2(perturbed, &np_dataset_destroy);
    check(np_dataset_load(ch_dev.c_str(), &dev), "load dev set");
    std::unique_ptr<np_dataset, decltype(&np_dataset_destroy)> g3(dev, &np_dataset_destroy);
    np_dataset *out_orig = nullptr, *out_pert = nullptr;
    OwnedString decisions;
    check(np_build_challenge(original, perturbed, ch_preds.c_str(), dev, cfg.get(), &out_orig,
                             &out_pert, &decisions.ptr),
          "challenge");
    std::unique_ptr<np_dataset, decltype(&np_dataset_destroy)> g4(out_orig, &np_dataset_destroy);
    std::unique_ptr<np_dataset, decltype(&np_dataset_destroy)> g5(out_pert, &np_dataset_destroy);
    const std::filesystem::path out_dir(ch_out_dir);
    check(np_dataset_save(out_orig, (out_dir / "challenge_original.json").string().c_str()),
          "save challenge original");
    check(np_dataset_save(out_pert, (out_dir / "challenge_perturbed.json").string().c_str()),
          "save challenge perturbed");
    write_text(out_dir / "decisions.json", decisions.str());
    size_t questions = 0;
    np_dataset_question_count(out_pert, &questions);
    std::cout << "challenge set with " << questions << " questions\n";
    manifest.finish();
    return 0;
  }

  if (*analyze) {
    std::vector<std::string> inputs = {an_original, an_perturbed};
    if (!an_preds.empty()) inputs.push_back(an_preds);
    ManifestScope manifest("analyze", cfg.get(), 0, inputs, sibling_manifest(an_out));
    np_dataset *original = nullptr, *perturbed = nullptr;
    check(np_dataset_load(an_original.c_str(), &original), "load original");
    std::unique_ptr<np_dataset, decltype(&np_dataset_destroy)> g1(original, &np_dataset_destroy);
    check(np_dataset_load(an_perturbed.c_str(), &perturbed), "load perturbed");
    std::unique_ptr<np_dataset, decltype(&np_dataset_destroy)> g2(perturbed, &np_dataset_destroy);
    OwnedString report;
    check(np_analyze(original, perturbed, an_preds.empty() ? nullptr : an_preds.c_str(),
                     &report.ptr),
          "analyze");
    write_text(an_out, report.str());
    std::cout << "analysis written to " << an_out << "\n";
    manifest.finish();
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_cli(argc, argv);
  } catch (const Fail& f) {
    std::cerr << "error: " << f.message << "\n";
    return 1;
  } catch (const CLI::ParseError&) {
    return 2;  // should be handled by CLI11_PARSE; defensive
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
