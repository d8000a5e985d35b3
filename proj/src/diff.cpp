#include "natpert/diff.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <set>
#include <thread>

#include "json.hpp"
#include "natpert/error.hpp"
#include "natpert/text.hpp"

namespace natpert::diff {

using ordered_json = nlohmann::ordered_json;

const char* edit_pattern_name(EditPattern p) {
  switch (p) {
    case EditPattern::Identical: return "Identical";
    case EditPattern::Addition: return "Addition";
    case EditPattern::Deletion: return "Deletion";
    case EditPattern::Modification: return "Modification";
  }
  return "unknown";
}

namespace {

std::size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  const std::size_t n = a.size(), m = b.size();
  if (n == 0 || m == 0) return 0;
  std::vector<std::size_t> prev(m + 1, 0), curr(m + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      if (a[i - 1] == b[j - 1])
        curr[j] = prev[j - 1] + 1;
      else
        curr[j] = std::max(prev[j], curr[j - 1]);
    }
    std::swap(prev, curr);
  }
  return prev[m];
}

}  // namespace

double paragraph_similarity(std::string_view a, std::string_view b) {
  const std::vector<std::string> ta = text::split_words(a);
  const std::vector<std::string> tb = text::split_words(b);
  if (ta.empty() && tb.empty()) return 1.0;
  if (ta.empty() || tb.empty()) return 0.0;
  const std::size_t lcs = lcs_length(ta, tb);
  return 2.0 * static_cast<double>(lcs) / static_cast<double>(ta.size() + tb.size());
}

std::vector<AlignedUnit> align_paragraphs(const wikitext::CleanDocument& prev,
                                          const wikitext::CleanDocument& curr,
                                          const PipelineConfig& cfg) {
  const std::vector<std::string>& ps = prev.paragraphs;
  const std::vector<std::string>& cs = curr.paragraphs;
  std::vector<int> prev_match(ps.size(), -1);  // index into cs, -1 unmatched
  std::vector<int> curr_match(cs.size(), -1);  // index into ps

  // exact matches pair first, in document order
  for (std::size_t ci = 0; ci < cs.size(); ++ci) {
    for (std::size_t pi = 0; pi < ps.size(); ++pi) {
      if (prev_match[pi] == -1 && ps[pi] == cs[ci]) {
        prev_match[pi] = static_cast<int>(ci);
        curr_match[ci] = static_cast<int>(pi);
        break;
      }
    }
  }

  struct Scored {
    double sim;
    std::size_t pi, ci;
  };
  std::vector<Scored> scored;
  for (std::size_t pi = 0; pi < ps.size(); ++pi) {
    if (prev_match[pi] != -1) continue;
    for (std::size_t ci = 0; ci < cs.size(); ++ci) {
      if (curr_match[ci] != -1) continue;
      const double sim = paragraph_similarity(ps[pi], cs[ci]);
      if (sim >= cfg.alignment_similarity_threshold) scored.push_back({sim, pi, ci});
    }
  }
  std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
    if (a.sim != b.sim) return a.sim > b.sim;
    if (a.pi != b.pi) return a.pi < b.pi;
    return a.ci < b.ci;
  });

  std::vector<double> curr_sim(cs.size(), 0.0);
  for (const Scored& s : scored) {
    if (prev_match[s.pi] != -1 || curr_match[s.ci] != -1) continue;
    prev_match[s.pi] = static_cast<int>(s.ci);
    curr_match[s.ci] = static_cast<int>(s.pi);
    curr_sim[s.ci] = s.sim;
  }

  std::vector<AlignedUnit> units;
  units.reserve(ps.size() + cs.size());
  for (std::size_t ci = 0; ci < cs.size(); ++ci) {
    AlignedUnit unit;
    unit.curr_paragraph = cs[ci];
    if (curr_match[ci] == -1) {
      unit.pattern = EditPattern::Addition;
      unit.similarity = 0.0;
    } else {
      const std::string& p = ps[static_cast<std::size_t>(curr_match[ci])];
      unit.prev_paragraph = p;
      if (p == cs[ci]) {
        unit.pattern = EditPattern::Identical;
        unit.similarity = 1.0;
      } else {
        unit.pattern = EditPattern::Modification;
        unit.similarity = curr_sim[ci];
      }
    }
    units.push_back(std::move(unit));
  }
  for (std::size_t pi = 0; pi < ps.size(); ++pi) {
    if (prev_match[pi] != -1) continue;
    AlignedUnit unit;
    unit.prev_paragraph = ps[pi];
    unit.pattern = EditPattern::Deletion;
    unit.similarity = 0.0;
    units.push_back(std::move(unit));
  }
  return units;
}

std::vector<CandidatePair> extract_candidates(const std::vector<AlignedUnit>& units,
                                              const RevisionMeta& meta,
                                              const PipelineConfig& cfg) {
  std::vector<CandidatePair> out;
  for (const AlignedUnit& unit : units) {
    if (unit.pattern != EditPattern::Modification) continue;
    const std::string& original = *unit.prev_paragraph;
    const std::string& perturbed = *unit.curr_paragraph;
    if (text::utf8_length(original) <= cfg.min_paragraph_chars) continue;
    if (text::utf8_length(perturbed) <= cfg.min_paragraph_chars) continue;
    CandidatePair pair;
    pair.page_title = meta.page_title;
    pair.prev_rev_id = meta.prev_rev_id;
    pair.curr_rev_id = meta.curr_rev_id;
    pair.original = original;
    pair.perturbed = perturbed;
    out.push_back(std::move(pair));
  }
  return out;
}

std::vector<CandidatePair> mine_page(const harvest::PageRef& page,
                                     const harvest::RevisionCache& cache,
                                     const PipelineConfig& cfg) {
  auto pairs = harvest::adjacent_pairs(page, cache);
  std::vector<CandidatePair> out;
  std::set<std::pair<std::string, std::string>> seen;
  std::optional<wikitext::CleanDocument> prev_doc;
  for (const auto& [prev_rev, curr_rev] : pairs) {
    wikitext::CleanDocument prev =
        prev_doc ? std::move(*prev_doc) : wikitext::clean_revision(prev_rev);
    wikitext::CleanDocument curr = wikitext::clean_revision(curr_rev);
    RevisionMeta meta{page.title, prev_rev.rev_id, curr_rev.rev_id};
    for (CandidatePair& cand : extract_candidates(align_paragraphs(prev, curr, cfg), meta, cfg)) {
      if (seen.emplace(cand.original, cand.perturbed).second) out.push_back(std::move(cand));
    }
    prev_doc = std::move(curr);  // each curr becomes the next pair's prev
  }
  return out;
}

std::vector<CandidatePair> mine_pages(const std::vector<harvest::PageRef>& pages,
                                      const harvest::RevisionCache& cache,
                                      const PipelineConfig& cfg) {
  const std::size_t workers = std::max<std::size_t>(1, cfg.workers);
  std::vector<std::vector<CandidatePair>> per_page(pages.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= pages.size()) break;
      try {
        per_page[i] = mine_page(pages[i], cache, cfg);
      } catch (const Error& e) {
        if (e.code() == ErrorCode::InsufficientHistory) continue;  // single-revision pages
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (std::size_t w = 0; w < workers; ++w) threads.emplace_back(worker);
    for (std::thread& t : threads) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  std::vector<CandidatePair> out;
  for (std::vector<CandidatePair>& chunk : per_page)
    for (CandidatePair& c : chunk) out.push_back(std::move(c));
  return out;
}

void save_candidates(const std::vector<CandidatePair>& candidates,
                     const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) raise(ErrorCode::Io, "cannot write candidates: " + path.string());
  for (const CandidatePair& c : candidates) {
    ordered_json j;
    j["page_title"] = c.page_title;
    j["prev_rev_id"] = c.prev_rev_id;
    j["curr_rev_id"] = c.curr_rev_id;
    j["original"] = c.original;
    j["perturbed"] = c.perturbed;
    out << j.dump() << '\n';
  }
}

std::vector<CandidatePair> load_candidates(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorCode::Io, "cannot open candidates: " + path.string());
  std::vector<CandidatePair> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      ordered_json j = ordered_json::parse(line);
      CandidatePair c;
      c.page_title = j.at("page_title").get<std::string>();
      c.prev_rev_id = j.at("prev_rev_id").get<std::uint64_t>();
      c.curr_rev_id = j.at("curr_rev_id").get<std::uint64_t>();
      c.original = j.at("original").get<std::string>();
      c.perturbed = j.at("perturbed").get<std::string>();
      out.push_back(std::move(c));
    } catch (const std::exception& e) {
      raise(ErrorCode::Parse,
            "bad candidate line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace natpert::diff
