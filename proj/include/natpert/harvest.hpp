#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <utility>
#include <vector>

#include "natpert/wikitext.hpp"

namespace natpert::harvest {

struct PageRef {
  std::string title;
  std::string language_edition = "en";
};

struct HttpResponse {
  int status = 0;  // 0 means transport failure
  std::string body;
};

// Injectable so tests can replay recorded API responses and count requests.
class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  virtual HttpResponse get(const std::string& path_and_query) = 0;
};

// cpp-httplib client for `origin` ("https://en.wikipedia.org" or a plain
// http:// test server). Requests are serialized: one in-flight request per
// host, per MediaWiki etiquette.
std::unique_ptr<HttpTransport> make_http_transport(const std::string& origin,
                                                   const std::string& user_agent);

struct HarvestOptions {
  std::string api_endpoint = "https://en.wikipedia.org";
  std::string api_path = "/w/api.php";
  std::string user_agent = "natpert/0.1 (revision-history research harvester)";
  int max_retries = 4;
  double backoff_initial_seconds = 0.5;
  std::optional<std::string> max_timestamp;  // keep revisions with ts <= cutoff
};

// One JSON-Lines file per page under {root}/pages/, plus {root}/index.json.
// Cached revisions are immutable once written; the index mirrors the files.
class RevisionCache {
 public:
  explicit RevisionCache(std::filesystem::path root);

  bool has_page(const std::string& title) const;
  // Chronological (rev_id, timestamp) order; CacheCorrupt on index mismatch.
  std::vector<wikitext::RawRevision> load_page(const std::string& title) const;
  void store_page(const std::string& title, std::vector<wikitext::RawRevision> revisions,
                  const std::string& harvested_at);
  // Appends revisions whose rev_id is not already cached; returns #new.
  std::uint64_t append_unique(const std::string& title,
                              const std::vector<wikitext::RawRevision>& revisions);
  void flush_index() const;

  std::vector<std::string> page_titles() const;
  const std::filesystem::path& root() const { return root_; }

  static std::string sanitize_title(const std::string& title);

 private:
  std::filesystem::path page_file(const std::string& title) const;
  void save_index_locked() const;

  std::filesystem::path root_;
  std::map<std::string, std::vector<std::uint64_t>> rev_ids_;  // sorted per title
  std::map<std::string, std::string> harvested_at_;
  mutable std::shared_mutex mutex_;
};

// All revisions, oldest first. Serves from cache without touching the
// transport; otherwise follows rvcontinue until exhausted and persists
// before returning.
std::vector<wikitext::RawRevision> fetch_history(const PageRef& page, RevisionCache& cache,
                                                 HttpTransport& transport,
                                                 const HarvestOptions& opts);

struct IngestStats {
  std::uint64_t revisions_ingested = 0;
  // High-water mark of parser-held bytes; stays flat as dumps grow.
  std::size_t peak_buffer_bytes = 0;
};

// Streams a pages-meta-history XML dump (plain or .gz), keeping only pages
// in `titles`. Revisions are flushed to the cache one at a time, so memory
// is bounded by the largest single revision.
IngestStats ingest_dump(const std::filesystem::path& dump_path,
                        const std::set<std::string>& titles, RevisionCache& cache);

// (prev, curr) pairs in chronological order; InsufficientHistory below 2.
std::vector<std::pair<wikitext::RawRevision, wikitext::RawRevision>> adjacent_pairs(
    const PageRef& page, const RevisionCache& cache);

// ISO-8601 UTC now; honors NATPERT_SOURCE_DATE_EPOCH for reproducible runs.
std::string now_iso8601();

}  // namespace natpert::harvest
