#include "natpert/harvest.hpp"

#include <zlib.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "natpert/error.hpp"
#include "natpert/rng.hpp"
#include "natpert/text.hpp"

namespace natpert::harvest {

using ordered_json = nlohmann::ordered_json;

std::string now_iso8601() {
  std::time_t t;
  if (const char* fixed = std::getenv("NATPERT_SOURCE_DATE_EPOCH")) {
    t = static_cast<std::time_t>(std::strtoll(fixed, nullptr, 10));
  } else {
    t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

namespace {

class HttplibTransport : public HttpTransport {
 public:
  HttplibTransport(std::string origin, std::string user_agent)
      : client_(origin.c_str()), user_agent_(std::move(user_agent)) {
    client_.set_connection_timeout(15, 0);
    client_.set_read_timeout(60, 0);
    client_.set_follow_location(true);
  }

  HttpResponse get(const std::string& path_and_query) override {
    std::lock_guard<std::mutex> lock(mutex_);
    httplib::Headers headers = {{"User-Agent", user_agent_}};
    auto res = client_.Get(path_and_query, headers);
    if (!res) return {0, httplib::to_string(res.error())};
    return {res->status, res->body};
  }

 private:
  httplib::Client client_;
  std::string user_agent_;
  std::mutex mutex_;  // one in-flight request per host
};

std::string url_encode(std::string_view s) {
  static const char* hex = "0123456789ABCDEF";
  std::string out;
  out.reserve(s.size());
  for (unsigned char c : s) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out.push_back(static_cast<char>(c));
    } else {
      out.push_back('%');
      out.push_back(hex[c >> 4]);
      out.push_back(hex[c & 0xF]);
    }
  }
  return out;
}

ordered_json revision_to_json(const wikitext::RawRevision& rev) {
  ordered_json j;
  j["page_title"] = rev.page_title;
  j["rev_id"] = rev.rev_id;
  if (rev.parent_id)
    j["parent_id"] = *rev.parent_id;
  else
    j["parent_id"] = nullptr;
  j["timestamp"] = rev.timestamp;
  j["wikitext"] = rev.wikitext;
  return j;
}

wikitext::RawRevision revision_from_json(const ordered_json& j) {
  wikitext::RawRevision rev;
  rev.page_title = j.at("page_title").get<std::string>();
  rev.rev_id = j.at("rev_id").get<std::uint64_t>();
  if (j.contains("parent_id") && !j["parent_id"].is_null())
    rev.parent_id = j["parent_id"].get<std::uint64_t>();
  rev.timestamp = j.at("timestamp").get<std::string>();
  rev.wikitext = j.at("wikitext").get<std::string>();
  return rev;
}

void sort_chronological(std::vector<wikitext::RawRevision>& revs) {
  std::sort(revs.begin(), revs.end(),
            [](const wikitext::RawRevision& a, const wikitext::RawRevision& b) {
              if (a.rev_id != b.rev_id) return a.rev_id < b.rev_id;
              return a.timestamp < b.timestamp;
            });
}

}  // namespace

std::unique_ptr<HttpTransport> make_http_transport(const std::string& origin,
                                                   const std::string& user_agent) {
  return std::make_unique<HttplibTransport>(origin, user_agent);
}

std::string RevisionCache::sanitize_title(const std::string& title) {
  std::string out;
  out.reserve(title.size() + 9);
  for (char c : title) {
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '.')
      out.push_back(c);
    else
      out.push_back('_');
  }
  // short hash suffix keeps distinct titles from colliding after sanitizing
  char suffix[12];
  std::snprintf(suffix, sizeof(suffix), "-%08llx",
                static_cast<unsigned long long>(rng::fnv1a64(title) & 0xFFFFFFFFULL));
  out += suffix;
  return out;
}

RevisionCache::RevisionCache(std::filesystem::path root) : root_(std::move(root)) {
  std::filesystem::create_directories(root_ / "pages");
  const std::filesystem::path index_path = root_ / "index.json";
  if (!std::filesystem::exists(index_path)) return;
  std::ifstream in(index_path, std::ios::binary);
  if (!in) raise(ErrorCode::Io, "cannot open cache index: " + index_path.string());
  ordered_json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    raise(ErrorCode::CacheCorrupt, std::string("unreadable cache index: ") + e.what());
  }
  if (!j.contains("pages") || !j["pages"].is_object())
    raise(ErrorCode::CacheCorrupt, "cache index missing pages object");
  for (auto it = j["pages"].begin(); it != j["pages"].end(); ++it) {
    std::vector<std::uint64_t> ids;
    for (const auto& id : it.value().at("rev_ids")) ids.push_back(id.get<std::uint64_t>());
    std::sort(ids.begin(), ids.end());
    rev_ids_[it.key()] = std::move(ids);
    harvested_at_[it.key()] = it.value().value("harvested_at", "");
  }
}

std::filesystem::path RevisionCache::page_file(const std::string& title) const {
  return root_ / "pages" / (sanitize_title(title) + ".jsonl");
}

void RevisionCache::save_index_locked() const {
  ordered_json pages = ordered_json::object();
  for (const auto& [title, ids] : rev_ids_) {
    ordered_json entry;
    entry["file"] = "pages/" + sanitize_title(title) + ".jsonl";
    entry["rev_ids"] = ids;
    auto it = harvested_at_.find(title);
    entry["harvested_at"] = it == harvested_at_.end() ? "" : it->second;
    pages[title] = std::move(entry);
  }
  ordered_json j;
  j["version"] = 1;
  j["pages"] = std::move(pages);
  const std::filesystem::path index_path = root_ / "index.json";
  std::ofstream out(index_path, std::ios::binary | std::ios::trunc);
  if (!out) raise(ErrorCode::Io, "cannot write cache index: " + index_path.string());
  out << j.dump(2) << '\n';
}

void RevisionCache::flush_index() const {
  std::shared_lock lock(mutex_);
  save_index_locked();
}

bool RevisionCache::has_page(const std::string& title) const {
  std::shared_lock lock(mutex_);
  return rev_ids_.count(title) > 0;
}

std::vector<std::string> RevisionCache::page_titles() const {
  std::shared_lock lock(mutex_);
  std::vector<std::string> out;
  out.reserve(rev_ids_.size());
  for (const auto& [title, ids] : rev_ids_) out.push_back(title);
  return out;
}

std::vector<wikitext::RawRevision> RevisionCache::load_page(const std::string& title) const {
  std::shared_lock lock(mutex_);
  auto it = rev_ids_.find(title);
  if (it == rev_ids_.end()) raise(ErrorCode::PageNotFound, "page not cached: " + title);
  std::ifstream in(page_file(title), std::ios::binary);
  if (!in) raise(ErrorCode::CacheCorrupt, "missing cache file for page: " + title);
  std::vector<wikitext::RawRevision> revs;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      revs.push_back(revision_from_json(ordered_json::parse(line)));
    } catch (const std::exception& e) {
      raise(ErrorCode::CacheCorrupt, "bad cache line for page " + title + ": " + e.what());
    }
  }
  sort_chronological(revs);
  std::vector<std::uint64_t> ids;
  ids.reserve(revs.size());
  for (const auto& r : revs) ids.push_back(r.rev_id);
  if (ids != it->second)
    raise(ErrorCode::CacheCorrupt, "cache index does not match file for page: " + title);
  return revs;
}

void RevisionCache::store_page(const std::string& title,
                               std::vector<wikitext::RawRevision> revisions,
                               const std::string& harvested_at) {
  sort_chronological(revisions);
  std::unique_lock lock(mutex_);
  std::ofstream out(page_file(title), std::ios::binary | std::ios::trunc);
  if (!out) raise(ErrorCode::Io, "cannot write cache file for page: " + title);
  std::vector<std::uint64_t> ids;
  ids.reserve(revisions.size());
  for (const auto& rev : revisions) {
    out << revision_to_json(rev).dump() << '\n';
    ids.push_back(rev.rev_id);
  }
  rev_ids_[title] = std::move(ids);
  harvested_at_[title] = harvested_at;
  save_index_locked();
}

std::uint64_t RevisionCache::append_unique(const std::string& title,
                                           const std::vector<wikitext::RawRevision>& revisions) {
  std::unique_lock lock(mutex_);
  std::vector<std::uint64_t>& ids = rev_ids_[title];
  std::ofstream out(page_file(title), std::ios::binary | std::ios::app);
  if (!out) raise(ErrorCode::Io, "cannot append cache file for page: " + title);
  std::uint64_t added = 0;
  for (const auto& rev : revisions) {
    if (std::binary_search(ids.begin(), ids.end(), rev.rev_id)) continue;
    out << revision_to_json(rev).dump() << '\n';
    ids.insert(std::upper_bound(ids.begin(), ids.end(), rev.rev_id), rev.rev_id);
    ++added;
  }
  return added;
}

std::vector<wikitext::RawRevision> fetch_history(const PageRef& page, RevisionCache& cache,
                                                 HttpTransport& transport,
                                                 const HarvestOptions& opts) {
  if (cache.has_page(page.title)) return cache.load_page(page.title);

  std::vector<wikitext::RawRevision> revs;
  std::string continue_token;
  while (true) {
    std::string path = opts.api_path +
                       "?action=query&prop=revisions&rvslots=main"
                       "&rvprop=ids%7Ctimestamp%7Ccontent&rvlimit=max&rvdir=newer"
                       "&format=json&titles=" +
                       url_encode(page.title);
    if (!continue_token.empty()) path += "&rvcontinue=" + url_encode(continue_token);

    HttpResponse resp;
    for (int attempt = 0;; ++attempt) {
      resp = transport.get(path);
      if (resp.status == 200) break;
      if (attempt >= opts.max_retries)
        raise(ErrorCode::Network, "API request failed after retries (status " +
                                      std::to_string(resp.status) + "): " + resp.body);
      const double delay = opts.backoff_initial_seconds * static_cast<double>(1 << attempt);
      std::this_thread::sleep_for(std::chrono::duration<double>(delay));
    }

    ordered_json j;
    try {
      j = ordered_json::parse(resp.body);
    } catch (const std::exception& e) {
      raise(ErrorCode::Parse, std::string("invalid API response: ") + e.what());
    }
    if (!j.contains("query") || !j["query"].contains("pages"))
      raise(ErrorCode::Parse, "API response missing query.pages");
    for (auto it = j["query"]["pages"].begin(); it != j["query"]["pages"].end(); ++it) {
      const ordered_json& pj = it.value();
      if (pj.contains("missing"))
        raise(ErrorCode::PageNotFound, "page not found: " + page.title);
      if (!pj.contains("revisions")) continue;
      for (const auto& rj : pj["revisions"]) {
        wikitext::RawRevision rev;
        rev.page_title = page.title;
        rev.rev_id = rj.at("revid").get<std::uint64_t>();
        if (rj.contains("parentid") && !rj["parentid"].is_null()) {
          const std::uint64_t pid = rj["parentid"].get<std::uint64_t>();
          if (pid != 0) rev.parent_id = pid;
        }
        rev.timestamp = rj.at("timestamp").get<std::string>();
        if (rj.contains("slots") && rj["slots"].contains("main")) {
          const ordered_json& main = rj["slots"]["main"];
          if (main.contains("*"))
            rev.wikitext = main["*"].get<std::string>();
          else if (main.contains("content"))
            rev.wikitext = main["content"].get<std::string>();
        } else if (rj.contains("*")) {
          rev.wikitext = rj["*"].get<std::string>();
        }
        revs.push_back(std::move(rev));
      }
    }
    if (j.contains("continue") && j["continue"].contains("rvcontinue")) {
      continue_token = j["continue"]["rvcontinue"].get<std::string>();
    } else {
      break;
    }
  }

  if (opts.max_timestamp) {
    std::erase_if(revs, [&](const wikitext::RawRevision& r) {
      return r.timestamp > *opts.max_timestamp;  // ISO-8601 compares lexicographically
    });
  }
  sort_chronological(revs);
  cache.store_page(page.title, revs, now_iso8601());
  cache.flush_index();
  return cache.load_page(page.title);
}

namespace {

class ByteSource {
 public:
  virtual ~ByteSource() = default;
  virtual std::size_t read(char* buf, std::size_t n) = 0;
};

class FileSource : public ByteSource {
 public:
  explicit FileSource(const std::filesystem::path& path) : in_(path, std::ios::binary) {
    if (!in_) raise(ErrorCode::Io, "cannot open dump: " + path.string());
  }
  std::size_t read(char* buf, std::size_t n) override {
    in_.read(buf, static_cast<std::streamsize>(n));
    return static_cast<std::size_t>(in_.gcount());
  }

 private:
  std::ifstream in_;
};

class GzSource : public ByteSource {
 public:
  explicit GzSource(const std::filesystem::path& path) : gz_(gzopen(path.c_str(), "rb")) {
    if (!gz_) raise(ErrorCode::Io, "cannot open gzip dump: " + path.string());
  }
  ~GzSource() override {
    if (gz_) gzclose(gz_);
  }
  std::size_t read(char* buf, std::size_t n) override {
    int got = gzread(gz_, buf, static_cast<unsigned>(n));
    if (got < 0) raise(ErrorCode::Io, "gzip read error");
    return static_cast<std::size_t>(got);
  }

 private:
  gzFile gz_;
};

class CharStream {
 public:
  explicit CharStream(ByteSource& src) : src_(src) {}
  int get() {
    if (pos_ == len_) {
      len_ = src_.read(buf_, sizeof(buf_));
      pos_ = 0;
      if (len_ == 0) return -1;
    }
    return static_cast<unsigned char>(buf_[pos_++]);
  }

 private:
  ByteSource& src_;
  char buf_[1 << 16];
  std::size_t pos_ = 0;
  std::size_t len_ = 0;
};

std::string xml_unescape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] != '&') {
      out.push_back(s[i++]);
      continue;
    }
    std::size_t semi = s.find(';', i + 1);
    if (semi == std::string::npos || semi - i > 10) {
      out.push_back(s[i++]);
      continue;
    }
    std::string_view body = std::string_view(s).substr(i + 1, semi - i - 1);
    if (body == "lt") out.push_back('<');
    else if (body == "gt") out.push_back('>');
    else if (body == "amp") out.push_back('&');
    else if (body == "quot") out.push_back('"');
    else if (body == "apos") out.push_back('\'');
    else if (!body.empty() && body[0] == '#') {
      std::uint32_t cp = 0;
      bool ok = true;
      if (body.size() > 2 && (body[1] == 'x' || body[1] == 'X')) {
        for (std::size_t k = 2; k < body.size(); ++k) {
          char c = body[k];
          if (c >= '0' && c <= '9') cp = cp * 16 + (c - '0');
          else if (c >= 'a' && c <= 'f') cp = cp * 16 + 10 + (c - 'a');
          else if (c >= 'A' && c <= 'F') cp = cp * 16 + 10 + (c - 'A');
          else { ok = false; break; }
        }
      } else {
        for (std::size_t k = 1; k < body.size(); ++k) {
          if (body[k] < '0' || body[k] > '9') { ok = false; break; }
          cp = cp * 10 + (body[k] - '0');
        }
      }
      if (ok && cp > 0 && cp <= 0x10FFFF) {
        if (cp <= 0x7F) out.push_back(static_cast<char>(cp));
        else if (cp <= 0x7FF) {
          out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
          out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        } else if (cp <= 0xFFFF) {
          out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
          out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
          out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        } else {
          out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
          out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
          out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
          out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        }
        i = semi + 1;
        continue;
      }
      out.push_back(s[i++]);
      continue;
    } else {
      out.push_back(s[i++]);
      continue;
    }
    i = semi + 1;
  }
  return out;
}

bool is_gzip(const std::filesystem::path& path) {
  if (path.extension() == ".gz") return true;
  std::ifstream in(path, std::ios::binary);
  unsigned char magic[2] = {0, 0};
  in.read(reinterpret_cast<char*>(magic), 2);
  return in.gcount() == 2 && magic[0] == 0x1f && magic[1] == 0x8b;
}

}  // namespace

IngestStats ingest_dump(const std::filesystem::path& dump_path,
                        const std::set<std::string>& titles, RevisionCache& cache) {
  std::unique_ptr<ByteSource> source;
  if (is_gzip(dump_path))
    source = std::make_unique<GzSource>(dump_path);
  else
    source = std::make_unique<FileSource>(dump_path);
  CharStream chars(*source);

  IngestStats stats;
  std::vector<std::string> stack;
  std::string text_buf;      // content of the element currently being captured
  bool capturing = false;

  // per-page / per-revision state
  std::string page_title;
  bool keep_page = false;
  wikitext::RawRevision rev;
  bool in_revision = false;
  bool in_contributor = false;

  auto path_is = [&](std::initializer_list<const char*> suffix) {
    if (stack.size() < suffix.size()) return false;
    std::size_t i = stack.size() - suffix.size();
    for (const char* name : suffix)
      if (stack[i++] != name) return false;
    return true;
  };

  auto note_peak = [&]() {
    if (text_buf.size() > stats.peak_buffer_bytes) stats.peak_buffer_bytes = text_buf.size();
  };

  auto on_start = [&](const std::string& name) {
    stack.push_back(name);
    text_buf.clear();
    capturing = false;
    if (name == "page") {
      page_title.clear();
      keep_page = false;
    } else if (name == "revision" && path_is({"page", "revision"})) {
      rev = wikitext::RawRevision{};
      in_revision = true;
    } else if (name == "contributor") {
      in_contributor = true;
    } else if (path_is({"page", "title"}) ||
               (in_revision && !in_contributor &&
                (name == "id" || name == "parentid" || name == "timestamp")) ||
               (in_revision && name == "text" && keep_page)) {
      capturing = true;
    }
  };

  auto on_end = [&](const std::string& name) {
    if (stack.empty() || stack.back() != name)
      raise(ErrorCode::MalformedDump, "mismatched closing tag: " + name);
    if (capturing) {
      if (path_is({"page", "title"})) {
        page_title = xml_unescape(text_buf);
        keep_page = titles.count(page_title) > 0;
      } else if (path_is({"page", "revision", "id"})) {
        rev.rev_id = std::strtoull(text_buf.c_str(), nullptr, 10);
      } else if (path_is({"page", "revision", "parentid"})) {
        const std::uint64_t pid = std::strtoull(text_buf.c_str(), nullptr, 10);
        if (pid != 0) rev.parent_id = pid;
      } else if (path_is({"page", "revision", "timestamp"})) {
        rev.timestamp = text_buf;
      } else if (path_is({"page", "revision", "text"})) {
        rev.wikitext = xml_unescape(text_buf);
      }
      capturing = false;
      text_buf.clear();
    }
    if (name == "revision" && in_revision) {
      if (keep_page && rev.rev_id != 0) {
        rev.page_title = page_title;
        stats.revisions_ingested += cache.append_unique(page_title, {rev});
      }
      rev = wikitext::RawRevision{};
      in_revision = false;
    } else if (name == "contributor") {
      in_contributor = false;
    } else if (name == "page") {
      page_title.clear();
      keep_page = false;
    }
    stack.pop_back();
  };

  std::string tag_buf;
  int c;
  while ((c = chars.get()) != -1) {
    if (c == '<') {
      tag_buf.clear();
      bool in_quote = false;
      char quote_char = 0;
      int tc;
      while ((tc = chars.get()) != -1) {
        char ch = static_cast<char>(tc);
        if (in_quote) {
          if (ch == quote_char) in_quote = false;
        } else if (ch == '"' || ch == '\'') {
          in_quote = true;
          quote_char = ch;
        } else if (ch == '>') {
          break;
        }
        tag_buf.push_back(ch);
      }
      if (tc == -1) raise(ErrorCode::MalformedDump, "unterminated tag at end of dump");
      if (tag_buf.empty()) raise(ErrorCode::MalformedDump, "empty tag");
      if (tag_buf[0] == '?' || tag_buf[0] == '!') continue;  // declaration / doctype
      if (tag_buf[0] == '/') {
        on_end(text::trim(tag_buf.substr(1)));
      } else {
        const bool self_closing = tag_buf.back() == '/';
        std::string body = self_closing ? tag_buf.substr(0, tag_buf.size() - 1) : tag_buf;
        std::size_t sp = body.find_first_of(" \t\n\r");
        std::string name = text::trim(sp == std::string::npos ? body : body.substr(0, sp));
        on_start(name);
        if (self_closing) on_end(name);
      }
    } else if (capturing) {
      text_buf.push_back(static_cast<char>(c));
      note_peak();
    }
  }
  if (!stack.empty()) raise(ErrorCode::MalformedDump, "dump ended inside <" + stack.back() + ">");
  cache.flush_index();
  return stats;
}

std::vector<std::pair<wikitext::RawRevision, wikitext::RawRevision>> adjacent_pairs(
    const PageRef& page, const RevisionCache& cache) {
  std::vector<wikitext::RawRevision> revs;
  if (cache.has_page(page.title)) revs = cache.load_page(page.title);
  if (revs.size() < 2)
    raise(ErrorCode::InsufficientHistory,
          "page has fewer than 2 cached revisions: " + page.title);
  std::vector<std::pair<wikitext::RawRevision, wikitext::RawRevision>> pairs;
  pairs.reserve(revs.size() - 1);
  for (std::size_t i = 0; i + 1 < revs.size(); ++i) pairs.emplace_back(revs[i], revs[i + 1]);
  return pairs;
}

}  // namespace natpert::harvest
