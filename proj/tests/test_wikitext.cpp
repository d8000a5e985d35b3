#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "natpert/rng.hpp"
#include "natpert/text.hpp"
#include "natpert/wikitext.hpp"

using namespace natpert;
using wikitext::segment_paragraphs;
using wikitext::strip_markup;

namespace {

std::string read_fixture(const char* name) {
  std::ifstream in(std::string(NATPERT_FIXTURE_DIR) + "/" + name, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool leaks_markup(const std::string& s) {
  for (const char* m : {"[[", "]]", "{{", "}}", "'''", "=="})
    if (s.find(m) != std::string::npos) return true;
  return false;
}

// random wikitext-ish strings assembled from realistic pieces
std::string random_wikitext(rng::Rng& rng) {
  static const std::vector<std::string> pieces = {
      "plain text ",        "word ",
      "[[Link]]",           "[[Target|label]] ",
      "[[Category:Tag]]",   "[[File:x.jpg|thumb|caption]]",
      "{{cite web|u=x}}",   "{{Infobox\n|a=b\n}}",
      "'''bold'''",         "''italic''",
      "== Heading ==\n",    "=== Sub ===\n",
      "<ref>note</ref>",    "<ref name=\"a\"/>",
      "<!-- hidden -->",    "&amp;",
      "&lt;tag&gt;",        "&#65;",
      "[https://e.com x] ", "[https://e.com] ",
      "\n\n",               "\n",
      "{{unclosed",         "[[unclosed",
      "'''",                "==",
      "{| \n| cell\n|}\n",  "<b>kept</b> ",
  };
  std::string out;
  const std::size_t n = 1 + rng.index(30);
  for (std::size_t i = 0; i < n; ++i) out += pieces[rng.index(pieces.size())];
  return out;
}

}  // namespace

TEST_CASE("strip_markup leaves plain prose untouched") {
  CHECK(strip_markup("plain sentence.") == "plain sentence.");
}

TEST_CASE("strip_markup handles links and quote markup") {
  CHECK(strip_markup("see [[Apollo 11|the mission]] and '''bold'''") ==
        "see the mission and bold");
  CHECK(strip_markup("[[Moon]] rise") == "Moon rise");
  CHECK(strip_markup("[[Category:Things]]text") == "text");
  CHECK(strip_markup("a [[File:x.jpg|thumb|A [[link]] caption]] b") == "a b");
}

TEST_CASE("strip_markup removes templates") {
  CHECK(strip_markup("{{cite web|url=x}}text") == "text");
  CHECK(strip_markup("a {{outer {{inner}} done}} b") == "a b");
  // unclosed template eats to end of line only
  CHECK(strip_markup("keep\n{{broken template\nnext line") == "keep\n\nnext line");
}

TEST_CASE("strip_markup external links") {
  CHECK(strip_markup("see [https://example.com the site] now") == "see the site now");
  CHECK(strip_markup("see [https://example.com] now") == "see now");
}

TEST_CASE("strip_markup headings and entities") {
  CHECK(strip_markup("== History ==\nbody") == "\nHistory\n\nbody");
  CHECK(strip_markup("Tom &amp; Jerry") == "Tom & Jerry");
  CHECK(strip_markup("A&#66;C") == "ABC");
}

TEST_CASE("strip_markup drops refs and comments") {
  CHECK(strip_markup("a<ref>x</ref>b") == "ab");
  CHECK(strip_markup("a<ref name=\"n\"/>b") == "ab");
  CHECK(strip_markup("a<!-- hidden -->b") == "ab");
}

TEST_CASE("segment_paragraphs basics") {
  CHECK(segment_paragraphs("A\n\nB") == std::vector<std::string>{"A", "B"});
  CHECK(segment_paragraphs("A\n\n\n\nB") == std::vector<std::string>{"A", "B"});
  CHECK(segment_paragraphs("").empty());
  CHECK(segment_paragraphs("  \n \n ").empty());
  // multi-line paragraphs join with a space
  CHECK(segment_paragraphs("line one\nline two\n\nnext") ==
        std::vector<std::string>{"line one line two", "next"});
  // defensive: raw heading lines are dropped
  CHECK(segment_paragraphs("== H ==\n\nbody") == std::vector<std::string>{"body"});
}

TEST_CASE("clean_revision on empty and trivial inputs") {
  wikitext::RawRevision rev;
  rev.page_title = "T";
  rev.rev_id = 1;
  rev.wikitext = "";
  CHECK(wikitext::clean_revision(rev).paragraphs.empty());
  rev.wikitext = "Just one paragraph of prose.";
  auto doc = wikitext::clean_revision(rev);
  REQUIRE(doc.paragraphs.size() == 1);
  CHECK(doc.paragraphs[0] == "Just one paragraph of prose.");
}

TEST_CASE("clean_revision matches the hand-cleaned fixture") {
  wikitext::RawRevision rev;
  rev.page_title = "Apollo 11";
  rev.rev_id = 42;
  rev.wikitext = read_fixture("wikitext_revision.txt");
  auto doc = wikitext::clean_revision(rev);
  auto expected = nlohmann::json::parse(read_fixture("wikitext_expected.json"));
  REQUIRE(doc.paragraphs.size() == expected.size());
  for (std::size_t i = 0; i < doc.paragraphs.size(); ++i)
    CHECK(doc.paragraphs[i] == expected[i].get<std::string>());
}

TEST_CASE("strip_markup is idempotent and never leaks markup") {
  rng::Rng rng(20240811);
  for (int i = 0; i < 400; ++i) {
    const std::string input = random_wikitext(rng);
    CAPTURE(input);
    const std::string once = strip_markup(input);
    CHECK(strip_markup(once) == once);
    CHECK_FALSE(leaks_markup(once));
  }
}

TEST_CASE("segmented paragraphs are never empty") {
  rng::Rng rng(7);
  for (int i = 0; i < 200; ++i) {
    const std::string input = random_wikitext(rng);
    for (const std::string& p : segment_paragraphs(strip_markup(input))) {
      CHECK(!text::trim(p).empty());
      CHECK_FALSE(leaks_markup(p));
    }
  }
}
