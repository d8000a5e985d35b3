#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "natpert/dataset.hpp"
#include "natpert/error.hpp"

using namespace natpert;

namespace {
const std::string kFixtures = NATPERT_FIXTURE_DIR;
}

TEST_CASE("load SQuAD v1 fixture") {
  auto ds = mrc::load_dataset(kFixtures + "/squad_mini_v1.json");
  CHECK(ds.schema == mrc::Schema::SquadV1);
  CHECK(ds.articles.size() == 2);
  CHECK(ds.question_count() == 5);
  CHECK(ds.context_count() == 3);
  const auto& qa = ds.articles[0].paragraphs[0].qas[0];
  CHECK(qa.qid == "q1");
  REQUIRE(qa.answers.size() == 1);
  CHECK(qa.answers[0].text == "1961");
}

TEST_CASE("load SQuAD v2 fixture with unanswerables") {
  auto ds = mrc::load_dataset(kFixtures + "/squad_mini_v2.json");
  CHECK(ds.schema == mrc::Schema::SquadV2);
  const auto& qas = ds.articles[0].paragraphs[0].qas;
  REQUIRE(qas.size() == 3);
  CHECK_FALSE(qas[0].is_impossible);
  CHECK(qas[1].is_impossible);
  CHECK(qas[1].answers.empty());
  REQUIRE(qas[1].plausible_answers.size() == 1);
  CHECK(qas[1].plausible_answers[0].text == "Tranquility Base");
  CHECK(qas[1].gold_texts() == std::vector<std::string>{"Tranquility Base"});
}

TEST_CASE("save/load roundtrip preserves structure and bytes") {
  auto ds = mrc::load_dataset(kFixtures + "/squad_mini_v2.json");
  auto tmp = std::filesystem::temp_directory_path() / "np_ds_roundtrip.json";
  mrc::save_dataset(ds, tmp);
  auto again = mrc::load_dataset(tmp);
  CHECK(again.question_count() == ds.question_count());
  CHECK(again.schema == ds.schema);
  // determinism: saving twice gives identical bytes
  auto tmp2 = std::filesystem::temp_directory_path() / "np_ds_roundtrip2.json";
  mrc::save_dataset(again, tmp2);
  std::ifstream a(tmp, std::ios::binary), b(tmp2, std::ios::binary);
  std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
  std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
  CHECK(mrc::dataset_to_json(ds) == sa);
  CHECK(sa == sb);
  std::filesystem::remove(tmp);
  std::filesystem::remove(tmp2);
}

TEST_CASE("generic jsonl schema") {
  auto ds = mrc::load_dataset(kFixtures + "/generic_mini.jsonl");
  CHECK(ds.schema == mrc::Schema::GenericJsonl);
  REQUIRE(ds.records.size() == 2);
  CHECK(ds.records[0].qid == "g1");
  CHECK(ds.records[0].passages.size() == 2);
  CHECK(ds.records[0].passages[0].is_supporting);
  CHECK_FALSE(ds.records[0].passages[1].is_supporting);
  CHECK(ds.records[0].answers == std::vector<std::string>{"Paris"});
}

TEST_CASE("validation rejects bad offsets and duplicate qids") {
  mrc::MrcDataset ds;
  ds.schema = mrc::Schema::SquadV1;
  mrc::QaItem qa;
  qa.qid = "x";
  qa.question = "?";
  qa.answers = {{"zebra", 0}};
  ds.articles = {{"t", {{"no such animal here", {qa}}}}};
  CHECK_THROWS_AS(ds.validate(), Error);

  mrc::MrcDataset dup;
  dup.schema = mrc::Schema::SquadV1;
  mrc::QaItem q1;
  q1.qid = "same";
  q1.question = "?";
  q1.answers = {{"a", std::nullopt}};
  dup.articles = {{"t", {{"a b", {q1, q1}}}}};
  CHECK_THROWS_AS(dup.validate(), Error);
}
