#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace natpert::mrc {

struct Answer {
  std::string text;
  std::optional<std::int64_t> answer_start;
};

struct QaItem {
  std::string qid;
  std::string question;
  std::vector<Answer> answers;            // empty iff unanswerable
  bool is_impossible = false;
  std::vector<Answer> plausible_answers;  // populated iff unanswerable

  std::vector<std::string> gold_texts() const;  // answers, or plausible for unanswerable
};

struct Paragraph {
  std::string context;
  std::vector<QaItem> qas;
};

struct Article {
  std::string title;
  std::vector<Paragraph> paragraphs;
};

enum class Schema { SquadV1, SquadV2, GenericJsonl };

struct GenericPassage {
  std::string text;
  bool is_supporting = true;
};

// One JSON-Lines record covering BoolQ/DROP/HotpotQA/TyDiQA without
// per-dataset code: {qid, question, passages:[{text,is_supporting}],
// answers:[string], answer_type}.
struct GenericRecord {
  std::string qid;
  std::string question;
  std::vector<GenericPassage> passages;
  std::vector<std::string> answers;
  std::string answer_type;  // "span", "boolean", "number", "free"
};

struct MrcDataset {
  std::string name;
  Schema schema = Schema::SquadV1;
  std::string version;  // SQuAD "version" field, passed through on save
  std::vector<Article> articles;        // SQuAD schemas
  std::vector<GenericRecord> records;   // generic schema

  std::size_t question_count() const;
  std::size_t context_count() const;
  // qid uniqueness plus offset consistency: context[start .. start+len) == text.
  void validate() const;
};

const char* schema_name(Schema s);

MrcDataset load_dataset(const std::filesystem::path& path);
void save_dataset(const MrcDataset& ds, const std::filesystem::path& path);

std::string dataset_to_json(const MrcDataset& ds);       // SQuAD schemas
std::string dataset_to_jsonl(const MrcDataset& ds);      // generic schema
MrcDataset dataset_from_json_text(const std::string& body, const std::string& name);
MrcDataset dataset_from_jsonl_text(const std::string& body, const std::string& name);

}  // namespace natpert::mrc
