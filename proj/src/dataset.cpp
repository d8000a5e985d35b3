#include "natpert/dataset.hpp"

#include <fstream>
#include <sstream>
#include <unordered_set>

#include "json.hpp"
#include "natpert/error.hpp"

namespace natpert::mrc {

using ordered_json = nlohmann::ordered_json;

std::vector<std::string> QaItem::gold_texts() const {
  std::vector<std::string> out;
  const std::vector<Answer>& src = is_impossible ? plausible_answers : answers;
  out.reserve(src.size());
  for (const Answer& a : src) out.push_back(a.text);
  return out;
}

std::size_t MrcDataset::question_count() const {
  if (schema == Schema::GenericJsonl) return records.size();
  std::size_t n = 0;
  for (const Article& a : articles)
    for (const Paragraph& p : a.paragraphs) n += p.qas.size();
  return n;
}

std::size_t MrcDataset::context_count() const {
  if (schema == Schema::GenericJsonl) return records.size();
  std::size_t n = 0;
  for (const Article& a : articles) n += a.paragraphs.size();
  return n;
}

void MrcDataset::validate() const {
  std::unordered_set<std::string> seen;
  auto check_qid = [&](const std::string& qid) {
    if (!seen.insert(qid).second)
      raise(ErrorCode::Parse, "duplicate qid in dataset: " + qid);
  };
  if (schema == Schema::GenericJsonl) {
    for (const GenericRecord& r : records) check_qid(r.qid);
    return;
  }
  for (const Article& a : articles) {
    for (const Paragraph& p : a.paragraphs) {
      for (const QaItem& qa : p.qas) {
        check_qid(qa.qid);
        auto check_offsets = [&](const std::vector<Answer>& answers) {
          for (const Answer& ans : answers) {
            if (!ans.answer_start) continue;
            const std::int64_t start = *ans.answer_start;
            if (start < 0 ||
                static_cast<std::size_t>(start) + ans.text.size() > p.context.size() ||
                p.context.compare(static_cast<std::size_t>(start), ans.text.size(), ans.text) != 0) {
              raise(ErrorCode::Parse, "answer offset mismatch for qid " + qa.qid);
            }
          }
        };
        check_offsets(qa.answers);
        check_offsets(qa.plausible_answers);
        if (!qa.is_impossible && qa.answers.empty())
          raise(ErrorCode::Parse, "answerable question without answers: " + qa.qid);
        if (qa.is_impossible && !qa.answers.empty())
          raise(ErrorCode::Parse, "unanswerable question with gold answers: " + qa.qid);
      }
    }
  }
}

const char* schema_name(Schema s) {
  switch (s) {
    case Schema::SquadV1: return "SQuADv1";
    case Schema::SquadV2: return "SQuADv2";
    case Schema::GenericJsonl: return "GenericJsonl";
  }
  return "unknown";
}

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorCode::Io, "cannot open file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) raise(ErrorCode::Io, "cannot write file: " + path.string());
  out << body;
  if (!out) raise(ErrorCode::Io, "short write: " + path.string());
}

std::vector<Answer> answers_from_json(const ordered_json& arr, const std::string& qid) {
  std::vector<Answer> out;
  if (!arr.is_array()) raise(ErrorCode::Parse, "answers must be an array (qid " + qid + ")");
  for (const auto& a : arr) {
    Answer ans;
    ans.text = a.at("text").get<std::string>();
    if (a.contains("answer_start") && !a["answer_start"].is_null())
      ans.answer_start = a["answer_start"].get<std::int64_t>();
    out.push_back(std::move(ans));
  }
  return out;
}

ordered_json answers_to_json(const std::vector<Answer>& answers) {
  ordered_json arr = ordered_json::array();
  for (const Answer& a : answers) {
    ordered_json obj;
    obj["text"] = a.text;
    if (a.answer_start) obj["answer_start"] = *a.answer_start;
    arr.push_back(std::move(obj));
  }
  return arr;
}

GenericRecord record_from_json(const ordered_json& j) {
  GenericRecord r;
  r.qid = j.at("qid").get<std::string>();
  r.question = j.at("question").get<std::string>();
  for (const auto& p : j.at("passages")) {
    GenericPassage gp;
    gp.text = p.at("text").get<std::string>();
    gp.is_supporting = p.value("is_supporting", true);
    r.passages.push_back(std::move(gp));
  }
  for (const auto& a : j.at("answers")) r.answers.push_back(a.get<std::string>());
  r.answer_type = j.value("answer_type", "span");
  return r;
}

ordered_json record_to_json(const GenericRecord& r) {
  ordered_json j;
  j["qid"] = r.qid;
  j["question"] = r.question;
  ordered_json passages = ordered_json::array();
  for (const GenericPassage& p : r.passages) {
    ordered_json pj;
    pj["text"] = p.text;
    pj["is_supporting"] = p.is_supporting;
    passages.push_back(std::move(pj));
  }
  j["passages"] = std::move(passages);
  j["answers"] = r.answers;
  j["answer_type"] = r.answer_type;
  return j;
}

}  // namespace

MrcDataset dataset_from_json_text(const std::string& body, const std::string& name) {
  ordered_json root;
  try {
    root = ordered_json::parse(body);
  } catch (const std::exception& e) {
    raise(ErrorCode::Parse, std::string("invalid dataset JSON: ") + e.what());
  }
  if (!root.is_object() || !root.contains("data"))
    raise(ErrorCode::Parse, "dataset JSON missing top-level \"data\"");
  MrcDataset ds;
  ds.name = name;
  ds.version = root.value("version", "");
  bool any_impossible_key = false;
  for (const auto& art : root["data"]) {
    Article article;
    article.title = art.value("title", "");
    for (const auto& par : art.at("paragraphs")) {
      Paragraph paragraph;
      paragraph.context = par.at("context").get<std::string>();
      for (const auto& qa : par.at("qas")) {
        QaItem item;
        item.qid = qa.at("id").get<std::string>();
        item.question = qa.at("question").get<std::string>();
        item.answers = answers_from_json(qa.at("answers"), item.qid);
        if (qa.contains("is_impossible")) {
          any_impossible_key = true;
          item.is_impossible = qa["is_impossible"].get<bool>();
        }
        if (qa.contains("plausible_answers"))
          item.plausible_answers = answers_from_json(qa["plausible_answers"], item.qid);
        paragraph.qas.push_back(std::move(item));
      }
      article.paragraphs.push_back(std::move(paragraph));
    }
    ds.articles.push_back(std::move(article));
  }
  ds.schema = any_impossible_key ? Schema::SquadV2 : Schema::SquadV1;
  if (ds.version.empty()) ds.version = (ds.schema == Schema::SquadV2) ? "v2.0" : "1.1";
  ds.validate();
  return ds;
}

MrcDataset dataset_from_jsonl_text(const std::string& body, const std::string& name) {
  MrcDataset ds;
  ds.name = name;
  ds.schema = Schema::GenericJsonl;
  std::istringstream in(body);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      ds.records.push_back(record_from_json(ordered_json::parse(line)));
    } catch (const Error&) {
      throw;
    } catch (const std::exception& e) {
      raise(ErrorCode::Parse,
            "invalid record on line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  ds.validate();
  return ds;
}

MrcDataset load_dataset(const std::filesystem::path& path) {
  const std::string body = read_file(path);
  const std::string name = path.stem().string();
  if (path.extension() == ".jsonl") return dataset_from_jsonl_text(body, name);
  return dataset_from_json_text(body, name);
}

std::string dataset_to_json(const MrcDataset& ds) {
  ordered_json root;
  root["version"] = ds.version;
  ordered_json data = ordered_json::array();
  for (const Article& art : ds.articles) {
    ordered_json aj;
    aj["title"] = art.title;
    ordered_json paragraphs = ordered_json::array();
    for (const Paragraph& par : art.paragraphs) {
      ordered_json pj;
      pj["context"] = par.context;
      ordered_json qas = ordered_json::array();
      for (const QaItem& qa : par.qas) {
        ordered_json qj;
        qj["question"] = qa.question;
        qj["id"] = qa.qid;
        qj["answers"] = answers_to_json(qa.answers);
        if (ds.schema == Schema::SquadV2) {
          qj["is_impossible"] = qa.is_impossible;
          if (qa.is_impossible) qj["plausible_answers"] = answers_to_json(qa.plausible_answers);
        }
        qas.push_back(std::move(qj));
      }
      pj["qas"] = std::move(qas);
      paragraphs.push_back(std::move(pj));
    }
    aj["paragraphs"] = std::move(paragraphs);
    data.push_back(std::move(aj));
  }
  root["data"] = std::move(data);
  return root.dump();
}

std::string dataset_to_jsonl(const MrcDataset& ds) {
  std::string out;
  for (const GenericRecord& r : ds.records) {
    out += record_to_json(r).dump();
    out.push_back('\n');
  }
  return out;
}

void save_dataset(const MrcDataset& ds, const std::filesystem::path& path) {
  if (ds.schema == Schema::GenericJsonl)
    write_file(path, dataset_to_jsonl(ds));
  else
    write_file(path, dataset_to_json(ds));
}

}  // namespace natpert::mrc
