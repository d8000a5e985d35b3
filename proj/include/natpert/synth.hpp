#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "natpert/dataset.hpp"

namespace natpert::synth {

enum class PerturbMethod {
  CharOcr,
  CharInsert,
  CharSubstitute,
  CharSwapMid,
  CharSwapRand,
  WordInsertContextual,    // WInsert(CWE)
  WordSubstituteContextual,  // WSubstitute(CWE)
  WordSplit,
  WordSwap,
  WordDelete,
  WordCrop,
  WordSynonym,             // WSynSub
  WordInsertEmbedding,     // WInsert(WE)
};

constexpr std::size_t kMethodCount = 13;

PerturbMethod method_from_name(std::string_view name);  // Table-12 names, e.g. "WSynSub"
const char* method_name(PerturbMethod m);
bool method_needs_resource(PerturbMethod m);
std::vector<PerturbMethod> all_methods();

enum class PerturbScope { Paragraph, SentenceWise };

// WSplit, WSynSub and WInsert(WE) default to sentence-wise application with
// the modified sentences recombined; the rest run on the whole paragraph.
PerturbScope default_scope(PerturbMethod m);

struct PerturbSpec {
  PerturbMethod method = PerturbMethod::WordSwap;
  double rate = 0.30;
  std::uint64_t seed = 0;
  std::optional<PerturbScope> scope;  // nullopt -> default_scope(method)
};

enum class ResourceKind { Synonym, Embedding, Contextual };

struct SubstitutionResource {
  std::unordered_map<std::string, std::vector<std::string>> entries;  // lowercase token -> candidates
  ResourceKind kind = ResourceKind::Synonym;
};

// JSON-Lines {token, candidates:[...], kind}; duplicate tokens merge with
// de-duplicated candidate lists. MalformedResource on empty/invalid files.
SubstitutionResource load_resource(const std::filesystem::path& path);

using OcrMap = std::unordered_map<char, std::vector<char>>;
const OcrMap& default_ocr_map();
OcrMap load_ocr_map(const std::filesystem::path& path);

struct PerturbStats {
  std::size_t eligible_units = 0;
  std::size_t changed_units = 0;  // always ceil(rate * eligible) per scope
};

std::string perturb(const std::string& text, const PerturbSpec& spec,
                    const SubstitutionResource* resource = nullptr,
                    const OcrMap* ocr = nullptr);

std::string perturb_detailed(const std::string& text, const PerturbSpec& spec,
                             const SubstitutionResource* resource, const OcrMap* ocr,
                             PerturbStats* stats);

// Contexts perturbed with per-context derived seeds; questions untouched;
// items whose gold (or plausible) answers no longer locate are dropped and
// surviving offsets recomputed. Output qids carry a "-syn" suffix.
mrc::MrcDataset perturb_dataset(const mrc::MrcDataset& dataset, const PerturbSpec& spec,
                                const SubstitutionResource* resource = nullptr,
                                const OcrMap* ocr = nullptr);

}  // namespace natpert::synth
