#include "natpert/synth.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>

#include "json.hpp"
#include "natpert/error.hpp"
#include "natpert/rng.hpp"
#include "natpert/testset.hpp"
#include "natpert/text.hpp"

namespace natpert::synth {

using ordered_json = nlohmann::ordered_json;

namespace {

struct MethodName {
  PerturbMethod method;
  const char* name;
};

constexpr MethodName kMethodNames[] = {
    {PerturbMethod::CharOcr, "CharOCR"},
    {PerturbMethod::CharInsert, "CharInsert"},
    {PerturbMethod::CharSubstitute, "CharSubstitute"},
    {PerturbMethod::CharSwapMid, "CharSwapMid"},
    {PerturbMethod::CharSwapRand, "CharSwapRand"},
    {PerturbMethod::WordInsertContextual, "WInsertCWE"},
    {PerturbMethod::WordSubstituteContextual, "WSubstituteCWE"},
    {PerturbMethod::WordSplit, "WSplit"},
    {PerturbMethod::WordSwap, "WSwap"},
    {PerturbMethod::WordDelete, "WDelete"},
    {PerturbMethod::WordCrop, "WCrop"},
    {PerturbMethod::WordSynonym, "WSynSub"},
    {PerturbMethod::WordInsertEmbedding, "WInsertWE"},
};

}  // namespace

PerturbMethod method_from_name(std::string_view name) {
  for (const MethodName& m : kMethodNames)
    if (name == m.name) return m.method;
  raise(ErrorCode::InvalidArgument, "unknown perturbation method: " + std::string(name));
}

const char* method_name(PerturbMethod m) {
  for (const MethodName& entry : kMethodNames)
    if (entry.method == m) return entry.name;
  return "unknown";
}

bool method_needs_resource(PerturbMethod m) {
  return m == PerturbMethod::WordInsertContextual || m == PerturbMethod::WordSubstituteContextual ||
         m == PerturbMethod::WordSynonym || m == PerturbMethod::WordInsertEmbedding;
}

std::vector<PerturbMethod> all_methods() {
  std::vector<PerturbMethod> out;
  for (const MethodName& m : kMethodNames) out.push_back(m.method);
  return out;
}

PerturbScope default_scope(PerturbMethod m) {
  switch (m) {
    case PerturbMethod::WordSplit:
    case PerturbMethod::WordSynonym:
    case PerturbMethod::WordInsertEmbedding:
      return PerturbScope::SentenceWise;
    default:
      return PerturbScope::Paragraph;
  }
}

SubstitutionResource load_resource(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorCode::Io, "cannot open resource: " + path.string());
  SubstitutionResource res;
  std::string line;
  std::size_t lineno = 0;
  bool kind_set = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    ordered_json j;
    try {
      j = ordered_json::parse(line);
    } catch (const std::exception& e) {
      raise(ErrorCode::MalformedResource,
            "bad resource line " + std::to_string(lineno) + ": " + e.what());
    }
    if (!j.contains("token") || !j.contains("candidates") || !j["candidates"].is_array())
      raise(ErrorCode::MalformedResource,
            "resource line " + std::to_string(lineno) + " missing token/candidates");
    const std::string token = text::to_lower_ascii(j["token"].get<std::string>());
    std::vector<std::string>& bucket = res.entries[token];
    for (const auto& c : j["candidates"]) {
      std::string cand = c.get<std::string>();
      if (std::find(bucket.begin(), bucket.end(), cand) == bucket.end())
        bucket.push_back(std::move(cand));
    }
    if (bucket.empty())
      raise(ErrorCode::MalformedResource,
            "resource token has no candidates: " + token);
    if (!kind_set && j.contains("kind")) {
      const std::string kind = j["kind"].get<std::string>();
      if (kind == "synonym") res.kind = ResourceKind::Synonym;
      else if (kind == "embedding") res.kind = ResourceKind::Embedding;
      else if (kind == "contextual") res.kind = ResourceKind::Contextual;
      else raise(ErrorCode::MalformedResource, "unknown resource kind: " + kind);
      kind_set = true;
    }
  }
  if (res.entries.empty()) raise(ErrorCode::MalformedResource, "resource file is empty");
  return res;
}

const OcrMap& default_ocr_map() {
  static const OcrMap map = [] {
    OcrMap m;
    const std::pair<char, char> pairs[] = {{'o', '0'}, {'l', '1'}, {'e', '3'},
                                           {'a', '@'}, {'s', '5'}, {'i', '1'},
                                           {'b', '6'}, {'g', '9'}, {'z', '2'}};
    for (auto [from, to] : pairs) {
      m[from].push_back(to);
      m[to].push_back(from);
    }
    return m;
  }();
  return map;
}

OcrMap load_ocr_map(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorCode::Io, "cannot open OCR map: " + path.string());
  ordered_json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    raise(ErrorCode::Parse, std::string("invalid OCR map JSON: ") + e.what());
  }
  OcrMap map;
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (it.key().size() != 1) raise(ErrorCode::Parse, "OCR map keys must be single characters");
    for (const auto& v : it.value()) {
      const std::string alt = v.get<std::string>();
      if (alt.size() != 1) raise(ErrorCode::Parse, "OCR map values must be single characters");
      map[it.key()[0]].push_back(alt[0]);
    }
  }
  if (map.empty()) raise(ErrorCode::Parse, "OCR map is empty");
  return map;
}

namespace {

std::size_t ceil_rate(double rate, std::size_t units) {
  if (units == 0 || rate <= 0.0) return 0;
  const double x = rate * static_cast<double>(units);
  const auto k = static_cast<std::size_t>(std::ceil(x - 1e-9));
  return std::min(k, units);
}

bool ascii_byte(char c) { return static_cast<unsigned char>(c) < 0x80; }

struct WordSpan {
  std::size_t begin, end;
};

std::vector<WordSpan> word_spans(const std::string& s) {
  std::vector<WordSpan> spans;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && text::is_ascii_space(s[i])) ++i;
    std::size_t b = i;
    while (i < s.size() && !text::is_ascii_space(s[i])) ++i;
    if (i > b) spans.push_back({b, i});
  }
  return spans;
}

struct TokenParts {
  std::string prefix, core, suffix;
};

TokenParts split_token(const std::string& tok) {
  std::size_t b = 0, e = tok.size();
  while (b < e && std::ispunct(static_cast<unsigned char>(tok[b]))) ++b;
  while (e > b && std::ispunct(static_cast<unsigned char>(tok[e - 1]))) --e;
  return {tok.substr(0, b), tok.substr(b, e - b), tok.substr(e)};
}

char random_lower(rng::Rng& rng) { return static_cast<char>('a' + rng.index(26)); }

char random_lower_except(rng::Rng& rng, char orig) {
  const char lower = static_cast<char>(std::tolower(static_cast<unsigned char>(orig)));
  std::size_t idx = rng.index(25);
  char c = static_cast<char>('a' + idx);
  if (c >= lower && lower >= 'a' && lower <= 'z') c = static_cast<char>(c + 1);
  return c;
}

// Sorted selection of k units out of `eligible`, stable against the sample's
// internal draw order.
std::vector<std::size_t> select_units(rng::Rng& rng, std::size_t eligible, std::size_t k) {
  std::vector<std::size_t> picks = rng.sample(eligible, k);
  std::sort(picks.begin(), picks.end());
  return picks;
}

std::string apply_char_method(const std::string& in, const PerturbSpec& spec,
                              const OcrMap& ocr, rng::Rng& rng, PerturbStats& stats) {
  std::string out = in;
  std::vector<std::size_t> eligible;  // byte positions
  switch (spec.method) {
    case PerturbMethod::CharOcr:
      for (std::size_t i = 0; i < in.size(); ++i)
        if (ocr.count(in[i])) eligible.push_back(i);
      break;
    case PerturbMethod::CharInsert:
      for (std::size_t i = 0; i < in.size(); ++i)
        if (ascii_byte(in[i]) && std::isalnum(static_cast<unsigned char>(in[i])))
          eligible.push_back(i);
      break;
    case PerturbMethod::CharSubstitute:
      for (std::size_t i = 0; i < in.size(); ++i)
        if (ascii_byte(in[i]) && std::isalpha(static_cast<unsigned char>(in[i])))
          eligible.push_back(i);
      break;
    case PerturbMethod::CharSwapMid:
      for (const WordSpan& w : word_spans(in)) {
        if (w.end - w.begin < 4) continue;  // no middle pair to swap
        for (std::size_t p = w.begin + 1; p + 2 < w.end; ++p)
          if (ascii_byte(in[p]) && ascii_byte(in[p + 1]) && in[p] != in[p + 1])
            eligible.push_back(p);
      }
      break;
    case PerturbMethod::CharSwapRand:
      for (const WordSpan& w : word_spans(in)) {
        if (w.end - w.begin < 2) continue;
        for (std::size_t p = w.begin; p < w.end; ++p) {
          if (!ascii_byte(in[p])) continue;
          bool has_partner = false;
          for (std::size_t q = w.begin; q < w.end; ++q)
            if (q != p && ascii_byte(in[q]) && in[q] != in[p]) {
              has_partner = true;
              break;
            }
          if (has_partner) eligible.push_back(p);
        }
      }
      break;
    default:
      raise(ErrorCode::InvalidArgument, "not a character method");
  }
  stats.eligible_units = eligible.size();
  const std::size_t k = ceil_rate(spec.rate, eligible.size());
  const std::vector<std::size_t> picks = select_units(rng, eligible.size(), k);
  stats.changed_units = picks.size();

  if (spec.method == PerturbMethod::CharOcr) {
    for (std::size_t pick : picks) {
      const std::size_t pos = eligible[pick];
      const std::vector<char>& alts = ocr.at(in[pos]);
      out[pos] = alts[rng.index(alts.size())];
    }
  } else if (spec.method == PerturbMethod::CharSubstitute) {
    for (std::size_t pick : picks) {
      const std::size_t pos = eligible[pick];
      out[pos] = random_lower_except(rng, in[pos]);
    }
  } else if (spec.method == PerturbMethod::CharInsert) {
    std::vector<std::pair<std::size_t, char>> inserts;
    for (std::size_t pick : picks)
      inserts.emplace_back(eligible[pick], random_lower(rng));
    // descending so earlier offsets stay valid
    for (auto it = inserts.rbegin(); it != inserts.rend(); ++it)
      out.insert(out.begin() + static_cast<std::ptrdiff_t>(it->first) + 1, it->second);
  } else if (spec.method == PerturbMethod::CharSwapMid) {
    for (std::size_t pick : picks) {
      const std::size_t pos = eligible[pick];
      std::swap(out[pos], out[pos + 1]);
    }
  } else {  // CharSwapRand
    const std::vector<WordSpan> spans = word_spans(in);
    for (std::size_t pick : picks) {
      const std::size_t pos = eligible[pick];
      const WordSpan* word = nullptr;
      for (const WordSpan& w : spans)
        if (pos >= w.begin && pos < w.end) {
          word = &w;
          break;
        }
      std::vector<std::size_t> partners;
      for (std::size_t q = word->begin; q < word->end; ++q)
        if (q != pos && ascii_byte(in[q]) && in[q] != in[pos]) partners.push_back(q);
      if (partners.empty()) continue;  // cannot happen given eligibility
      const std::size_t q = partners[rng.index(partners.size())];
      std::swap(out[pos], out[q]);
    }
  }
  return out;
}

bool has_differing_candidate(const std::vector<std::string>& candidates, const std::string& core) {
  const std::string lc = text::to_lower_ascii(core);
  for (const std::string& c : candidates)
    if (text::to_lower_ascii(c) != lc) return true;
  return false;
}

std::string pick_differing_candidate(rng::Rng& rng, const std::vector<std::string>& candidates,
                                     const std::string& core) {
  const std::string lc = text::to_lower_ascii(core);
  std::vector<const std::string*> differing;
  for (const std::string& c : candidates)
    if (text::to_lower_ascii(c) != lc) differing.push_back(&c);
  return *differing[rng.index(differing.size())];
}

std::string apply_word_method(const std::string& in, const PerturbSpec& spec,
                              const SubstitutionResource* resource, rng::Rng& rng,
                              PerturbStats& stats) {
  std::vector<std::string> tokens = text::split_words(in);
  const std::size_t n = tokens.size();
  std::vector<std::size_t> eligible;  // token indexes
  switch (spec.method) {
    case PerturbMethod::WordInsertContextual:
    case PerturbMethod::WordInsertEmbedding:
      for (std::size_t i = 0; i < n; ++i) {
        const TokenParts parts = split_token(tokens[i]);
        if (!parts.core.empty() && resource->entries.count(text::to_lower_ascii(parts.core)))
          eligible.push_back(i);
      }
      break;
    case PerturbMethod::WordSubstituteContextual:
    case PerturbMethod::WordSynonym:
      for (std::size_t i = 0; i < n; ++i) {
        const TokenParts parts = split_token(tokens[i]);
        if (parts.core.empty()) continue;
        auto it = resource->entries.find(text::to_lower_ascii(parts.core));
        if (it != resource->entries.end() && has_differing_candidate(it->second, parts.core))
          eligible.push_back(i);
      }
      break;
    case PerturbMethod::WordSplit:
      for (std::size_t i = 0; i < n; ++i)
        if (tokens[i].size() >= 2) eligible.push_back(i);
      break;
    case PerturbMethod::WordSwap:
      for (std::size_t i = 0; i + 1 < n; ++i)
        if (tokens[i] != tokens[i + 1]) eligible.push_back(i);
      break;
    case PerturbMethod::WordDelete:
    case PerturbMethod::WordCrop:
      for (std::size_t i = 0; i < n; ++i) eligible.push_back(i);
      break;
    default:
      raise(ErrorCode::InvalidArgument, "not a word method");
  }
  stats.eligible_units = eligible.size();
  const std::size_t k = ceil_rate(spec.rate, eligible.size());

  if (spec.method == PerturbMethod::WordCrop) {
    // one contiguous span of k words
    stats.changed_units = k;
    if (k > 0) {
      const std::size_t start = rng.index(n - k + 1);
      tokens.erase(tokens.begin() + static_cast<std::ptrdiff_t>(start),
                   tokens.begin() + static_cast<std::ptrdiff_t>(start + k));
    }
  } else {
    const std::vector<std::size_t> picks = select_units(rng, eligible.size(), k);
    stats.changed_units = picks.size();
    switch (spec.method) {
      case PerturbMethod::WordInsertContextual:
      case PerturbMethod::WordInsertEmbedding: {
        std::vector<std::pair<std::size_t, std::string>> inserts;
        for (std::size_t pick : picks) {
          const std::size_t i = eligible[pick];
          const TokenParts parts = split_token(tokens[i]);
          const std::vector<std::string>& cands =
              resource->entries.at(text::to_lower_ascii(parts.core));
          inserts.emplace_back(i, cands[rng.index(cands.size())]);
        }
        for (auto it = inserts.rbegin(); it != inserts.rend(); ++it)
          tokens.insert(tokens.begin() + static_cast<std::ptrdiff_t>(it->first) + 1, it->second);
        break;
      }
      case PerturbMethod::WordSubstituteContextual:
      case PerturbMethod::WordSynonym: {
        for (std::size_t pick : picks) {
          const std::size_t i = eligible[pick];
          TokenParts parts = split_token(tokens[i]);
          const std::vector<std::string>& cands =
              resource->entries.at(text::to_lower_ascii(parts.core));
          tokens[i] = parts.prefix + pick_differing_candidate(rng, cands, parts.core) + parts.suffix;
        }
        break;
      }
      case PerturbMethod::WordSplit: {
        std::vector<std::pair<std::size_t, std::size_t>> splits;  // (token, split pos)
        for (std::size_t pick : picks) {
          const std::size_t i = eligible[pick];
          splits.emplace_back(i, 1 + rng.index(tokens[i].size() - 1));
        }
        for (auto it = splits.rbegin(); it != splits.rend(); ++it) {
          const std::string tok = tokens[it->first];
          tokens[it->first] = tok.substr(0, it->second);
          tokens.insert(tokens.begin() + static_cast<std::ptrdiff_t>(it->first) + 1,
                        tok.substr(it->second));
        }
        break;
      }
      case PerturbMethod::WordSwap: {
        for (std::size_t pick : picks) {
          const std::size_t i = eligible[pick];
          std::swap(tokens[i], tokens[i + 1]);
        }
        break;
      }
      case PerturbMethod::WordDelete: {
        std::vector<std::size_t> positions;
        for (std::size_t pick : picks) positions.push_back(eligible[pick]);
        for (auto it = positions.rbegin(); it != positions.rend(); ++it)
          tokens.erase(tokens.begin() + static_cast<std::ptrdiff_t>(*it));
        break;
      }
      default:
        break;
    }
  }

  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

bool is_char_method(PerturbMethod m) {
  return m == PerturbMethod::CharOcr || m == PerturbMethod::CharInsert ||
         m == PerturbMethod::CharSubstitute || m == PerturbMethod::CharSwapMid ||
         m == PerturbMethod::CharSwapRand;
}

std::string apply_unit(const std::string& unit_text, const PerturbSpec& spec,
                       const SubstitutionResource* resource, const OcrMap& ocr,
                       std::uint64_t seed, PerturbStats& stats) {
  rng::Rng rng(seed);
  PerturbStats local;
  std::string out = is_char_method(spec.method)
                        ? apply_char_method(unit_text, spec, ocr, rng, local)
                        : apply_word_method(unit_text, spec, resource, rng, local);
  stats.eligible_units += local.eligible_units;
  stats.changed_units += local.changed_units;
  return out;
}

}  // namespace

std::string perturb_detailed(const std::string& input, const PerturbSpec& spec,
                             const SubstitutionResource* resource, const OcrMap* ocr,
                             PerturbStats* stats_out) {
  if (input.empty()) raise(ErrorCode::EmptyInput, "perturb: empty input text");
  if (method_needs_resource(spec.method) && resource == nullptr)
    raise(ErrorCode::MissingResource,
          std::string("method requires a substitution resource: ") + method_name(spec.method));
  if (spec.rate < 0.0 || spec.rate > 1.0)
    raise(ErrorCode::InvalidArgument, "perturbation rate must be in [0,1]");
  const OcrMap& ocr_map = ocr ? *ocr : default_ocr_map();
  const PerturbScope scope = spec.scope.value_or(default_scope(spec.method));

  PerturbStats stats;
  std::string out;
  if (scope == PerturbScope::Paragraph) {
    out = apply_unit(input, spec, resource, ocr_map, spec.seed, stats);
  } else {
    // per sentence, recombined with the original separators
    const std::vector<text::SentenceSpan> spans = text::sentence_spans(input);
    for (std::size_t i = 0; i < spans.size(); ++i) {
      std::string_view span = std::string_view(input).substr(spans[i].begin,
                                                             spans[i].end - spans[i].begin);
      std::size_t core_end = span.size();
      while (core_end > 0 && text::is_ascii_space(span[core_end - 1])) --core_end;
      std::string core(span.substr(0, core_end));
      std::string tail(span.substr(core_end));
      if (core.empty()) {
        out += span;
        continue;
      }
      out += apply_unit(core, spec, resource, ocr_map,
                        rng::derive_seed(spec.seed, std::to_string(i)), stats);
      out += tail;
    }
  }
  if (stats_out) *stats_out = stats;
  return out;
}

std::string perturb(const std::string& text, const PerturbSpec& spec,
                    const SubstitutionResource* resource, const OcrMap* ocr) {
  return perturb_detailed(text, spec, resource, ocr, nullptr);
}

mrc::MrcDataset perturb_dataset(const mrc::MrcDataset& dataset, const PerturbSpec& spec,
                                const SubstitutionResource* resource, const OcrMap* ocr) {
  if (dataset.schema == mrc::Schema::GenericJsonl)
    raise(ErrorCode::InvalidArgument, "perturb_dataset expects a SQuAD-schema dataset");
  mrc::MrcDataset out;
  out.schema = dataset.schema;
  out.version = dataset.version;
  out.name = dataset.name + "-" + method_name(spec.method);
  for (const mrc::Article& article : dataset.articles) {
    mrc::Article out_article{article.title, {}};
    for (const mrc::Paragraph& par : article.paragraphs) {
      PerturbSpec per_ctx = spec;
      per_ctx.seed = rng::derive_seed(spec.seed, par.context);
      mrc::Paragraph out_par;
      out_par.context = perturb_detailed(par.context, per_ctx, resource, ocr, nullptr);
      out_par.qas = testset::filter_answer_preserving(out_par.context, par.qas);
      for (mrc::QaItem& qa : out_par.qas) qa.qid += "-syn";
      if (!out_par.qas.empty()) out_article.paragraphs.push_back(std::move(out_par));
    }
    if (!out_article.paragraphs.empty()) out.articles.push_back(std::move(out_article));
  }
  if (out.articles.empty())
    raise(ErrorCode::EmptyResult, "no question survived the perturbation");
  return out;
}

}  // namespace natpert::synth
