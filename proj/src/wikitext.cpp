#include "natpert/wikitext.hpp"

#include <array>
#include <cctype>
#include <cstdint>

#include "natpert/text.hpp"

namespace natpert::wikitext {

namespace {

constexpr std::size_t npos = std::string::npos;

bool starts_with_ci(std::string_view s, std::string_view prefix) {
  if (s.size() < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i)
    if (std::tolower(static_cast<unsigned char>(s[i])) != std::tolower(static_cast<unsigned char>(prefix[i])))
      return false;
  return true;
}

std::string normalize_newlines(std::string_view in) {
  std::string out;
  out.reserve(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) {
    if (in[i] == '\r') {
      out.push_back('\n');
      if (i + 1 < in.size() && in[i + 1] == '\n') ++i;
    } else {
      out.push_back(in[i]);
    }
  }
  return out;
}

// <!-- ... -->; an unclosed opener eats the rest of its line.
std::string remove_comments(const std::string& in) {
  std::string out;
  out.reserve(in.size());
  std::size_t i = 0;
  while (i < in.size()) {
    if (in.compare(i, 4, "<!--") == 0) {
      std::size_t close = in.find("-->", i + 4);
      if (close != npos) {
        i = close + 3;
      } else {
        std::size_t eol = in.find('\n', i);
        i = (eol == npos) ? in.size() : eol;
      }
    } else {
      out.push_back(in[i++]);
    }
  }
  return out;
}

// <ref .../> and <ref ...>...</ref>; unclosed refs eat to end of line.
std::string remove_refs(const std::string& in) {
  std::string out;
  out.reserve(in.size());
  std::size_t i = 0;
  while (i < in.size()) {
    if (in[i] == '<' && starts_with_ci(std::string_view(in).substr(i), "<ref")) {
      std::size_t tag_end = in.find('>', i);
      std::size_t eol = in.find('\n', i);
      if (eol == npos) eol = in.size();
      if (tag_end == npos || tag_end > eol) {
        i = eol;
        continue;
      }
      if (in[tag_end - 1] == '/') {  // self-closing
        i = tag_end + 1;
        continue;
      }
      // find </ref>, case-insensitive
      std::size_t j = tag_end + 1;
      std::size_t close = npos;
      while (j + 6 <= in.size()) {
        if (starts_with_ci(std::string_view(in).substr(j), "</ref")) {
          std::size_t gt = in.find('>', j);
          if (gt != npos) close = gt + 1;
          break;
        }
        ++j;
      }
      if (close == npos) {
        i = eol;
      } else {
        i = close;
      }
    } else {
      out.push_back(in[i++]);
    }
  }
  return out;
}

// {{ ... }} with nesting; may span lines. An unbalanced opener truncates
// removal at the end of its line so one stray brace pair cannot eat the
// whole document.
std::string remove_templates(const std::string& in) {
  std::string out;
  out.reserve(in.size());
  std::size_t i = 0;
  const std::size_t n = in.size();
  while (i < n) {
    if (in[i] == '{' && i + 1 < n && in[i + 1] == '{') {
      std::size_t j = i + 2;
      int depth = 1;
      while (j < n && depth > 0) {
        if (in[j] == '{' && j + 1 < n && in[j + 1] == '{') {
          ++depth;
          j += 2;
        } else if (in[j] == '}' && j + 1 < n && in[j + 1] == '}') {
          --depth;
          j += 2;
        } else {
          ++j;
        }
      }
      if (depth == 0) {
        i = j;
      } else {
        std::size_t eol = in.find('\n', i);
        i = (eol == npos) ? n : eol;
      }
    } else {
      out.push_back(in[i++]);
    }
  }
  return out;
}

// Wikitable blocks are line-oriented: a line starting with {| opens, a line
// starting with |} closes. Unclosed tables drop to end of input.
std::string remove_tables(const std::string& in) {
  std::vector<std::string> lines = text::split_lines(in);
  std::string out;
  out.reserve(in.size());
  bool in_table = false;
  bool first = true;
  for (const std::string& line : lines) {
    std::string t = text::trim(line);
    if (!in_table && t.rfind("{|", 0) == 0) {
      in_table = true;
      continue;
    }
    if (in_table) {
      if (t.rfind("|}", 0) == 0) in_table = false;
      continue;
    }
    if (!first) out.push_back('\n');
    out += line;
    first = false;
  }
  return out;
}

bool is_heading_line(std::string_view trimmed) {
  if (trimmed.size() < 2) return false;
  std::size_t lead = 0;
  while (lead < trimmed.size() && trimmed[lead] == '=') ++lead;
  if (lead == 0 || lead == trimmed.size()) return false;
  std::size_t tail = 0;
  while (tail < trimmed.size() && trimmed[trimmed.size() - 1 - tail] == '=') ++tail;
  return tail > 0;
}

// "== History ==" -> a standalone "History" line with blank lines around it,
// so segmentation sees headings as their own short paragraphs.
std::string isolate_headings(const std::string& in) {
  std::vector<std::string> lines = text::split_lines(in);
  std::string out;
  out.reserve(in.size());
  bool first = true;
  auto emit = [&](std::string_view line) {
    if (!first) out.push_back('\n');
    out += line;
    first = false;
  };
  for (const std::string& line : lines) {
    std::string t = text::trim(line);
    if (is_heading_line(t)) {
      std::size_t b = 0, e = t.size();
      while (b < e && (t[b] == '=' || text::is_ascii_space(t[b]))) ++b;
      while (e > b && (t[e - 1] == '=' || text::is_ascii_space(t[e - 1]))) --e;
      emit("");
      if (e > b) emit(t.substr(b, e - b));
      emit("");
    } else {
      emit(line);
    }
  }
  return out;
}

bool is_dropped_link_target(std::string_view target) {
  std::string t = text::to_lower_ascii(text::trim(target));
  if (!t.empty() && t[0] == ':') t.erase(0, 1);
  return t.rfind("category:", 0) == 0 || t.rfind("file:", 0) == 0 || t.rfind("image:", 0) == 0;
}

bool looks_like_external_url(std::string_view s) {
  return starts_with_ci(s, "http://") || starts_with_ci(s, "https://") ||
         starts_with_ci(s, "ftp://") || starts_with_ci(s, "//");
}

std::string process_links_line(std::string_view line);

// [[target]] / [[target|label]]; category, file and image links vanish
// including any nested caption links. Labelled external links keep the
// label, bare ones vanish. Unclosed constructs drop the rest of the line.
std::string process_links_line(std::string_view line) {
  std::string out;
  out.reserve(line.size());
  std::size_t i = 0;
  const std::size_t n = line.size();
  while (i < n) {
    if (line[i] == '[' && i + 1 < n && line[i + 1] == '[') {
      std::size_t j = i + 2;
      int depth = 1;
      while (j < n && depth > 0) {
        if (line[j] == '[' && j + 1 < n && line[j + 1] == '[') {
          ++depth;
          j += 2;
        } else if (line[j] == ']' && j + 1 < n && line[j + 1] == ']') {
          --depth;
          j += 2;
        } else {
          ++j;
        }
      }
      if (depth != 0) break;  // unclosed: drop to end of line
      std::string_view inner = line.substr(i + 2, j - 2 - (i + 2));
      // first pipe at nesting depth 0 splits target from label
      std::size_t pipe = npos;
      int d = 0;
      for (std::size_t k = 0; k < inner.size(); ++k) {
        if (inner[k] == '[' && k + 1 < inner.size() && inner[k + 1] == '[') {
          ++d;
          ++k;
        } else if (inner[k] == ']' && k + 1 < inner.size() && inner[k + 1] == ']') {
          --d;
          ++k;
        } else if (inner[k] == '|' && d == 0 && pipe == npos) {
          pipe = k;
        }
      }
      std::string_view target = (pipe == npos) ? inner : inner.substr(0, pipe);
      if (!is_dropped_link_target(target)) {
        std::string_view label = (pipe == npos) ? inner : inner.substr(pipe + 1);
        if (text::trim(label).empty()) label = target;
        out += process_links_line(label);
      }
      i = j;
    } else if (line[i] == '[' && looks_like_external_url(line.substr(i + 1))) {
      std::size_t j = line.find(']', i + 1);
      if (j == npos) break;  // unclosed: drop to end of line
      std::string_view inner = line.substr(i + 1, j - (i + 1));
      std::size_t sp = inner.find_first_of(" \t");
      if (sp != npos) {
        std::string label = text::trim(inner.substr(sp + 1));
        out += label;
      }
      i = j + 1;
    } else {
      out.push_back(line[i++]);
    }
  }
  return out;
}

std::string process_links(const std::string& in) {
  std::vector<std::string> lines = text::split_lines(in);
  std::string out;
  out.reserve(in.size());
  bool first = true;
  for (const std::string& line : lines) {
    if (!first) out.push_back('\n');
    out += process_links_line(line);
    first = false;
  }
  return out;
}

// Runs of two or more apostrophes are bold/italic markup.
std::string remove_quote_markup(const std::string& in) {
  std::string out;
  out.reserve(in.size());
  std::size_t i = 0;
  while (i < in.size()) {
    if (in[i] == '\'') {
      std::size_t j = i;
      while (j < in.size() && in[j] == '\'') ++j;
      if (j - i == 1) out.push_back('\'');
      i = j;
    } else {
      out.push_back(in[i++]);
    }
  }
  return out;
}

// Drop simple inline HTML tags, keeping their content.
std::string strip_html_tags(const std::string& in) {
  std::string out;
  out.reserve(in.size());
  std::size_t i = 0;
  const std::size_t n = in.size();
  while (i < n) {
    if (in[i] == '<' && i + 1 < n &&
        (std::isalpha(static_cast<unsigned char>(in[i + 1])) || in[i + 1] == '/')) {
      std::size_t eol = in.find('\n', i);
      if (eol == npos) eol = n;
      std::size_t gt = in.find('>', i);
      if (gt != npos && gt < eol) {
        i = gt + 1;
        continue;
      }
    }
    out.push_back(in[i++]);
  }
  return out;
}

void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp <= 0x7F) {
    out.push_back(static_cast<char>(cp));
  } else if (cp <= 0x7FF) {
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
}

std::string decode_entities(const std::string& in) {
  struct Named {
    std::string_view name;
    std::string_view value;
  };
  static const std::array<Named, 12> kNamed = {{{"amp", "&"},
                                                {"lt", "<"},
                                                {"gt", ">"},
                                                {"quot", "\""},
                                                {"apos", "'"},
                                                {"nbsp", " "},
                                                {"ndash", "–"},
                                                {"mdash", "—"},
                                                {"hellip", "…"},
                                                {"middot", "·"},
                                                {"times", "×"},
                                                {"deg", "°"}}};
  std::string out;
  out.reserve(in.size());
  std::size_t i = 0;
  const std::size_t n = in.size();
  while (i < n) {
    if (in[i] != '&') {
      out.push_back(in[i++]);
      continue;
    }
    std::size_t semi = in.find(';', i + 1);
    if (semi == npos || semi - i > 10) {
      out.push_back(in[i++]);
      continue;
    }
    std::string_view body = std::string_view(in).substr(i + 1, semi - i - 1);
    if (!body.empty() && body[0] == '#') {
      std::uint32_t cp = 0;
      bool ok = body.size() > 1;
      if (body.size() > 2 && (body[1] == 'x' || body[1] == 'X')) {
        for (std::size_t k = 2; k < body.size() && ok; ++k) {
          char c = body[k];
          std::uint32_t d;
          if (c >= '0' && c <= '9') d = c - '0';
          else if (c >= 'a' && c <= 'f') d = 10 + c - 'a';
          else if (c >= 'A' && c <= 'F') d = 10 + c - 'A';
          else { ok = false; break; }
          cp = cp * 16 + d;
        }
      } else {
        for (std::size_t k = 1; k < body.size() && ok; ++k) {
          if (body[k] < '0' || body[k] > '9') { ok = false; break; }
          cp = cp * 10 + (body[k] - '0');
        }
      }
      if (ok && cp > 0 && cp <= 0x10FFFF) {
        append_utf8(out, cp);
        i = semi + 1;
        continue;
      }
    } else {
      bool matched = false;
      for (const Named& e : kNamed) {
        if (body == e.name) {
          out += e.value;
          i = semi + 1;
          matched = true;
          break;
        }
      }
      if (matched) continue;
    }
    out.push_back(in[i++]);
  }
  return out;
}

// Last line of defence for the no-markup-leakage invariant on pathological
// input: erase any residual marker strings.
std::string scrub_residual_markers(const std::string& in) {
  static const std::array<std::string_view, 5> kMarkers = {"[[", "]]", "{{", "}}", "=="};
  std::string s = in;
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::string_view m : kMarkers) {
      std::size_t pos;
      while ((pos = s.find(m)) != npos) {
        s.erase(pos, m.size());
        changed = true;
      }
    }
  }
  return remove_quote_markup(s);
}

// Per line: drop list markers, collapse runs of spaces/tabs, trim edges.
std::string tidy_lines(const std::string& in) {
  std::vector<std::string> lines = text::split_lines(in);
  std::string out;
  out.reserve(in.size());
  bool first = true;
  for (const std::string& line : lines) {
    std::string t = text::trim(line);
    std::size_t b = 0;
    while (b < t.size() && (t[b] == '*' || t[b] == '#' || t[b] == ':' || t[b] == ';')) ++b;
    t = text::trim(std::string_view(t).substr(b));
    std::string compact;
    compact.reserve(t.size());
    bool in_ws = false;
    for (char c : t) {
      if (c == ' ' || c == '\t') {
        in_ws = true;
      } else {
        if (in_ws && !compact.empty()) compact.push_back(' ');
        compact.push_back(c);
        in_ws = false;
      }
    }
    if (!first) out.push_back('\n');
    out += compact;
    first = false;
  }
  return out;
}

std::string strip_once(const std::string& in) {
  std::string s = remove_comments(in);
  s = remove_refs(s);
  s = remove_templates(s);
  s = remove_tables(s);
  s = isolate_headings(s);
  s = process_links(s);
  s = strip_html_tags(s);
  s = remove_quote_markup(s);
  s = decode_entities(s);
  s = scrub_residual_markers(s);
  s = tidy_lines(s);
  return s;
}

}  // namespace

std::string strip_markup(std::string_view wikitext) {
  std::string s = normalize_newlines(wikitext);
  // Entity decoding can resurface markup, so iterate the pass pipeline to a
  // fixpoint; that makes the whole function idempotent by construction.
  for (int iter = 0; iter < 8; ++iter) {
    std::string next = strip_once(s);
    if (next == s) break;
    s = std::move(next);
  }
  return s;
}

std::vector<std::string> segment_paragraphs(std::string_view plain_text) {
  std::vector<std::string> paragraphs;
  std::vector<std::string> lines = text::split_lines(plain_text);
  std::string current;
  auto flush = [&]() {
    std::string p = text::trim(current);
    if (!p.empty()) paragraphs.push_back(std::move(p));
    current.clear();
  };
  for (const std::string& line : lines) {
    std::string t = text::trim(line);
    if (t.empty()) {
      flush();
      continue;
    }
    if (is_heading_line(t)) continue;
    if (!current.empty()) current.push_back(' ');
    current += t;
  }
  flush();
  return paragraphs;
}

CleanDocument clean_revision(const RawRevision& rev) {
  CleanDocument doc;
  doc.page_title = rev.page_title;
  doc.rev_id = rev.rev_id;
  doc.paragraphs = segment_paragraphs(strip_markup(rev.wikitext));
  return doc;
}

}  // namespace natpert::wikitext
