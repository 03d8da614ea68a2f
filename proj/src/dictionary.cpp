#include "autoner/dictionary.hpp"

#include "autoner/error.hpp"
#include "autoner/token_trie.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>

namespace autoner {
namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto tab = line.find('\t', pos);
    out.push_back(line.substr(pos, tab == std::string_view::npos ? std::string_view::npos : tab - pos));
    if (tab == std::string_view::npos) break;
    pos = tab + 1;
  }
  return out;
}

std::string_view strip(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.remove_suffix(1);
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  return s;
}

bool is_reserved(const std::string& type) {
  const auto folded = case_fold(type);
  return folded == case_fold(kNoneTypeName) || folded == case_fold(kUnknownTypeName);
}

Error malformed(std::size_t line_no, const std::string& why) {
  return Error(ErrorKind::MalformedLine, "line " + std::to_string(line_no) + ": " + why, line_no);
}

}  // namespace

void Dictionary::add_entry(DictEntry entry) {
  auto it = std::lower_bound(types.begin(), types.end(), entry.type);
  if (it == types.end() || *it != entry.type) types.insert(it, entry.type);
  entries.push_back(std::move(entry));
}

TypeId Dictionary::type_id(const std::string& name) const {
  auto it = std::lower_bound(types.begin(), types.end(), name);
  if (it == types.end() || *it != name) return kUnknownType;
  return static_cast<TypeId>(it - types.begin());
}

TokenSeq normalize_surface(std::string_view surface) {
  const auto sentence = tokenize(surface);
  return sentence.normalized();
}

std::string join_tokens(const TokenSeq& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += tokens[i];
  }
  return out;
}

Dictionary parse_dictionary(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open dictionary file " + path.string());
  Dictionary dict;
  std::map<std::pair<std::string, TokenSeq>, std::size_t> by_canonical;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (strip(line).empty()) continue;
    const auto fields = split_tabs(line);
    if (fields.size() < 2) throw malformed(line_no, "expected TYPE<TAB>surface");
    const std::string type(strip(fields[0]));
    if (type.empty() || type.find(' ') != std::string::npos) throw malformed(line_no, "bad type name");
    if (is_reserved(type)) throw malformed(line_no, "type name '" + type + "' is reserved");

    std::vector<TokenSeq> surfaces;
    for (std::size_t f = 1; f < fields.size(); ++f) {
      const auto text = strip(fields[f]);
      if (text.empty()) {
        if (f == 1) throw malformed(line_no, "empty canonical surface");
        continue;
      }
      try {
        surfaces.push_back(normalize_surface(text));
      } catch (const Error&) {
        throw malformed(line_no, "surface has no tokens");
      }
    }

    const auto key = std::make_pair(type, surfaces.front());
    auto found = by_canonical.find(key);
    if (found == by_canonical.end()) {
      by_canonical.emplace(key, dict.entries.size());
      dict.add_entry(DictEntry{type, surfaces.front(), {}});
      found = by_canonical.find(key);
    }
    auto& entry = dict.entries[found->second];
    for (std::size_t s = 1; s < surfaces.size(); ++s) {
      const auto& syn = surfaces[s];
      if (syn == entry.canonical) continue;
      if (std::find(entry.synonyms.begin(), entry.synonyms.end(), syn) != entry.synonyms.end()) continue;
      entry.synonyms.push_back(syn);
    }
  }
  return dict;
}

void write_dictionary(const Dictionary& dict, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot write dictionary file " + path.string());
  for (const auto& e : dict.entries) {
    out << e.type << '\t' << join_tokens(e.canonical);
    for (const auto& s : e.synonyms) out << '\t' << join_tokens(s);
    out << '\n';
  }
}

std::vector<ScoredPhrase> parse_phrases(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open phrase file " + path.string());
  std::vector<ScoredPhrase> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (strip(line).empty()) continue;
    const auto fields = split_tabs(line);
    if (fields.size() != 2) throw malformed(line_no, "expected score<TAB>phrase");
    const std::string score_text(strip(fields[0]));
    char* end = nullptr;
    const double score = std::strtod(score_text.c_str(), &end);
    if (score_text.empty() || end != score_text.c_str() + score_text.size() || !(score >= 0.0 && score <= 1.0)) {
      throw malformed(line_no, "score must be a decimal in [0,1]");
    }
    const auto text = strip(fields[1]);
    if (text.empty()) throw malformed(line_no, "empty phrase");
    out.push_back(ScoredPhrase{normalize_surface(text), score});
  }
  return out;
}

Dictionary tailor(const Dictionary& dict, const Corpus& corpus) {
  TokenTrie<char> canonicals;
  for (const auto& e : dict.entries) canonicals.insert(e.canonical);
  std::set<TokenSeq> seen;
  for (const auto& sentence : corpus.sentences) {
    const auto tokens = sentence.normalized();
    for (std::size_t start = 0; start < tokens.size(); ++start) {
      canonicals.for_each_prefix_match(tokens, start, [&](std::size_t end, char) {
        seen.emplace(tokens.begin() + start, tokens.begin() + end);
      });
    }
  }
  Dictionary out;
  out.types = dict.types;
  out.unknown_phrases = dict.unknown_phrases;
  for (const auto& e : dict.entries) {
    if (seen.count(e.canonical)) out.entries.push_back(e);
  }
  return out;
}

Dictionary merge_phrases(const Dictionary& dict, const std::vector<ScoredPhrase>& phrases, double multi_threshold,
                         double single_threshold) {
  std::set<TokenSeq> typed;
  for (const auto& e : dict.entries) {
    typed.insert(e.canonical);
    typed.insert(e.synonyms.begin(), e.synonyms.end());
  }
  std::set<TokenSeq> present(dict.unknown_phrases.begin(), dict.unknown_phrases.end());
  Dictionary out = dict;
  for (const auto& p : phrases) {
    if (p.phrase.empty()) continue;
    const double threshold = p.phrase.size() >= 2 ? multi_threshold : single_threshold;
    if (p.score < threshold) continue;
    if (typed.count(p.phrase) || present.count(p.phrase)) continue;
    present.insert(p.phrase);
    out.unknown_phrases.push_back(p.phrase);
  }
  return out;
}

}  // namespace autoner
