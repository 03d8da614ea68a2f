#pragma once

#include "autoner/corpus.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace autoner {

using TokenSeq = std::vector<std::string>;

/// Index into Dictionary::types. The reserved markers never index the list.
using TypeId = int;
inline constexpr TypeId kUnknownType = -1;

inline constexpr const char* kNoneTypeName = "None";
inline constexpr const char* kUnknownTypeName = "Unknown";

struct DictEntry {
  std::string type;
  TokenSeq canonical;
  std::vector<TokenSeq> synonyms;

  bool operator==(const DictEntry&) const = default;
};

struct ScoredPhrase {
  TokenSeq phrase;
  double score = 0.0;
};

struct Dictionary {
  /// Sorted, unique user type names. Kept by tailoring even when a type loses
  /// all its entries, so the label vocabulary stays stable.
  std::vector<std::string> types;
  std::vector<DictEntry> entries;
  std::vector<TokenSeq> unknown_phrases;

  /// Adds an entry, registering its type. Surfaces must already be
  /// normalized.
  void add_entry(DictEntry entry);

  TypeId type_id(const std::string& name) const;

  bool operator==(const Dictionary&) const = default;
};

/// Tokenizes and case-folds a surface string.
TokenSeq normalize_surface(std::string_view surface);

std::string join_tokens(const TokenSeq& tokens);

/// Parses `TYPE \t canonical \t synonym...` lines. Repeated (type, canonical)
/// lines merge their synonyms; duplicate surfaces inside one entry are
/// dropped.
Dictionary parse_dictionary(const std::filesystem::path& path);

/// Writes entries back in the TSV format parse_dictionary reads.
void write_dictionary(const Dictionary& dict, const std::filesystem::path& path);

/// Parses `score \t phrase` lines.
std::vector<ScoredPhrase> parse_phrases(const std::filesystem::path& path);

/// Keeps the entries whose canonical token sequence occurs contiguously in at
/// least one corpus sentence.
Dictionary tailor(const Dictionary& dict, const Corpus& corpus);

/// Appends quality phrases as unknown-typed surfaces. Multi-word phrases need
/// score >= multi_threshold and single words score >= single_threshold;
/// phrases equal to a typed surface are skipped.
Dictionary merge_phrases(const Dictionary& dict, const std::vector<ScoredPhrase>& phrases,
                         double multi_threshold = 0.5, double single_threshold = 0.9);

}  // namespace autoner
