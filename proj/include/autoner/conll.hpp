#pragma once

#include "autoner/corpus.hpp"
#include "autoner/matcher.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace autoner {

/// Sentences with one label per token, as read from or written to
/// `token<TAB>label` files with blank-line separators.
struct ConllDocument {
  std::vector<Sentence> sentences;
  std::vector<std::vector<std::string>> labels;

  std::vector<std::vector<Mention>> mentions() const;
};

ConllDocument read_conll(std::istream& in);
ConllDocument read_conll(const std::filesystem::path& path);

void write_conll(std::ostream& out, const ConllDocument& doc);
void write_conll(const std::filesystem::path& path, const ConllDocument& doc);

/// Builds a document from sentences and their mentions (rendered as IOBES).
ConllDocument to_conll(const std::vector<Sentence>& sentences, const std::vector<std::vector<Mention>>& mentions);

/// True when the first non-blank line contains a tab.
bool looks_like_conll(const std::filesystem::path& path);

}  // namespace autoner
