#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace autoner {

/// Simple per-code-point Unicode lowercase of a UTF-8 string. Covers ASCII,
/// Latin-1, Latin Extended-A, Greek and Cyrillic; other code points pass
/// through. Invalid UTF-8 bytes are copied unchanged.
std::string case_fold(std::string_view text);

struct Token {
  std::string surface;
  std::string normalized;

  explicit Token(std::string s);
};

struct Sentence {
  std::vector<Token> tokens;

  std::size_t size() const { return tokens.size(); }
  const Token& operator[](std::size_t i) const { return tokens[i]; }

  std::vector<std::string> normalized() const;
  std::string joined() const;
};

struct Corpus {
  std::vector<Sentence> sentences;
  std::string source_path;

  std::size_t size() const { return sentences.size(); }
  bool empty() const { return sentences.empty(); }
};

/// Whitespace split, then leading and trailing ASCII punctuation characters
/// are peeled off as single-character tokens. Throws EmptyLine when nothing
/// remains.
Sentence tokenize(std::string_view line);

/// Splits on whitespace only; used for pre-tokenized inputs.
Sentence split_tokens(std::string_view line);

Corpus load_corpus(const std::filesystem::path& path);

class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  explicit EmbeddingTable(Eigen::Index dimension);

  Eigen::Index dimension() const { return dimension_; }
  std::size_t size() const { return words_.size(); }

  /// Returns false when `word` (after case folding) is already present.
  bool insert(std::string_view word, const Eigen::VectorXd& vector);
  void set_unk(const Eigen::VectorXd& vector);

  bool contains(std::string_view normalized) const;
  /// Vector for a normalized word, or unk_vector.
  const Eigen::VectorXd& lookup(std::string_view normalized) const;
  const Eigen::VectorXd& unk_vector() const { return unk_; }
  const std::vector<std::string>& words() const { return words_; }

  bool operator==(const EmbeddingTable& other) const;

 private:
  Eigen::Index dimension_ = 0;
  std::vector<std::string> words_;
  std::unordered_map<std::string, Eigen::VectorXd> vectors_;
  Eigen::VectorXd unk_;
};

/// Reads `word v1 ... vd` lines. Keys are case-folded, first occurrence wins,
/// and the unk vector is the component-wise mean of all kept vectors.
EmbeddingTable load_embeddings(const std::filesystem::path& path, Eigen::Index expected_dim);

/// Writes the table in the format load_embeddings reads, with exact
/// round-trip precision.
void save_embeddings(const EmbeddingTable& table, const std::filesystem::path& path);

}  // namespace autoner
