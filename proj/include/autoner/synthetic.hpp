#pragma once

#include "autoner/conll.hpp"
#include "autoner/corpus.hpp"
#include "autoner/dictionary.hpp"
#include "autoner/matcher.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace autoner {

/// Template-generated two-type (Chemical, Disease) corpus with a partial
/// dictionary, quality phrases, and clustered word vectors standing in for
/// pre-trained embeddings.
struct SyntheticConfig {
  std::size_t train_sentences = 2000;
  std::size_t dev_sentences = 200;
  std::size_t test_sentences = 500;
  int surfaces_per_type = 60;
  /// Shares of entity surfaces covered by typed entries / by quality phrases.
  /// The rest is covered by neither.
  double dictionary_coverage = 0.70;
  double phrase_coverage = 0.15;
  /// Share of dictionary surfaces also listed under the other type.
  double ambiguous_fraction = 0.10;
  /// Entries whose canonical name never occurs but whose alias is a common
  /// non-entity word of the corpus.
  int noise_entries = 6;
  Eigen::Index embedding_dim = 24;
  /// Per-word deviation from the word's cluster centroid.
  double embedding_noise = 0.5;
  std::uint64_t seed = 7;
};

struct SyntheticData {
  std::vector<std::string> types;
  Corpus train;
  std::vector<std::vector<Mention>> train_gold;
  ConllDocument dev;
  ConllDocument test;
  Dictionary dictionary;
  std::vector<ScoredPhrase> phrases;
  EmbeddingTable embeddings;

  /// corpus.txt, dictionary.tsv, phrases.tsv, embeddings.txt, dev.conll,
  /// test.conll and test.txt under `dir`.
  void write(const std::filesystem::path& dir) const;
};

SyntheticData generate_synthetic(const SyntheticConfig& cfg);

}  // namespace autoner
