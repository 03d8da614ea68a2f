#pragma once

#include "autoner/trainer.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>

namespace autoner {

using KeyValues = std::map<std::string, std::string>;

/// Parses `key = value` lines; `#` starts a comment. Throws ConfigError on a
/// line without '='.
KeyValues parse_key_values(std::istream& in);
KeyValues read_config_file(const std::filesystem::path& path);

struct RunConfig {
  std::filesystem::path corpus;
  std::filesystem::path dictionary;
  std::filesystem::path phrases;
  std::filesystem::path embeddings;
  std::filesystem::path dev;
  std::filesystem::path test;
  std::filesystem::path gold;
  std::filesystem::path checkpoint;
  std::filesystem::path output;
  std::filesystem::path log;
  /// Zero means: take the width from the embedding file's first line.
  Eigen::Index embedding_dim = 0;
  /// Zero keeps the whole training corpus; otherwise a seeded uniform sample.
  std::size_t subsample = 0;

  TrainConfig train;
  /// Set when the model kind was given explicitly.
  bool model_kind_set = false;
  bool tailor = true;
  double multi_threshold = 0.5;
  double single_threshold = 0.9;
};

/// Known keys; anything else in a config is a ConfigError.
const std::vector<std::string>& config_keys();

/// Applies key-value settings on top of `base`.
RunConfig apply_key_values(RunConfig base, const KeyValues& kv);

/// Throws ConfigError unless `path` names an existing regular file.
void require_file(const std::filesystem::path& path, const std::string& key);

}  // namespace autoner
