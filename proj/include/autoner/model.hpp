#pragma once

#include "autoner/corpus.hpp"
#include "autoner/fuzzy_crf.hpp"
#include "autoner/labelgen.hpp"
#include "autoner/lstm.hpp"
#include "autoner/matcher.hpp"
#include "autoner/tensor.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace autoner {

enum class ModelKind { Fuzzy, AutoNer };

const char* to_string(ModelKind kind);
ModelKind parse_model_kind(const std::string& name);

struct ModelConfig {
  ModelKind kind = ModelKind::AutoNer;
  std::vector<std::string> types;
  Eigen::Index input_dim = 0;
  Eigen::Index hidden_dim = 50;
  /// Adds a bias to the break sigmoid; off gives sigmoid(w . u) exactly.
  bool break_bias = true;
  /// Forbids IOBES-malformed transitions in the Fuzzy CRF partition sums and
  /// decoding.
  bool structural_transitions = false;

  bool operator==(const ModelConfig&) const = default;
};

/// Distant supervision for one sentence, with both schemes precomputed.
struct TrainingExample {
  nn::Matrix embedded;  // n x d, frozen
  LabelMask lattice;
  TieBreakAnnotation tie_break;
};

TrainingExample make_example(const AnnotatedSentence& ann, const std::vector<std::string>& types,
                             const EmbeddingTable& embeddings);

/// Work counters of one AutoNER decode, for checking it stays linear.
struct DecodeStats {
  std::size_t gaps_scored = 0;
  std::size_t spans_typed = 0;
};

class Model {
 public:
  Model(ModelConfig config, std::uint64_t seed);
  // Copies are deep: parameter tensors are never shared between models.
  Model(const Model& other);
  Model& operator=(const Model& other);
  Model(Model&&) noexcept = default;
  Model& operator=(Model&&) noexcept = default;

  const ModelConfig& config() const { return config_; }
  nn::ParamStore& params() { return params_; }
  const nn::ParamStore& params() const { return params_; }
  IobesVocab vocab() const { return IobesVocab(config_.types); }
  /// |L| = user types + None.
  int type_count() const { return static_cast<int>(config_.types.size()) + 1; }

  /// Per-sentence training loss: fuzzy NLL, or L_span + L_type. Returns
  /// nullptr when the example carries no usable supervision.
  nn::Var loss(nn::Tape& tape, const TrainingExample& example, double dropout, bool training, nn::Rng& rng) const;

  /// BiLSTM features for a sentence matrix (inference mode).
  nn::Matrix features(const nn::Matrix& embedded) const;

  std::vector<Mention> predict(const nn::Matrix& embedded, double break_threshold = 0.5,
                               DecodeStats* stats = nullptr) const;

  /// Fuzzy only: Viterbi label indices.
  std::vector<int> viterbi_labels(const nn::Matrix& embedded) const;
  /// AutoNER only: per-gap break probabilities.
  std::vector<double> break_probabilities(const nn::Matrix& embedded) const;

  void save(const std::filesystem::path& path) const;
  void write(std::ostream& out) const;
  static Model load(const std::filesystem::path& path);
  static Model read(std::istream& in);

 private:
  Model(ModelConfig config, nn::ParamStore params);
  void bind();

  ModelConfig config_;
  nn::ParamStore params_;
  nn::BiLstmParams lstm_;
  crf::TransitionMask structural_;
};

}  // namespace autoner
