#pragma once

#include "autoner/config.hpp"
#include "autoner/conll.hpp"
#include "autoner/dictionary.hpp"
#include "autoner/model.hpp"
#include "autoner/trainer.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace autoner {

/// Optional tailoring against `corpus`, then phrase merging when phrases are
/// given.
Dictionary refine_dictionary(const Dictionary& dict, const Corpus& corpus, const std::vector<ScoredPhrase>* phrases,
                             bool tailor_dict, double multi_threshold, double single_threshold);

std::vector<AnnotatedSentence> annotate_corpus(const Corpus& corpus, const Dictionary& dict);

std::vector<TrainingExample> build_examples(const std::vector<AnnotatedSentence>& annotated,
                                            const std::vector<std::string>& types, const EmbeddingTable& embeddings);

std::vector<DevExample> build_dev_examples(const ConllDocument& gold, const EmbeddingTable& embeddings);

/// Seeded uniform sample of `count` sentences, kept in corpus order. Returns
/// the corpus unchanged when count is zero or not smaller than its size.
Corpus subsample(const Corpus& corpus, std::size_t count, std::uint64_t seed);

/// Number of values after the word on the first non-blank line.
Eigen::Index infer_embedding_dim(const std::filesystem::path& path);

/// "P/R/F1" as percentages with two decimals, e.g. 66.67/50.00/57.14.
std::string format_prf(const EvalResult& r);

struct TailorSummary {
  std::size_t retained = 0;
  std::size_t removed = 0;
};

TailorSummary cmd_tailor(const std::filesystem::path& dict_path, const std::filesystem::path& corpus_path,
                         const std::filesystem::path& out_path, std::ostream& msg);

/// Writes the label dump (both schemes) for every corpus sentence.
void cmd_label(const RunConfig& cfg, std::ostream& msg);

/// Full pipeline; saves the best checkpoint and the CSV training log.
TrainResult cmd_train(const RunConfig& cfg, std::ostream& msg);

/// Decodes the test corpus into `token<TAB>IOBES` lines.
void cmd_predict(const RunConfig& cfg, std::ostream& msg);

EvalResult cmd_eval(const std::filesystem::path& pred_path, const std::filesystem::path& gold_path, std::ostream& out);

/// Dictionary Match baseline; evaluates when gold labels are available.
std::optional<EvalResult> cmd_baseline(const RunConfig& cfg, std::ostream& out);

}  // namespace autoner
