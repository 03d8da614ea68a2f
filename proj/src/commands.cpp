#include "autoner/commands.hpp"

#include "autoner/error.hpp"
#include "autoner/labelgen.hpp"
#include "autoner/matcher.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <ostream>
#include <random>

namespace autoner {
namespace {

Corpus load_test_sentences(const std::filesystem::path& path, std::optional<ConllDocument>* gold) {
  if (looks_like_conll(path)) {
    auto doc = read_conll(path);
    Corpus c;
    c.source_path = path.string();
    c.sentences = doc.sentences;
    if (gold) *gold = std::move(doc);
    return c;
  }
  std::ifstream probe(path);
  std::string line;
  bool any = false;
  while (!any && std::getline(probe, line)) any = line.find_first_not_of(" \t\r") != std::string::npos;
  if (!any) return Corpus{{}, path.string()};
  return load_corpus(path);
}

EmbeddingTable load_configured_embeddings(const RunConfig& cfg) {
  const auto dim = cfg.embedding_dim > 0 ? cfg.embedding_dim : infer_embedding_dim(cfg.embeddings);
  return load_embeddings(cfg.embeddings, dim);
}

}  // namespace

Dictionary refine_dictionary(const Dictionary& dict, const Corpus& corpus, const std::vector<ScoredPhrase>* phrases,
                             bool tailor_dict, double multi_threshold, double single_threshold) {
  Dictionary out = tailor_dict ? tailor(dict, corpus) : dict;
  if (phrases) out = merge_phrases(out, *phrases, multi_threshold, single_threshold);
  return out;
}

std::vector<AnnotatedSentence> annotate_corpus(const Corpus& corpus, const Dictionary& dict) {
  const MatchIndex index(dict);
  std::vector<AnnotatedSentence> out;
  out.reserve(corpus.size());
  for (const auto& s : corpus.sentences) out.push_back(annotate(s, index));
  return out;
}

std::vector<TrainingExample> build_examples(const std::vector<AnnotatedSentence>& annotated,
                                            const std::vector<std::string>& types, const EmbeddingTable& embeddings) {
  std::vector<TrainingExample> out;
  out.reserve(annotated.size());
  for (const auto& a : annotated) out.push_back(make_example(a, types, embeddings));
  return out;
}

std::vector<DevExample> build_dev_examples(const ConllDocument& gold, const EmbeddingTable& embeddings) {
  std::vector<DevExample> out;
  const auto mentions = gold.mentions();
  for (std::size_t s = 0; s < gold.sentences.size(); ++s) {
    out.push_back(DevExample{nn::embed(gold.sentences[s], embeddings), mentions[s]});
  }
  return out;
}

Corpus subsample(const Corpus& corpus, std::size_t count, std::uint64_t seed) {
  if (count == 0 || count >= corpus.size()) return corpus;
  std::vector<std::size_t> idx(corpus.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(count);
  std::sort(idx.begin(), idx.end());
  Corpus out;
  out.source_path = corpus.source_path;
  for (auto i : idx) out.sentences.push_back(corpus.sentences[i]);
  return out;
}

Eigen::Index infer_embedding_dim(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open embedding file " + path.string());
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto tokens = split_tokens(line);
    return static_cast<Eigen::Index>(tokens.size()) - 1;
  }
  throw Error(ErrorKind::DimensionMismatch, "embedding file is empty: " + path.string());
}

std::string format_prf(const EvalResult& r) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f/%.2f/%.2f", 100 * r.precision, 100 * r.recall, 100 * r.f1);
  return buf;
}

TailorSummary cmd_tailor(const std::filesystem::path& dict_path, const std::filesystem::path& corpus_path,
                         const std::filesystem::path& out_path, std::ostream& msg) {
  require_file(dict_path, "dictionary");
  require_file(corpus_path, "corpus");
  const auto dict = parse_dictionary(dict_path);
  Corpus corpus;
  try {
    corpus = load_corpus(corpus_path);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::AllLinesEmpty) throw;
    msg << "warning: corpus " << corpus_path.string() << " is empty; every entry will be removed\n";
  }
  const auto tailored = tailor(dict, corpus);
  write_dictionary(tailored, out_path);
  TailorSummary s{tailored.entries.size(), dict.entries.size() - tailored.entries.size()};
  msg << "retained " << s.retained << ", removed " << s.removed << '\n';
  return s;
}

void cmd_label(const RunConfig& cfg, std::ostream& msg) {
  require_file(cfg.corpus, "corpus");
  require_file(cfg.dictionary, "dictionary");
  if (!cfg.phrases.empty()) require_file(cfg.phrases, "phrases");
  if (cfg.output.empty()) throw Error(ErrorKind::ConfigError, "missing required setting 'output'");

  const auto corpus = load_corpus(cfg.corpus);
  std::vector<ScoredPhrase> phrases;
  if (!cfg.phrases.empty()) phrases = parse_phrases(cfg.phrases);
  const auto dict = refine_dictionary(parse_dictionary(cfg.dictionary), corpus, cfg.phrases.empty() ? nullptr : &phrases,
                                      cfg.tailor, cfg.multi_threshold, cfg.single_threshold);
  const auto annotated = annotate_corpus(corpus, dict);

  std::ofstream out(cfg.output, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + cfg.output.string());
  out << "# types";
  for (const auto& t : dict.types) out << ' ' << t;
  out << '\n';
  std::size_t spans = 0;
  for (std::size_t s = 0; s < annotated.size(); ++s) {
    const auto& a = annotated[s];
    out << "\n# sentence " << s << '\t' << a.sentence.joined() << '\n';
    write_label_dump(out, a, build_iobes_lattice(a, dict.types), build_tie_break(a, dict.types), dict.types);
    spans += a.spans.size();
  }
  msg << "labeled " << annotated.size() << " sentences, " << spans << " matched spans\n";
}

TrainResult cmd_train(const RunConfig& cfg, std::ostream& msg) {
  require_file(cfg.corpus, "corpus");
  require_file(cfg.dictionary, "dictionary");
  require_file(cfg.embeddings, "embeddings");
  require_file(cfg.dev, "dev");
  if (!cfg.phrases.empty()) require_file(cfg.phrases, "phrases");
  if (cfg.checkpoint.empty()) throw Error(ErrorKind::ConfigError, "missing required setting 'checkpoint'");
  validate(cfg.train);

  const auto embeddings = load_configured_embeddings(cfg);
  const auto corpus = subsample(load_corpus(cfg.corpus), cfg.subsample, cfg.train.seed);
  std::vector<ScoredPhrase> phrases;
  if (!cfg.phrases.empty()) phrases = parse_phrases(cfg.phrases);
  const auto dict = refine_dictionary(parse_dictionary(cfg.dictionary), corpus, cfg.phrases.empty() ? nullptr : &phrases,
                                      cfg.tailor, cfg.multi_threshold, cfg.single_threshold);
  const auto examples = build_examples(annotate_corpus(corpus, dict), dict.types, embeddings);
  const auto dev = build_dev_examples(read_conll(cfg.dev), embeddings);

  const auto log_path = cfg.log.empty() ? std::filesystem::path(cfg.checkpoint.string() + ".log.csv") : cfg.log;
  std::ofstream log(log_path, std::ios::binary);
  if (!log) throw Error(ErrorKind::IoError, "cannot write " + log_path.string());
  msg << "training " << to_string(cfg.train.model_kind) << " on " << examples.size() << " sentences, "
      << dict.entries.size() << " entries, " << dict.unknown_phrases.size() << " unknown phrases\n";
  auto result = train(examples, dev, dict.types, cfg.train, &log);
  result.best.save(cfg.checkpoint);
  char buf[96];
  std::snprintf(buf, sizeof buf, "best dev F1 %.4f at epoch %d\n", result.best_dev_f1, result.best_epoch);
  msg << buf;
  return result;
}

void cmd_predict(const RunConfig& cfg, std::ostream& msg) {
  require_file(cfg.checkpoint, "checkpoint");
  require_file(cfg.embeddings, "embeddings");
  require_file(cfg.test, "test");
  if (cfg.output.empty()) throw Error(ErrorKind::ConfigError, "missing required setting 'output'");
  const auto model = Model::load(cfg.checkpoint);
  if (cfg.model_kind_set && model.config().kind != cfg.train.model_kind) {
    throw Error(ErrorKind::CheckpointModelKindMismatch, std::string("checkpoint holds a ") + to_string(model.config().kind) +
                                                            " model, config asks for " + to_string(cfg.train.model_kind));
  }
  const auto embeddings = load_configured_embeddings(cfg);
  if (embeddings.dimension() != model.config().input_dim) {
    throw Error(ErrorKind::DimensionMismatch, "embedding width does not match the checkpoint");
  }
  const auto test = load_test_sentences(cfg.test, nullptr);
  std::vector<std::vector<Mention>> predicted;
  for (const auto& s : test.sentences) predicted.push_back(model.predict(nn::embed(s, embeddings), cfg.train.break_threshold));
  write_conll(cfg.output, to_conll(test.sentences, predicted));
  msg << "wrote predictions for " << test.size() << " sentences\n";
}

EvalResult cmd_eval(const std::filesystem::path& pred_path, const std::filesystem::path& gold_path, std::ostream& out) {
  require_file(pred_path, "pred");
  require_file(gold_path, "gold");
  const auto pred = read_conll(pred_path);
  const auto gold = read_conll(gold_path);
  if (pred.sentences.size() != gold.sentences.size()) {
    throw Error(ErrorKind::LengthMismatch, "prediction and gold files differ in sentence count");
  }
  for (std::size_t s = 0; s < pred.sentences.size(); ++s) {
    if (pred.sentences[s].size() != gold.sentences[s].size()) {
      throw Error(ErrorKind::LengthMismatch, "sentence " + std::to_string(s) + " differs in token count");
    }
  }
  const auto r = evaluate(pred.mentions(), gold.mentions());
  out << "P/R/F1 " << format_prf(r) << '\n';
  out << "tp " << r.true_positives << " predicted " << r.predicted << " gold " << r.gold << '\n';
  return r;
}

std::optional<EvalResult> cmd_baseline(const RunConfig& cfg, std::ostream& out) {
  require_file(cfg.dictionary, "dictionary");
  require_file(cfg.test, "test");
  if (cfg.output.empty()) throw Error(ErrorKind::ConfigError, "missing required setting 'output'");
  if (!cfg.gold.empty()) require_file(cfg.gold, "gold");

  Dictionary dict = parse_dictionary(cfg.dictionary);
  if (cfg.tailor && !cfg.corpus.empty()) {
    require_file(cfg.corpus, "corpus");
    dict = tailor(dict, load_corpus(cfg.corpus));
  }
  std::optional<ConllDocument> gold;
  const auto test = load_test_sentences(cfg.test, &gold);
  if (!cfg.gold.empty()) gold = read_conll(cfg.gold);

  const auto mentions = baseline_tag(test, dict, build_type_votes(dict));
  write_conll(cfg.output, to_conll(test.sentences, mentions));
  out << "tagged " << test.size() << " sentences\n";
  if (!gold) return std::nullopt;
  const auto r = evaluate(mentions, gold->mentions());
  out << "P/R/F1 " << format_prf(r) << '\n';
  return r;
}

}  // namespace autoner
