#include "autoner/synthetic.hpp"

#include "autoner/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

namespace autoner {
namespace {

using Rng = std::mt19937_64;

constexpr const char* kTemplates[] = {
    "the patient was treated with {C} for {D} .",
    "{C} induced {D} in [rats|mice|patients] .",
    "we report a case of {D} after {C} therapy .",
    "administration of {C} reduced the risk of {D} .",
    "{D} is a known side effect of {C} .",
    "no evidence of {D} was found in the [control|placebo] group .",
    "[patients|subjects] receiving {C} showed signs of {D} on [wednesday|monday] .",
    "the combination of {C} and {C} was well tolerated .",
    "{D} and {D} were observed in several [patients|subjects] .",
    "serum levels of {C} were measured at [baseline|follow-up] .",
    "a [cold|warm] solution of {C} was applied daily .",
    "exposure to {C} may cause {D} .",
    "the [lead|senior] investigator reviewed all cases of {D} .",
    "treatment with {C} improved {D} in most [patients|subjects] .",
    "{C} [prevents|reverses|attenuates] {D} in animal models .",
    "the study was approved by the ethics committee .",
    "all [patients|subjects] gave written informed consent .",
    "we measured [blood pressure|heart rate] on [wednesday|monday] and friday .",
    "risk factors for {D} include age and {D} .",
    "{C} is metabolized by the liver .",
    "the incidence of {D} was higher in the {C} group .",
    "results were compared with the [control|placebo] group .",
    "cases of {D} were reported after {C} [exposure|treatment] .",
    "the [cold|lead] [exposure|sample] was stored at room temperature .",
};

// Common non-entity words that noise entries alias onto.
constexpr const char* kTrapWords[] = {"wednesday", "control", "lead", "cold", "baseline", "placebo", "monday"};

constexpr const char* kSyllables[] = {"ka", "lo", "mi", "ne", "ru", "ta", "vi", "zo", "pe", "shi", "da", "fu",
                                      "gra", "tho", "bel", "cor", "dex", "fen", "lim", "mor", "pra", "sul", "tri", "xan"};
constexpr const char* kChemSuffixes[] = {"ine", "ol", "ide", "ate", "one", "azole", "amine", "statin"};
constexpr const char* kDisSuffixes[] = {"itis", "osis", "emia", "pathy", "oma", "algia", "plegia", "uria"};
constexpr const char* kChemModifiers[] = {"sodium", "methyl", "chloro", "acetyl", "hydro", "nitro", "potassium", "ethyl"};
constexpr const char* kDisModifiers[] = {"acute", "chronic", "renal", "hepatic", "cardiac", "severe", "neonatal", "diffuse"};
constexpr const char* kDisNouns[] = {"syndrome", "failure", "disease", "injury", "deficiency"};

template <std::size_t N>
const char* pick(const char* const (&arr)[N], Rng& rng) {
  return arr[std::uniform_int_distribution<std::size_t>(0, N - 1)(rng)];
}

std::string pseudo_word(Rng& rng, const char* suffix) {
  const int syllables = std::uniform_int_distribution<int>(1, 2)(rng);
  std::string w;
  for (int i = 0; i < syllables; ++i) w += pick(kSyllables, rng);
  return w + suffix;
}

struct Lexicon {
  std::vector<TokenSeq> surfaces[2];     // per type: 0 Chemical, 1 Disease
  std::map<std::string, int> clusters;   // entity word -> cluster id
};

Lexicon build_lexicon(int per_type, Rng& rng) {
  Lexicon lex;
  std::vector<std::string> heads[2];
  std::set<std::string> used(std::begin(kTrapWords), std::end(kTrapWords));
  auto fresh = [&](const char* suffix) {
    for (;;) {
      auto w = pseudo_word(rng, suffix);
      if (used.insert(w).second) return w;
    }
  };
  const int head_count = std::max(4, per_type * 2 / 3);
  for (int i = 0; i < head_count; ++i) {
    heads[0].push_back(fresh(pick(kChemSuffixes, rng)));
    heads[1].push_back(fresh(pick(kDisSuffixes, rng)));
  }
  for (const auto& w : heads[0]) lex.clusters[w] = 0;
  for (const auto* w : kChemModifiers) lex.clusters[w] = 1;
  for (const auto& w : heads[1]) lex.clusters[w] = 2;
  for (const auto* w : kDisModifiers) lex.clusters[w] = 3;
  for (const auto* w : kDisNouns) lex.clusters[w] = 4;

  std::uniform_real_distribution<double> u(0, 1);
  for (int type = 0; type < 2; ++type) {
    std::set<TokenSeq> seen;
    auto& out = lex.surfaces[type];
    while (static_cast<int>(out.size()) < per_type) {
      const auto& head = heads[type][std::uniform_int_distribution<std::size_t>(0, heads[type].size() - 1)(rng)];
      const double r = u(rng);
      TokenSeq s;
      if (type == 0) {
        if (r < 0.55) s = {head};
        else if (r < 0.85) s = {pick(kChemModifiers, rng), head};
        else s = {pick(kChemModifiers, rng), pick(kChemModifiers, rng), head};
      } else {
        if (r < 0.45) s = {head};
        else if (r < 0.80) s = {pick(kDisModifiers, rng), head};
        else s = {pick(kDisModifiers, rng), head, pick(kDisNouns, rng)};
      }
      if (s.size() == 3 && s[0] == s[1]) continue;
      if (seen.insert(s).second) out.push_back(s);
    }
  }
  return lex;
}

struct Generated {
  Sentence sentence;
  std::vector<Mention> gold;
};

Generated expand(const std::string& tmpl, const Lexicon& lex, Rng& rng) {
  static const char* kTypes[] = {"Chemical", "Disease"};
  Generated g;
  std::istringstream in(tmpl);
  std::string piece;
  while (in >> piece) {
    if (piece == "{C}" || piece == "{D}") {
      const int type = piece == "{C}" ? 0 : 1;
      const auto& pool = lex.surfaces[type];
      const auto& s = pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
      const int start = static_cast<int>(g.sentence.size());
      for (const auto& w : s) g.sentence.tokens.emplace_back(w);
      g.gold.push_back(Mention{start, static_cast<int>(g.sentence.size()), kTypes[type]});
    } else if (piece.front() == '[') {
      // Alternatives may span several words: "[blood pressure|heart rate]".
      std::string group = piece;
      while (group.back() != ']' && in >> piece) group += " " + piece;
      group = group.substr(1, group.size() - 2);
      std::vector<std::string> options;
      std::stringstream ss(group);
      std::string opt;
      while (std::getline(ss, opt, '|')) options.push_back(opt);
      std::istringstream words(options[std::uniform_int_distribution<std::size_t>(0, options.size() - 1)(rng)]);
      std::string w;
      while (words >> w) g.sentence.tokens.emplace_back(w);
    } else {
      g.sentence.tokens.emplace_back(piece);
    }
  }
  return g;
}

std::vector<Generated> generate_sentences(std::size_t count, const Lexicon& lex, Rng& rng) {
  std::vector<Generated> out;
  out.reserve(count);
  const std::size_t n_templates = std::size(kTemplates);
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back(expand(kTemplates[std::uniform_int_distribution<std::size_t>(0, n_templates - 1)(rng)], lex, rng));
  }
  return out;
}

Eigen::VectorXd gaussian(Eigen::Index d, double sigma, Rng& rng) {
  std::normal_distribution<double> n(0.0, sigma);
  Eigen::VectorXd v(d);
  for (Eigen::Index i = 0; i < d; ++i) v[i] = n(rng);
  return v;
}

}  // namespace

SyntheticData generate_synthetic(const SyntheticConfig& cfg) {
  if (cfg.surfaces_per_type < 4 || cfg.dictionary_coverage + cfg.phrase_coverage > 1.0) {
    throw Error(ErrorKind::ConfigError, "synthetic: need >= 4 surfaces per type and coverages summing to <= 1");
  }
  Rng rng(cfg.seed);
  SyntheticData data;
  data.types = {"Chemical", "Disease"};
  const Lexicon lex = build_lexicon(cfg.surfaces_per_type, rng);

  for (auto& g : generate_sentences(cfg.train_sentences, lex, rng)) {
    data.train.sentences.push_back(std::move(g.sentence));
    data.train_gold.push_back(std::move(g.gold));
  }
  data.train.source_path = "corpus.txt";
  auto to_doc = [](std::vector<Generated> gen) {
    std::vector<Sentence> s;
    std::vector<std::vector<Mention>> m;
    for (auto& g : gen) {
      s.push_back(std::move(g.sentence));
      m.push_back(std::move(g.gold));
    }
    return to_conll(s, m);
  };
  data.dev = to_doc(generate_sentences(cfg.dev_sentences, lex, rng));
  data.test = to_doc(generate_sentences(cfg.test_sentences, lex, rng));

  // Dictionary, phrases, and the uncovered remainder, split per type.
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<TokenSeq> covered[2];
  for (int type = 0; type < 2; ++type) {
    auto pool = lex.surfaces[type];
    std::shuffle(pool.begin(), pool.end(), rng);
    const auto n = pool.size();
    const auto n_dict = static_cast<std::size_t>(std::lround(cfg.dictionary_coverage * static_cast<double>(n)));
    const auto n_phrase = static_cast<std::size_t>(std::lround(cfg.phrase_coverage * static_cast<double>(n)));
    for (std::size_t i = 0; i < n_dict; ++i) {
      data.dictionary.add_entry(DictEntry{data.types[static_cast<std::size_t>(type)], pool[i], {}});
      covered[type].push_back(pool[i]);
    }
    for (std::size_t i = n_dict; i < std::min(n, n_dict + n_phrase); ++i) {
      const bool multi = pool[i].size() >= 2;
      const double score = multi ? 0.55 + 0.4 * u(rng) : 0.91 + 0.08 * u(rng);
      data.phrases.push_back(ScoredPhrase{pool[i], score});
    }
  }
  for (int type = 0; type < 2; ++type) {
    for (const auto& s : covered[type]) {
      if (u(rng) < cfg.ambiguous_fraction) data.dictionary.add_entry(DictEntry{data.types[static_cast<std::size_t>(1 - type)], s, {}});
    }
  }
  const std::size_t trap_count = std::size(kTrapWords);
  for (int i = 0; i < cfg.noise_entries; ++i) {
    const std::string alias = kTrapWords[static_cast<std::size_t>(i) % trap_count];
    TokenSeq canonical = {alias, pseudo_word(rng, "ton")};
    data.dictionary.add_entry(DictEntry{data.types[static_cast<std::size_t>(i % 2)], canonical, {{alias}}});
  }
  // Phrases a miner would also emit: low-scoring context n-grams and a few
  // confident non-entity phrases.
  data.phrases.push_back(ScoredPhrase{{"the", "patient"}, 0.31});
  data.phrases.push_back(ScoredPhrase{{"animal", "models"}, 0.42});
  data.phrases.push_back(ScoredPhrase{{"ethics", "committee"}, 0.83});
  data.phrases.push_back(ScoredPhrase{{"informed", "consent"}, 0.77});
  data.phrases.push_back(ScoredPhrase{{"liver"}, 0.64});

  // Word vectors: entity words cluster by role; every other word gets its
  // own direction.
  data.embeddings = EmbeddingTable(cfg.embedding_dim);
  std::vector<Eigen::VectorXd> centroids;
  for (int c = 0; c < 5; ++c) centroids.push_back(gaussian(cfg.embedding_dim, 1.0, rng));
  std::set<std::string> vocab;
  auto collect = [&](const std::vector<Sentence>& ss) {
    for (const auto& s : ss) {
      for (const auto& t : s.tokens) vocab.insert(t.normalized);
    }
  };
  collect(data.train.sentences);
  collect(data.dev.sentences);
  collect(data.test.sentences);
  for (const auto& w : vocab) {
    auto it = lex.clusters.find(w);
    Eigen::VectorXd v = it == lex.clusters.end()
                            ? gaussian(cfg.embedding_dim, 1.0, rng)
                            : Eigen::VectorXd(centroids[static_cast<std::size_t>(it->second)] +
                                              gaussian(cfg.embedding_dim, cfg.embedding_noise, rng));
    data.embeddings.insert(w, v);
  }
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(cfg.embedding_dim);
  for (const auto& w : data.embeddings.words()) mean += data.embeddings.lookup(w);
  data.embeddings.set_unk(mean / static_cast<double>(std::max<std::size_t>(1, data.embeddings.size())));
  return data;
}

void SyntheticData::write(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "corpus.txt", std::ios::binary);
    for (const auto& s : train.sentences) out << s.joined() << '\n';
  }
  write_dictionary(dictionary, dir / "dictionary.tsv");
  {
    std::ofstream out(dir / "phrases.tsv", std::ios::binary);
    char buf[32];
    for (const auto& p : phrases) {
      std::snprintf(buf, sizeof buf, "%.4f", p.score);
      out << buf << '\t' << join_tokens(p.phrase) << '\n';
    }
  }
  save_embeddings(embeddings, dir / "embeddings.txt");
  write_conll(dir / "dev.conll", dev);
  write_conll(dir / "test.conll", test);
  {
    std::ofstream out(dir / "test.txt", std::ios::binary);
    for (const auto& s : test.sentences) out << s.joined() << '\n';
  }
}

}  // namespace autoner
