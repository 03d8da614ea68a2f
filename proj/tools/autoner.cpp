#include "autoner/commands.hpp"
#include "autoner/config.hpp"
#include "autoner/error.hpp"
#include "autoner/synthetic.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <iostream>
#include <map>
#include <string>

namespace {

using autoner::KeyValues;

struct Overrides {
  std::string config_path;
  std::map<std::string, std::string> values;
};

std::string dashed(std::string key) {
  std::replace(key.begin(), key.end(), '_', '-');
  return key;
}

// Every config key doubles as a command-line flag; flags win over the file.
void add_config_options(CLI::App& cmd, Overrides& ov) {
  cmd.add_option("--config", ov.config_path, "key = value settings file");
  for (const auto& key : autoner::config_keys()) {
    std::string names = "--" + key;
    if (dashed(key) != key) names += ",--" + dashed(key);
    cmd.add_option(names, ov.values[key], key);
  }
}

autoner::RunConfig resolve(const CLI::App& cmd, const Overrides& ov) {
  autoner::RunConfig cfg;
  if (!ov.config_path.empty()) cfg = autoner::apply_key_values(cfg, autoner::read_config_file(ov.config_path));
  KeyValues flags;
  for (const auto& key : autoner::config_keys()) {
    if (cmd.count("--" + key) > 0) flags[key] = ov.values.at(key);
  }
  return autoner::apply_key_values(cfg, flags);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Named-entity tagging from a dictionary and raw text"};
  app.require_subcommand(1);

  std::string dict_path, corpus_path, out_path;
  auto* tailor = app.add_subcommand("tailor", "Drop dictionary entries whose canonical name never occurs in the corpus");
  tailor->add_option("--dictionary", dict_path)->required();
  tailor->add_option("--corpus", corpus_path)->required();
  tailor->add_option("--output", out_path)->required();

  Overrides label_ov, train_ov, predict_ov, baseline_ov;
  auto* label = app.add_subcommand("label", "Write the distant-supervision dump for a corpus");
  add_config_options(*label, label_ov);
  auto* train = app.add_subcommand("train", "Train a model and save the best checkpoint");
  add_config_options(*train, train_ov);
  auto* predict = app.add_subcommand("predict", "Tag a test corpus with a trained checkpoint");
  add_config_options(*predict, predict_ov);
  auto* baseline = app.add_subcommand("baseline", "Dictionary-match baseline tagging");
  add_config_options(*baseline, baseline_ov);

  std::string pred_path, gold_path;
  auto* eval = app.add_subcommand("eval", "Score predicted CoNLL against gold CoNLL");
  eval->add_option("--pred", pred_path)->required();
  eval->add_option("--gold", gold_path)->required();

  autoner::SyntheticConfig synth_cfg;
  std::string synth_dir;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic corpus, dictionary, phrases and embeddings");
  synth->add_option("--output", synth_dir)->required();
  synth->add_option("--seed", synth_cfg.seed);
  synth->add_option("--train-sentences", synth_cfg.train_sentences);
  synth->add_option("--dev-sentences", synth_cfg.dev_sentences);
  synth->add_option("--test-sentences", synth_cfg.test_sentences);
  synth->add_option("--surfaces-per-type", synth_cfg.surfaces_per_type);
  synth->add_option("--embedding-dim", synth_cfg.embedding_dim);
  synth->add_option("--embedding-noise", synth_cfg.embedding_noise);
  synth->add_option("--noise-entries", synth_cfg.noise_entries);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (tailor->parsed()) {
      autoner::cmd_tailor(dict_path, corpus_path, out_path, std::cerr);
    } else if (label->parsed()) {
      autoner::cmd_label(resolve(*label, label_ov), std::cerr);
    } else if (train->parsed()) {
      autoner::cmd_train(resolve(*train, train_ov), std::cerr);
    } else if (predict->parsed()) {
      autoner::cmd_predict(resolve(*predict, predict_ov), std::cerr);
    } else if (baseline->parsed()) {
      autoner::cmd_baseline(resolve(*baseline, baseline_ov), std::cout);
    } else if (eval->parsed()) {
      autoner::cmd_eval(pred_path, gold_path, std::cout);
    } else if (synth->parsed()) {
      autoner::generate_synthetic(synth_cfg).write(synth_dir);
    }
  } catch (const autoner::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.kind() == autoner::ErrorKind::ConfigError ? 1 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
