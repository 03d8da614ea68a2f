#include "autoner/commands.hpp"
#include "autoner/config.hpp"
#include "autoner/conll.hpp"
#include "autoner/error.hpp"
#include "autoner/synthetic.hpp"
#include "fixtures.hpp"

#include <doctest.h>

#include <cstdlib>
#include <sstream>
#include <sys/wait.h>

using namespace autoner;

namespace {

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::IoError;
}

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = text.find(needle); p != std::string::npos; p = text.find(needle, p + 1)) ++n;
  return n;
}

// Small synthetic workspace shared by the command tests.
struct Workspace {
  testutil::TempDir dir{"cli"};
  Workspace() {
    SyntheticConfig sc;
    sc.train_sentences = 150;
    sc.dev_sentences = 30;
    sc.test_sentences = 20;
    sc.surfaces_per_type = 16;
    sc.embedding_dim = 8;
    generate_synthetic(sc).write(dir.path());
  }
  RunConfig train_config(ModelKind kind) const {
    RunConfig c;
    c.corpus = dir / "corpus.txt";
    c.dictionary = dir / "dictionary.tsv";
    c.phrases = dir / "phrases.tsv";
    c.embeddings = dir / "embeddings.txt";
    c.dev = dir / "dev.conll";
    c.checkpoint = dir / (std::string(to_string(kind)) + ".ckpt");
    c.train.model_kind = kind;
    c.model_kind_set = true;
    c.train.max_epochs = 2;
    c.train.hidden_dim = 6;
    return c;
  }
};

int run_cli(const std::string& args) {
  const std::string cmd = std::string(AUTONER_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("CoNLL documents round-trip") {
  std::istringstream in("Thus\tO\nindomethacin\tS-Chemical\n\nrenal\tB-Disease\nfailure\tE-Disease\n\n");
  const auto doc = read_conll(in);
  REQUIRE(doc.sentences.size() == 2);
  CHECK(doc.mentions()[0] == std::vector<Mention>{{1, 2, "Chemical"}});
  CHECK(doc.mentions()[1] == std::vector<Mention>{{0, 2, "Disease"}});
  std::ostringstream out;
  write_conll(out, doc);
  CHECK(out.str() == "Thus\tO\nindomethacin\tS-Chemical\n\nrenal\tB-Disease\nfailure\tE-Disease\n\n");
  std::istringstream no_trailing("a\tO\nb\tO");
  CHECK(read_conll(no_trailing).sentences.size() == 1);
  std::istringstream bad("a\tO\nbroken line\n");
  CHECK(kind_of([&] { read_conll(bad); }) == ErrorKind::MalformedLine);
  const auto rendered = to_conll({testutil::sentence("a b c")}, {{{1, 3, "X"}}});
  CHECK(rendered.labels[0] == std::vector<std::string>{"O", "B-X", "E-X"});
}

TEST_CASE("config files and overrides") {
  std::istringstream in("# comment\ncorpus = c.txt\n\nepochs=7  # trailing\nmodel = fuzzy\ntailor = off\n");
  const auto kv = parse_key_values(in);
  CHECK(kv.at("corpus") == "c.txt");
  CHECK(kv.at("epochs") == "7");
  auto cfg = apply_key_values(RunConfig{}, kv);
  CHECK(cfg.corpus == "c.txt");
  CHECK(cfg.train.max_epochs == 7);
  CHECK(cfg.train.model_kind == ModelKind::Fuzzy);
  CHECK(!cfg.tailor);
  cfg = apply_key_values(cfg, {{"epochs", "9"}, {"lr", "0.01"}, {"structural_transitions", "true"}});
  CHECK(cfg.train.max_epochs == 9);
  CHECK(cfg.train.initial_lr == 0.01);
  CHECK(cfg.train.structural_transitions);
  CHECK(kind_of([] { apply_key_values(RunConfig{}, {{"bogus", "1"}}); }) == ErrorKind::ConfigError);
  CHECK(kind_of([] { apply_key_values(RunConfig{}, {{"epochs", "seven"}}); }) == ErrorKind::ConfigError);
  CHECK(kind_of([] { apply_key_values(RunConfig{}, {{"multi_threshold", "1.5"}}); }) == ErrorKind::ConfigError);
  std::istringstream no_eq("corpus c.txt\n");
  CHECK(kind_of([&] { parse_key_values(no_eq); }) == ErrorKind::ConfigError);
}

TEST_CASE("cmd_tailor removes absent entries and is idempotent") {
  testutil::TempDir dir("tailor");
  testutil::write_file(dir / "d.tsv", "Person\twednesday addams\twednesday\nChemical\tindomethacin\tindocin\nDisease\trenal failure\n");
  testutil::write_file(dir / "c.txt", "We met on Wednesday .\nIndomethacin may cause renal failure .\n");
  std::ostringstream msg;
  const auto s = cmd_tailor(dir / "d.tsv", dir / "c.txt", dir / "t1.tsv", msg);
  CHECK(s.retained == 2);
  CHECK(s.removed == 1);
  CHECK(msg.str().find("removed 1") != std::string::npos);
  cmd_tailor(dir / "t1.tsv", dir / "c.txt", dir / "t2.tsv", msg);
  CHECK(testutil::read_file(dir / "t1.tsv") == testutil::read_file(dir / "t2.tsv"));
  CHECK(testutil::read_file(dir / "t1.tsv").find("wednesday") == std::string::npos);

  testutil::write_file(dir / "empty.txt", "\n");
  std::ostringstream warn;
  const auto e = cmd_tailor(dir / "d.tsv", dir / "empty.txt", dir / "t3.tsv", warn);
  CHECK(e.retained == 0);
  CHECK(warn.str().find("warning") != std::string::npos);
  CHECK(testutil::read_file(dir / "t3.tsv").empty());
}

TEST_CASE("cmd_label writes the supervision dump") {
  testutil::TempDir dir("label");
  testutil::write_file(dir / "d.tsv", "Chemical\tindomethacin\nDisease\trenal failure\n");
  testutil::write_file(dir / "p.tsv", "0.7\tprostaglandin synthesis\n0.8\tblood\n");
  testutil::write_file(dir / "c.txt",
                       "Thus , by inhibition of prostaglandin synthesis , indomethacin decreased renal blood flow .\n"
                       "nothing matches here\n"
                       "prostaglandin synthesis was low\n");
  RunConfig cfg;
  cfg.corpus = dir / "c.txt";
  cfg.dictionary = dir / "d.tsv";
  cfg.phrases = dir / "p.tsv";
  cfg.output = dir / "dump.txt";
  std::ostringstream msg;
  cmd_label(cfg, msg);
  const auto dump = testutil::read_file(dir / "dump.txt");
  CHECK(dump.rfind("# types Chemical Disease\n", 0) == 0);
  CHECK(dump.find("indomethacin\tS-Chemical\n") != std::string::npos);
  const std::string nine = "O|B-Chemical|I-Chemical|E-Chemical|S-Chemical|B-Disease|I-Disease|E-Disease|S-Disease";
  CHECK(dump.find("prostaglandin\t" + nine + "\n") != std::string::npos);
  CHECK(dump.find("synthesis\t" + nine + "\n") != std::string::npos);
  CHECK(dump.find("prostaglandin synthesis\tUnknown\n") != std::string::npos);
  CHECK(dump.find("blood\tO\n") != std::string::npos);

  const auto second = dump.substr(dump.find("# sentence 1"), dump.find("# sentence 2") - dump.find("# sentence 1"));
  CHECK(count(second, "\tO\n") == 3);
  CHECK(count(second, "\tBreak\n") == 4);
  CHECK(count(second, "\tNone\n") == 3);

  // Edge unknown phrase: the run after it is not supervised either.
  const auto third = dump.substr(dump.find("# sentence 2"));
  CHECK(third.find("<s> prostaglandin\tUnknown\n") != std::string::npos);
  const auto spans = third.substr(third.find("## spans"));
  CHECK(spans == "## spans\n3\t4\tNone\n");

  std::ostringstream msg2;
  cmd_label(cfg, msg2);
  CHECK(testutil::read_file(dir / "dump.txt") == dump);
}

TEST_CASE("cmd_train, cmd_predict and cmd_eval work together") {
  Workspace ws;
  std::ostringstream msg;
  for (auto kind : {ModelKind::Fuzzy, ModelKind::AutoNer}) {
    auto cfg = ws.train_config(kind);
    const auto result = cmd_train(cfg, msg);
    CHECK(std::filesystem::exists(cfg.checkpoint));
    const auto log = testutil::read_file(cfg.checkpoint.string() + ".log.csv");
    CHECK(log.rfind(kLogHeader, 0) == 0);
    CHECK(count(log, "\n") == 3);

    const auto first_ckpt = testutil::read_file(cfg.checkpoint);
    cmd_train(cfg, msg);
    CHECK(testutil::read_file(cfg.checkpoint) == first_ckpt);
    CHECK(testutil::read_file(cfg.checkpoint.string() + ".log.csv") == log);

    RunConfig pc;
    pc.checkpoint = cfg.checkpoint;
    pc.embeddings = cfg.embeddings;
    pc.test = ws.dir / "dev.conll";
    pc.output = ws.dir / "pred.conll";
    cmd_predict(pc, msg);
    std::ostringstream out;
    const auto via_files = cmd_eval(pc.output, ws.dir / "dev.conll", out);
    CHECK(via_files.f1 == result.best_dev_f1);
    const auto dev = build_dev_examples(read_conll(ws.dir / "dev.conll"),
                                        load_embeddings(cfg.embeddings, infer_embedding_dim(cfg.embeddings)));
    const auto direct = evaluate_model(result.best, dev, 0.5);
    CHECK(via_files.true_positives == direct.true_positives);
    CHECK(via_files.predicted == direct.predicted);
    CHECK(via_files.precision == direct.precision);

    pc.model_kind_set = true;
    pc.train.model_kind = kind == ModelKind::Fuzzy ? ModelKind::AutoNer : ModelKind::Fuzzy;
    CHECK(kind_of([&] { cmd_predict(pc, msg); }) == ErrorKind::CheckpointModelKindMismatch);
  }
}

TEST_CASE("cmd_predict output shape") {
  Workspace ws;
  std::ostringstream msg;
  auto cfg = ws.train_config(ModelKind::AutoNer);
  cfg.train.max_epochs = 1;
  cmd_train(cfg, msg);
  RunConfig pc;
  pc.checkpoint = cfg.checkpoint;
  pc.embeddings = cfg.embeddings;
  pc.output = ws.dir / "one.conll";
  testutil::write_file(ws.dir / "one.txt", "the patient was treated with zofuamine .\n");
  pc.test = ws.dir / "one.txt";
  cmd_predict(pc, msg);
  const auto text = testutil::read_file(pc.output);
  CHECK(count(text, "\n") == 8);
  CHECK(text.substr(text.size() - 2) == "\n\n");
  testutil::write_file(ws.dir / "empty.txt", "");
  pc.test = ws.dir / "empty.txt";
  cmd_predict(pc, msg);
  CHECK(testutil::read_file(pc.output).empty());
}

TEST_CASE("cmd_train rejects a missing embeddings file before training") {
  Workspace ws;
  auto cfg = ws.train_config(ModelKind::Fuzzy);
  cfg.embeddings = ws.dir / "missing.txt";
  std::ostringstream msg;
  CHECK(kind_of([&] { cmd_train(cfg, msg); }) == ErrorKind::ConfigError);
  CHECK(!std::filesystem::exists(cfg.checkpoint));
}

TEST_CASE("cmd_eval prints two-decimal scores") {
  testutil::TempDir dir("eval");
  testutil::write_file(dir / "g.conll", "a\tS-X\nb\tO\n\nc\tB-Y\nd\tE-Y\n\n");
  testutil::write_file(dir / "p.conll", "a\tO\nb\tS-X\n\nc\tO\nd\tO\n\n");
  std::ostringstream same, disjoint;
  cmd_eval(dir / "g.conll", dir / "g.conll", same);
  CHECK(same.str().rfind("P/R/F1 100.00/100.00/100.00\n", 0) == 0);
  cmd_eval(dir / "p.conll", dir / "g.conll", disjoint);
  CHECK(disjoint.str().rfind("P/R/F1 0.00/0.00/0.00\n", 0) == 0);

  testutil::write_file(dir / "g7.conll", "a\tS-X\nb\tS-X\nc\tS-X\nd\tS-X\n\n");
  testutil::write_file(dir / "p7.conll", "a\tS-X\nb\tS-X\nc\tS-Y\nd\tO\n\n");
  std::ostringstream seven;
  cmd_eval(dir / "p7.conll", dir / "g7.conll", seven);
  CHECK(seven.str().rfind("P/R/F1 66.67/50.00/57.14\n", 0) == 0);

  testutil::write_file(dir / "short.conll", "a\tO\n\n");
  std::ostringstream ignored;
  CHECK(kind_of([&] { cmd_eval(dir / "short.conll", dir / "g.conll", ignored); }) == ErrorKind::LengthMismatch);
}

TEST_CASE("cmd_baseline tags exact matches, vote ties going to the smaller type name") {
  testutil::TempDir dir("base");
  testutil::write_file(dir / "d.tsv", "Chemical\tlithium\nDisease\tlithium\nDisease\tgout\nDisease\tgout attack\tgout\n");
  testutil::write_file(dir / "t.conll",
                       "lithium\tS-Chemical\nand\tO\ngout\tS-Disease\n\nblood\tO\ntest\tO\n\n");
  RunConfig cfg;
  cfg.dictionary = dir / "d.tsv";
  cfg.test = dir / "t.conll";
  cfg.output = dir / "out.conll";
  std::ostringstream out;
  const auto r = cmd_baseline(cfg, out);
  REQUIRE(r.has_value());
  CHECK(testutil::read_file(cfg.output) == "lithium\tS-Chemical\nand\tO\ngout\tS-Disease\n\nblood\tO\ntest\tO\n\n");
  CHECK(r->f1 == 1.0);
}

TEST_CASE("the binary maps failures to exit codes") {
  Workspace ws;
  const auto d = ws.dir.path().string();
  CHECK(run_cli("") == 1);
  CHECK(run_cli("frobnicate") == 1);
  CHECK(run_cli("eval --pred " + d + "/dev.conll --gold " + d + "/dev.conll") == 0);
  CHECK(run_cli("train --corpus " + d + "/corpus.txt --dictionary " + d + "/dictionary.tsv --embeddings " + d +
                "/nope.txt --dev " + d + "/dev.conll --checkpoint " + d + "/x.ckpt") == 1);
  testutil::write_file(ws.dir / "bad.tsv", "no tab here\n");
  CHECK(run_cli("tailor --dictionary " + d + "/bad.tsv --corpus " + d + "/corpus.txt --output " + d + "/o.tsv") == 2);
  testutil::write_file(ws.dir / "run.cfg", "corpus = " + d + "/corpus.txt\ndictionary = " + d +
                                               "/dictionary.tsv\nembeddings = " + d + "/embeddings.txt\ndev = " + d +
                                               "/dev.conll\ncheckpoint = " + d + "/cfg.ckpt\nepochs = 1\nhidden_dim = 4\n");
  CHECK(run_cli("train --config " + d + "/run.cfg --model fuzzy") == 0);
  CHECK(Model::load(ws.dir / "cfg.ckpt").config().kind == ModelKind::Fuzzy);
  CHECK(run_cli("train --config " + d + "/run.cfg --bogus 1") == 1);
}
