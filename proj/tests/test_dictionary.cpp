#include "autoner/dictionary.hpp"
#include "autoner/error.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <algorithm>

using namespace autoner;

namespace {

Dictionary parse(const std::string& text) {
  testutil::TempDir dir("dict");
  testutil::write_file(dir / "d.tsv", text);
  return parse_dictionary(dir / "d.tsv");
}

Corpus corpus_of(std::initializer_list<const char*> lines) {
  Corpus c;
  for (const char* l : lines) c.sentences.push_back(tokenize(l));
  return c;
}

}  // namespace

TEST_CASE("parse_dictionary reads typed entries") {
  const auto one = parse("Chemical\tindomethacin\n");
  REQUIRE(one.entries.size() == 1);
  CHECK(one.entries[0].type == "Chemical");
  CHECK(one.entries[0].canonical == TokenSeq{"indomethacin"});
  CHECK(one.entries[0].synonyms.empty());
  CHECK(one.types == std::vector<std::string>{"Chemical"});

  const auto two = parse("Disease\tNephrotic Syndrome\tnephrosis\n");
  REQUIRE(two.entries.size() == 1);
  CHECK(two.entries[0].canonical == TokenSeq{"nephrotic", "syndrome"});
  CHECK(two.entries[0].synonyms == std::vector<TokenSeq>{{"nephrosis"}});
}

TEST_CASE("parse_dictionary rejects malformed lines with their number") {
  for (const char* bad : {"Chemical indomethacin\n", "Chemical\t\n", "None\tfoo\n", "Unknown\tfoo\n"}) {
    try {
      parse(std::string("Disease\tfever\n") + bad);
      FAIL("expected MalformedLine");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::MalformedLine);
      CHECK(e.line() == 2);
    }
  }
  try {
    parse_dictionary("/nonexistent/dict.tsv");
    FAIL("expected IoError");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::IoError);
  }
}

TEST_CASE("parse_dictionary deduplicates repeated type and surface pairs") {
  const auto d = parse("Chemical\taspirin\tasa\nChemical\tAspirin\tasa\tacetylsalicylic acid\nDisease\taspirin\n");
  REQUIRE(d.entries.size() == 2);
  CHECK(d.entries[0].synonyms == std::vector<TokenSeq>{{"asa"}, {"acetylsalicylic", "acid"}});
  CHECK(d.types == std::vector<std::string>{"Chemical", "Disease"});
  CHECK(d.type_id("Disease") == 1);
  CHECK(d.type_id("Gene") == kUnknownType);
}

TEST_CASE("written dictionaries parse back identically") {
  const auto d = parse("Disease\tnephrotic syndrome\tnephrosis\nChemical\tindomethacin\n");
  testutil::TempDir dir("dict_rt");
  write_dictionary(d, dir / "out.tsv");
  CHECK(parse_dictionary(dir / "out.tsv") == d);
}

TEST_CASE("tailor keeps exactly the entries whose canonical name occurs") {
  Dictionary d;
  d.add_entry({"Person", {"wednesday", "addams"}, {{"wednesday"}}});
  d.add_entry({"Chemical", {"indomethacin"}, {{"indocin"}, {"indometacin"}}});
  d.add_entry({"Disease", {"renal", "failure"}, {}});
  d.unknown_phrases.push_back({"prostaglandin", "synthesis"});
  const auto corpus = corpus_of({"We met on Wednesday .", "Indomethacin lowers renal flow ."});
  const auto t = tailor(d, corpus);
  REQUIRE(t.entries.size() == 1);
  CHECK(t.entries[0].canonical == TokenSeq{"indomethacin"});
  CHECK(t.entries[0].synonyms.size() == 2);
  CHECK(t.unknown_phrases == d.unknown_phrases);
  CHECK(t.types == d.types);

  CHECK(tailor(d, Corpus{}).entries.empty());
}

TEST_CASE("tailor is a pointwise subset and idempotent") {
  std::mt19937_64 rng(11);
  const std::vector<std::string> words = {"a", "b", "c", "d", "e"};
  for (int trial = 0; trial < 50; ++trial) {
    Dictionary d;
    for (int e = 0; e < 8; ++e) {
      TokenSeq canon;
      const int len = std::uniform_int_distribution<int>(1, 3)(rng);
      for (int i = 0; i < len; ++i) canon.push_back(words[rng() % words.size()]);
      d.add_entry({e % 2 ? "X" : "Y", canon, {}});
    }
    Corpus c;
    for (int s = 0; s < 3; ++s) {
      std::string line;
      for (int i = 0; i < 4; ++i) line += words[rng() % words.size()] + " ";
      c.sentences.push_back(tokenize(line));
    }
    const auto once = tailor(d, c);
    for (const auto& e : once.entries) CHECK(std::find(d.entries.begin(), d.entries.end(), e) != d.entries.end());
    CHECK(tailor(once, c) == once);
  }
}

TEST_CASE("merge_phrases applies thresholds and typed dominance") {
  Dictionary d;
  d.add_entry({"Chemical", {"indomethacin"}, {}});
  const std::vector<ScoredPhrase> phrases = {
      {{"prostaglandin", "synthesis"}, 0.7}, {{"laptop"}, 0.8}, {{"indomethacin"}, 0.95}, {{"renal", "flow"}, 0.4}};
  const auto m = merge_phrases(d, phrases);
  CHECK(m.unknown_phrases == std::vector<TokenSeq>{{"prostaglandin", "synthesis"}});
  CHECK(m.entries == d.entries);

  CHECK(merge_phrases(d, phrases, 0.3, 0.8).unknown_phrases.size() == 3);
  CHECK(merge_phrases(m, phrases).unknown_phrases.size() == 1);
}

TEST_CASE("lowering either threshold never shrinks the unknown phrase list") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<ScoredPhrase> phrases;
  for (int i = 0; i < 40; ++i) {
    TokenSeq p = {"w" + std::to_string(i)};
    if (i % 2) p.push_back("x");
    phrases.push_back({p, u(rng)});
  }
  const Dictionary d;
  std::size_t last = 0;
  for (double t = 1.0; t >= 0.0; t -= 0.05) {
    const auto multi = merge_phrases(d, phrases, t, 0.9).unknown_phrases.size();
    const auto single = merge_phrases(d, phrases, 0.5, t).unknown_phrases.size();
    const auto both = merge_phrases(d, phrases, t, t).unknown_phrases.size();
    CHECK(both >= last);
    last = both;
    CHECK(multi >= merge_phrases(d, phrases, t + 0.05, 0.9).unknown_phrases.size());
    CHECK(single >= merge_phrases(d, phrases, 0.5, t + 0.05).unknown_phrases.size());
  }
}

TEST_CASE("parse_phrases validates scores") {
  testutil::TempDir dir("phr");
  testutil::write_file(dir / "p.tsv", "0.7\tProstaglandin synthesis\n0.95\tlaptop\n");
  const auto p = parse_phrases(dir / "p.tsv");
  REQUIRE(p.size() == 2);
  CHECK(p[0].phrase == TokenSeq{"prostaglandin", "synthesis"});
  CHECK(p[0].score == doctest::Approx(0.7));
  testutil::write_file(dir / "bad.tsv", "1.5\tfoo\n");
  CHECK_THROWS_AS(parse_phrases(dir / "bad.tsv"), Error);
}
