#include "autoner/corpus.hpp"

#include "autoner/error.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace autoner {
namespace {

char32_t lower_code_point(char32_t c) {
  if (c < 0x80) return (c >= 'A' && c <= 'Z') ? c + 32 : c;
  if (c >= 0xC0 && c <= 0xDE && c != 0xD7) return c + 32;
  if (c >= 0x0100 && c <= 0x017F) {
    if (c == 0x0130) return 0x0069;
    if (c == 0x0178) return 0x00FF;
    const bool even = (c % 2) == 0;
    if ((c <= 0x012F || (c >= 0x0132 && c <= 0x0137) || (c >= 0x014A && c <= 0x0177)) && even) return c + 1;
    if (((c >= 0x0139 && c <= 0x0148) || (c >= 0x0179 && c <= 0x017E)) && !even) return c + 1;
    return c;
  }
  if (c >= 0x0391 && c <= 0x03A9 && c != 0x03A2) return c + 32;
  if (c == 0x0386) return 0x03AC;
  if (c >= 0x0388 && c <= 0x038A) return c + 37;
  if (c == 0x038C) return 0x03CC;
  if (c == 0x038E || c == 0x038F) return c + 63;
  if (c >= 0x0410 && c <= 0x042F) return c + 32;
  if (c >= 0x0400 && c <= 0x040F) return c + 80;
  if (c >= 0x0460 && c <= 0x0481 && c % 2 == 0) return c + 1;
  return c;
}

void append_utf8(std::string& out, char32_t c) {
  if (c < 0x80) {
    out += static_cast<char>(c);
  } else if (c < 0x800) {
    out += static_cast<char>(0xC0 | (c >> 6));
    out += static_cast<char>(0x80 | (c & 0x3F));
  } else if (c < 0x10000) {
    out += static_cast<char>(0xE0 | (c >> 12));
    out += static_cast<char>(0x80 | ((c >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (c & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (c >> 18));
    out += static_cast<char>(0x80 | ((c >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((c >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (c & 0x3F));
  }
}

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_punct(char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; }

template <typename Fn>
void for_each_field(std::string_view line, Fn&& fn) {
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    std::size_t j = i;
    while (j < line.size() && !is_space(line[j])) ++j;
    if (j > i) fn(line.substr(i, j - i));
    i = j;
  }
}

}  // namespace

std::string case_fold(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    const auto b0 = static_cast<unsigned char>(text[i]);
    std::size_t len = 0;
    char32_t c = 0;
    if (b0 < 0x80) {
      len = 1;
      c = b0;
    } else if ((b0 >> 5) == 0x6) {
      len = 2;
      c = b0 & 0x1F;
    } else if ((b0 >> 4) == 0xE) {
      len = 3;
      c = b0 & 0x0F;
    } else if ((b0 >> 3) == 0x1E) {
      len = 4;
      c = b0 & 0x07;
    }
    bool valid = len > 0 && i + len <= text.size();
    for (std::size_t k = 1; valid && k < len; ++k) {
      const auto b = static_cast<unsigned char>(text[i + k]);
      if ((b >> 6) != 0x2) valid = false;
      c = (c << 6) | (b & 0x3F);
    }
    if (!valid) {
      out += text[i];
      ++i;
      continue;
    }
    append_utf8(out, lower_code_point(c));
    i += len;
  }
  return out;
}

Token::Token(std::string s) : surface(std::move(s)), normalized(case_fold(surface)) {}

std::vector<std::string> Sentence::normalized() const {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(t.normalized);
  return out;
}

std::string Sentence::joined() const {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += tokens[i].surface;
  }
  return out;
}

Sentence tokenize(std::string_view line) {
  Sentence sentence;
  for_each_field(line, [&](std::string_view field) {
    std::size_t lo = 0;
    std::size_t hi = field.size();
    while (lo < hi && is_punct(field[lo])) ++lo;
    // A field made only of punctuation becomes one token per character.
    if (lo == hi) {
      for (char c : field) sentence.tokens.emplace_back(std::string(1, c));
      return;
    }
    while (hi > lo && is_punct(field[hi - 1])) --hi;
    for (std::size_t k = 0; k < lo; ++k) sentence.tokens.emplace_back(std::string(1, field[k]));
    sentence.tokens.emplace_back(std::string(field.substr(lo, hi - lo)));
    for (std::size_t k = hi; k < field.size(); ++k) sentence.tokens.emplace_back(std::string(1, field[k]));
  });
  if (sentence.tokens.empty()) throw Error(ErrorKind::EmptyLine, "line contains no tokens");
  return sentence;
}

Sentence split_tokens(std::string_view line) {
  Sentence sentence;
  for_each_field(line, [&](std::string_view field) { sentence.tokens.emplace_back(std::string(field)); });
  if (sentence.tokens.empty()) throw Error(ErrorKind::EmptyLine, "line contains no tokens");
  return sentence;
}

Corpus load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open corpus file " + path.string());
  Corpus corpus;
  corpus.source_path = path.string();
  std::string line;
  while (std::getline(in, line)) {
    bool blank = true;
    for (char c : line) blank = blank && is_space(c);
    if (blank) continue;
    corpus.sentences.push_back(tokenize(line));
  }
  if (corpus.sentences.empty()) throw Error(ErrorKind::AllLinesEmpty, "corpus file has no sentences: " + path.string());
  return corpus;
}

EmbeddingTable::EmbeddingTable(Eigen::Index dimension)
    : dimension_(dimension), unk_(Eigen::VectorXd::Zero(dimension)) {}

bool EmbeddingTable::insert(std::string_view word, const Eigen::VectorXd& vector) {
  if (vector.size() != dimension_) throw Error(ErrorKind::DimensionMismatch, "embedding width differs from table dimension");
  auto key = case_fold(word);
  if (vectors_.count(key)) return false;
  words_.push_back(key);
  vectors_.emplace(std::move(key), vector);
  return true;
}

void EmbeddingTable::set_unk(const Eigen::VectorXd& vector) {
  if (vector.size() != dimension_) throw Error(ErrorKind::DimensionMismatch, "unk width differs from table dimension");
  unk_ = vector;
}

bool EmbeddingTable::contains(std::string_view normalized) const {
  return vectors_.count(std::string(normalized)) != 0;
}

const Eigen::VectorXd& EmbeddingTable::lookup(std::string_view normalized) const {
  auto it = vectors_.find(std::string(normalized));
  return it == vectors_.end() ? unk_ : it->second;
}

bool EmbeddingTable::operator==(const EmbeddingTable& other) const {
  if (dimension_ != other.dimension_ || words_ != other.words_ || unk_ != other.unk_) return false;
  for (const auto& w : words_) {
    if (vectors_.at(w) != other.vectors_.at(w)) return false;
  }
  return true;
}

EmbeddingTable load_embeddings(const std::filesystem::path& path, Eigen::Index expected_dim) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open embedding file " + path.string());
  EmbeddingTable table(expected_dim);
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(expected_dim);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::vector<std::string_view> fields;
    for_each_field(line, [&](std::string_view f) { fields.push_back(f); });
    if (fields.empty()) continue;
    if (static_cast<Eigen::Index>(fields.size()) - 1 != expected_dim) {
      throw Error(ErrorKind::DimensionMismatch,
                  "line " + std::to_string(line_no) + ": expected " + std::to_string(expected_dim) + " values, got " +
                      std::to_string(fields.size() - 1),
                  line_no);
    }
    Eigen::VectorXd v(expected_dim);
    for (Eigen::Index d = 0; d < expected_dim; ++d) {
      const std::string field(fields[d + 1]);
      char* end = nullptr;
      v[d] = std::strtod(field.c_str(), &end);
      if (end != field.c_str() + field.size()) {
        throw Error(ErrorKind::MalformedLine, "line " + std::to_string(line_no) + ": bad number '" + field + "'", line_no);
      }
    }
    if (table.insert(fields[0], v)) sum += v;
  }
  if (table.size() > 0) table.set_unk(sum / static_cast<double>(table.size()));
  return table;
}

void save_embeddings(const EmbeddingTable& table, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::IoError, "cannot write embedding file " + path.string());
  char buf[32];
  for (const auto& w : table.words()) {
    out << w;
    const auto& v = table.lookup(w);
    for (Eigen::Index d = 0; d < v.size(); ++d) {
      std::snprintf(buf, sizeof buf, " %.17g", v[d]);
      out << buf;
    }
    out << '\n';
  }
}

}  // namespace autoner
