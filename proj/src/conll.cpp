#include "autoner/conll.hpp"

#include "autoner/error.hpp"
#include "autoner/fuzzy_crf.hpp"

#include <fstream>

namespace autoner {

std::vector<std::vector<Mention>> ConllDocument::mentions() const {
  std::vector<std::vector<Mention>> out;
  out.reserve(labels.size());
  for (const auto& l : labels) out.push_back(crf::iobes_to_mentions(std::span<const std::string>(l)));
  return out;
}

ConllDocument read_conll(std::istream& in) {
  ConllDocument doc;
  Sentence current;
  std::vector<std::string> labels;
  auto flush = [&] {
    if (current.tokens.empty()) return;
    doc.sentences.push_back(std::move(current));
    doc.labels.push_back(std::move(labels));
    current = Sentence{};
    labels.clear();
  };
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) {
      flush();
      continue;
    }
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 >= line.size()) {
      throw Error(ErrorKind::MalformedLine, "line " + std::to_string(line_no) + ": expected token<TAB>label", line_no);
    }
    auto label = line.substr(tab + 1);
    if (label.find('\t') != std::string::npos) label = label.substr(0, label.find('\t'));
    current.tokens.emplace_back(line.substr(0, tab));
    labels.push_back(std::move(label));
  }
  flush();
  return doc;
}

ConllDocument read_conll(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open CoNLL file " + path.string());
  return read_conll(in);
}

void write_conll(std::ostream& out, const ConllDocument& doc) {
  for (std::size_t s = 0; s < doc.sentences.size(); ++s) {
    const auto& toks = doc.sentences[s].tokens;
    for (std::size_t i = 0; i < toks.size(); ++i) out << toks[i].surface << '\t' << doc.labels[s][i] << '\n';
    out << '\n';
  }
}

void write_conll(const std::filesystem::path& path, const ConllDocument& doc) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot write CoNLL file " + path.string());
  write_conll(out, doc);
}

ConllDocument to_conll(const std::vector<Sentence>& sentences, const std::vector<std::vector<Mention>>& mentions) {
  ConllDocument doc;
  doc.sentences = sentences;
  for (std::size_t s = 0; s < sentences.size(); ++s) {
    doc.labels.push_back(crf::mentions_to_iobes(mentions[s], sentences[s].size()));
  }
  return doc;
}

bool looks_like_conll(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    return line.find('\t') != std::string::npos;
  }
  return false;
}

}  // namespace autoner
