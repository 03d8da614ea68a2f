#include "autoner/labelgen.hpp"

#include <ostream>
#include <stdexcept>

namespace autoner {

int IobesVocab::index(Position pos, TypeId type) const {
  if (pos == Position::O) return 0;
  return 1 + 4 * type + (static_cast<int>(pos) - 1);
}

Position IobesVocab::position(int label) const {
  if (label == 0) return Position::O;
  return static_cast<Position>(1 + (label - 1) % 4);
}

TypeId IobesVocab::type(int label) const { return label == 0 ? kUnknownType : (label - 1) / 4; }

std::string IobesVocab::name(int label) const {
  if (label == start_state()) return "<start>";
  if (label == end_state()) return "<end>";
  if (label == 0) return "O";
  static constexpr const char* kTags[] = {"O", "B", "I", "E", "S"};
  return std::string(kTags[static_cast<int>(position(label))]) + "-" + types_.at(static_cast<std::size_t>(type(label)));
}

int IobesVocab::parse(const std::string& label) const {
  for (int i = 0; i < size(); ++i) {
    if (name(i) == label) return i;
  }
  return -1;
}

LabelMask IobesLattice::mask() const {
  LabelMask m = LabelMask::Constant(static_cast<Eigen::Index>(allowed.size()), vocab.size(), false);
  for (std::size_t i = 0; i < allowed.size(); ++i) {
    for (int y : allowed[i]) m(static_cast<Eigen::Index>(i), y) = true;
  }
  return m;
}

bool IobesLattice::single_path() const {
  for (const auto& a : allowed) {
    if (a.size() != 1) return false;
  }
  return true;
}

const char* to_string(GapLabel label) {
  switch (label) {
    case GapLabel::Tie: return "Tie";
    case GapLabel::Break: return "Break";
    case GapLabel::Unknown: return "Unknown";
  }
  return "?";
}

GapLabel TieBreakAnnotation::boundary(std::size_t p) const {
  if (p == 0) return left_edge;
  if (p == gaps.size() + 1) return right_edge;
  return gaps.at(p - 1);
}

IobesLattice build_iobes_lattice(const AnnotatedSentence& ann, const std::vector<std::string>& types) {
  IobesLattice lattice{IobesVocab(types), {}};
  const int all = lattice.vocab.size();
  lattice.allowed.assign(ann.sentence.size(), std::vector<int>{0});
  for (const auto& span : ann.spans) {
    for (int i = span.start; i < span.end; ++i) {
      auto& slot = lattice.allowed[static_cast<std::size_t>(i)];
      slot.clear();
      if (span.unknown()) {
        for (int y = 0; y < all; ++y) slot.push_back(y);
        continue;
      }
      Position pos = Position::I;
      if (span.length() == 1) {
        pos = Position::S;
      } else if (i == span.start) {
        pos = Position::B;
      } else if (i == span.end - 1) {
        pos = Position::E;
      }
      for (TypeId t : span.types) slot.push_back(lattice.vocab.index(pos, t));
    }
  }
  return lattice;
}

TieBreakAnnotation build_tie_break(const AnnotatedSentence& ann, const std::vector<std::string>& types) {
  const std::size_t n = ann.sentence.size();
  // owner[i]: index of the span covering token i, or -1.
  std::vector<int> owner(n, -1);
  for (std::size_t s = 0; s < ann.spans.size(); ++s) {
    for (int i = ann.spans[s].start; i < ann.spans[s].end; ++i) owner[static_cast<std::size_t>(i)] = static_cast<int>(s);
  }
  auto in_unknown = [&](std::size_t i) { return owner[i] >= 0 && ann.spans[static_cast<std::size_t>(owner[i])].unknown(); };

  TieBreakAnnotation tb;
  tb.gaps.resize(n > 0 ? n - 1 : 0, GapLabel::Break);
  for (std::size_t i = 1; i < n; ++i) {
    if (owner[i - 1] >= 0 && owner[i - 1] == owner[i] && !in_unknown(i)) {
      tb.gaps[i - 1] = GapLabel::Tie;
    } else if (in_unknown(i - 1) || in_unknown(i)) {
      tb.gaps[i - 1] = GapLabel::Unknown;
    }
  }
  if (n > 0) {
    tb.left_edge = in_unknown(0) ? GapLabel::Unknown : GapLabel::Break;
    tb.right_edge = in_unknown(n - 1) ? GapLabel::Unknown : GapLabel::Break;
  }

  const TypeId none = static_cast<TypeId>(types.size());
  std::size_t run_start = 0;
  for (std::size_t p = 1; p <= n; ++p) {
    const GapLabel right = tb.boundary(p);
    if (right == GapLabel::Tie) continue;
    const GapLabel left = tb.boundary(run_start);
    if (left == GapLabel::Break && right == GapLabel::Break) {
      SupervisionSpan span{static_cast<int>(run_start), static_cast<int>(p), {none}};
      const int o = owner[run_start];
      if (o >= 0) {
        const auto& m = ann.spans[static_cast<std::size_t>(o)];
        if (m.start == span.start && m.end == span.end && !m.unknown()) span.types = m.types;
      }
      tb.supervision_spans.push_back(std::move(span));
    }
    run_start = p;
  }
  return tb;
}

void write_label_dump(std::ostream& out, const AnnotatedSentence& ann, const IobesLattice& lattice,
                      const TieBreakAnnotation& tb, const std::vector<std::string>& types) {
  const auto& toks = ann.sentence.tokens;
  out << "## iobes\n";
  for (std::size_t i = 0; i < toks.size(); ++i) {
    out << toks[i].surface << '\t';
    const auto& allowed = lattice.allowed[i];
    for (std::size_t a = 0; a < allowed.size(); ++a) out << (a ? "|" : "") << lattice.vocab.name(allowed[a]);
    out << '\n';
  }
  out << "## tiebreak\n";
  for (std::size_t p = 0; p <= toks.size(); ++p) {
    out << (p == 0 ? "<s>" : toks[p - 1].surface) << ' ' << (p == toks.size() ? "</s>" : toks[p].surface) << '\t'
        << to_string(tb.boundary(p)) << '\n';
  }
  out << "## spans\n";
  for (const auto& s : tb.supervision_spans) {
    out << s.start << '\t' << s.end << '\t';
    for (std::size_t t = 0; t < s.types.size(); ++t) {
      const auto id = static_cast<std::size_t>(s.types[t]);
      out << (t ? "|" : "") << (id == types.size() ? kNoneTypeName : types[id]);
    }
    out << '\n';
  }
}

}  // namespace autoner
