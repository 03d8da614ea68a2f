#pragma once

#include "autoner/matcher.hpp"

#include <Eigen/Core>

#include <iosfwd>
#include <string>
#include <vector>

namespace autoner {

enum class Position { O, B, I, E, S };

/// Modified-IOBES label vocabulary for k entity types: O first, then
/// B/I/E/S for each type in order, 4k+1 labels. The CRF's start and end
/// states sit at indices size() and size()+1.
class IobesVocab {
 public:
  IobesVocab() = default;
  explicit IobesVocab(std::vector<std::string> types) : types_(std::move(types)) {}

  int size() const { return 4 * static_cast<int>(types_.size()) + 1; }
  int start_state() const { return size(); }
  int end_state() const { return size() + 1; }
  const std::vector<std::string>& types() const { return types_; }

  int index(Position pos, TypeId type) const;
  Position position(int label) const;
  /// Type of a label; kUnknownType for O.
  TypeId type(int label) const;
  std::string name(int label) const;
  /// Inverse of name(); -1 when the string is not in the vocabulary.
  int parse(const std::string& name) const;

 private:
  std::vector<std::string> types_;
};

/// Boolean n x K mask of allowed labels, as consumed by the CRF kernels.
using LabelMask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

struct IobesLattice {
  IobesVocab vocab;
  std::vector<std::vector<int>> allowed;  // sorted label indices per token

  LabelMask mask() const;
  /// True when every token admits exactly one label.
  bool single_path() const;
};

enum class GapLabel { Tie, Break, Unknown };
const char* to_string(GapLabel label);

struct SupervisionSpan {
  int start = 0;
  int end = 0;
  /// Indices into L = user types + {None}; None is index types.size().
  std::vector<TypeId> types;

  bool operator==(const SupervisionSpan&) const = default;
};

struct TieBreakAnnotation {
  /// gaps[i-1] sits between token i-1 and token i, for i in [1, n).
  std::vector<GapLabel> gaps;
  /// Implicit sentence-edge boundaries: Break, or Unknown when the edge
  /// token lies inside an unknown phrase.
  GapLabel left_edge = GapLabel::Break;
  GapLabel right_edge = GapLabel::Break;
  std::vector<SupervisionSpan> supervision_spans;

  /// Boundary label at position p in [0, n], edges included.
  GapLabel boundary(std::size_t p) const;
};

IobesLattice build_iobes_lattice(const AnnotatedSentence& ann, const std::vector<std::string>& types);

TieBreakAnnotation build_tie_break(const AnnotatedSentence& ann, const std::vector<std::string>& types);

/// Plain-text dump of both supervision structures for one sentence.
void write_label_dump(std::ostream& out, const AnnotatedSentence& ann, const IobesLattice& lattice,
                      const TieBreakAnnotation& tie_break, const std::vector<std::string>& types);

}  // namespace autoner
