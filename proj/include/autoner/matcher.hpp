#pragma once

#include "autoner/corpus.hpp"
#include "autoner/dictionary.hpp"
#include "autoner/token_trie.hpp"

#include <map>
#include <string>
#include <vector>

namespace autoner {

/// Half-open token range [start, end) with its matched types. An
/// unknown-typed span holds exactly {kUnknownType}.
struct MatchSpan {
  int start = 0;
  int end = 0;
  std::vector<TypeId> types;

  int length() const { return end - start; }
  bool unknown() const { return types.size() == 1 && types.front() == kUnknownType; }
  bool operator==(const MatchSpan&) const = default;
};

struct AnnotatedSentence {
  Sentence sentence;
  std::vector<MatchSpan> spans;  // non-overlapping, sorted by start
};

/// A typed entity mention, used for predictions, gold data, and evaluation.
struct Mention {
  int start = 0;
  int end = 0;
  std::string type;

  auto operator<=>(const Mention&) const = default;
};

/// Token trie over every typed surface and unknown phrase of a dictionary.
class MatchIndex {
 public:
  explicit MatchIndex(const Dictionary& dict, bool include_unknown = true);

  std::vector<MatchSpan> find_all(const Sentence& sentence) const;
  std::size_t max_surface_length() const { return trie_.max_depth(); }

 private:
  struct Payload {
    std::vector<TypeId> types;  // sorted
    bool unknown = false;
  };
  TokenTrie<Payload> trie_;
};

/// Every (start, end) whose tokens equal a dictionary surface. Typed matches
/// carry the union of their types; unknown phrases are reported only where no
/// typed surface matches the same range. Output may overlap.
std::vector<MatchSpan> find_all_matches(const Sentence& sentence, const Dictionary& dict);

/// Non-overlapping subset of spans maximizing covered tokens. Among optimal
/// subsets, returns the lexicographically smallest sequence under the span
/// order (earlier start, then longer). Output is sorted by start.
std::vector<MatchSpan> resolve_conflicts(std::vector<MatchSpan> spans, int n);

AnnotatedSentence annotate(const Sentence& sentence, const Dictionary& dict);
AnnotatedSentence annotate(const Sentence& sentence, const MatchIndex& index);

/// surface (joined normalized tokens) -> type name -> votes.
using TypeVotes = std::map<std::string, std::map<std::string, int>>;

/// One vote per distinct (type, surface) pair in the dictionary.
TypeVotes build_type_votes(const Dictionary& dict);

/// Dictionary Match baseline: annotate ignoring unknown phrases, then give
/// every span the majority-vote type of its surface (ties go to the
/// lexicographically smallest type name).
std::vector<std::vector<Mention>> baseline_tag(const Corpus& test, const Dictionary& dict, const TypeVotes& votes);

}  // namespace autoner
