#include "autoner/matcher.hpp"

#include <algorithm>
#include <set>

namespace autoner {

MatchIndex::MatchIndex(const Dictionary& dict, bool include_unknown) {
  for (const auto& e : dict.entries) {
    const TypeId id = dict.type_id(e.type);
    auto add = [&](const TokenSeq& surface) {
      auto& payload = trie_.insert(surface);
      auto it = std::lower_bound(payload.types.begin(), payload.types.end(), id);
      if (it == payload.types.end() || *it != id) payload.types.insert(it, id);
    };
    add(e.canonical);
    for (const auto& s : e.synonyms) add(s);
  }
  if (include_unknown) {
    for (const auto& p : dict.unknown_phrases) trie_.insert(p).unknown = true;
  }
}

std::vector<MatchSpan> MatchIndex::find_all(const Sentence& sentence) const {
  const auto tokens = sentence.normalized();
  std::vector<MatchSpan> out;
  for (std::size_t start = 0; start < tokens.size(); ++start) {
    trie_.for_each_prefix_match(tokens, start, [&](std::size_t end, const Payload& p) {
      if (!p.types.empty()) {
        out.push_back(MatchSpan{static_cast<int>(start), static_cast<int>(end), p.types});
      } else if (p.unknown) {
        out.push_back(MatchSpan{static_cast<int>(start), static_cast<int>(end), {kUnknownType}});
      }
    });
  }
  return out;
}

std::vector<MatchSpan> find_all_matches(const Sentence& sentence, const Dictionary& dict) {
  return MatchIndex(dict).find_all(sentence);
}

std::vector<MatchSpan> resolve_conflicts(std::vector<MatchSpan> spans, int n) {
  spans.erase(std::remove_if(spans.begin(), spans.end(),
                             [n](const MatchSpan& s) { return s.start < 0 || s.end > n || s.end <= s.start; }),
              spans.end());
  std::stable_sort(spans.begin(), spans.end(), [](const MatchSpan& a, const MatchSpan& b) {
    if (a.start != b.start) return a.start < b.start;
    return a.end > b.end;
  });
  const std::size_t m = spans.size();

  // next[i]: first span (in sorted order) starting at or after spans[i].end.
  std::vector<std::size_t> next(m);
  for (std::size_t i = 0; i < m; ++i) {
    auto it = std::lower_bound(spans.begin() + static_cast<std::ptrdiff_t>(i) + 1, spans.end(), spans[i].end,
                               [](const MatchSpan& s, int pos) { return s.start < pos; });
    next[i] = static_cast<std::size_t>(it - spans.begin());
  }

  // best[i]: maximum coverage achievable with spans[i..m).
  std::vector<int> best(m + 1, 0);
  for (std::size_t i = m; i-- > 0;) {
    best[i] = std::max(spans[i].length() + best[next[i]], best[i + 1]);
  }

  // Taking span i whenever it is optimal yields the lexicographically
  // smallest optimal sequence, since every later span sorts after it.
  std::vector<MatchSpan> out;
  std::size_t i = 0;
  while (i < m) {
    if (spans[i].length() + best[next[i]] == best[i]) {
      out.push_back(spans[i]);
      i = next[i];
    } else {
      ++i;
    }
  }
  return out;
}

AnnotatedSentence annotate(const Sentence& sentence, const MatchIndex& index) {
  return AnnotatedSentence{sentence, resolve_conflicts(index.find_all(sentence), static_cast<int>(sentence.size()))};
}

AnnotatedSentence annotate(const Sentence& sentence, const Dictionary& dict) {
  return annotate(sentence, MatchIndex(dict));
}

TypeVotes build_type_votes(const Dictionary& dict) {
  TypeVotes votes;
  for (const auto& e : dict.entries) {
    votes[join_tokens(e.canonical)][e.type] = 1;
    for (const auto& s : e.synonyms) votes[join_tokens(s)][e.type] = 1;
  }
  return votes;
}

std::vector<std::vector<Mention>> baseline_tag(const Corpus& test, const Dictionary& dict, const TypeVotes& votes) {
  const MatchIndex index(dict, /*include_unknown=*/false);
  std::vector<std::vector<Mention>> out;
  out.reserve(test.size());
  for (const auto& sentence : test.sentences) {
    const auto ann = annotate(sentence, index);
    const auto tokens = sentence.normalized();
    std::vector<Mention> mentions;
    for (const auto& span : ann.spans) {
      const TokenSeq surface(tokens.begin() + span.start, tokens.begin() + span.end);
      auto it = votes.find(join_tokens(surface));
      std::string winner;
      if (it != votes.end()) {
        int best = 0;
        // std::map iterates type names in order, so the first maximum wins ties.
        for (const auto& [type, count] : it->second) {
          if (count > best) {
            best = count;
            winner = type;
          }
        }
      }
      if (winner.empty()) winner = dict.types.at(static_cast<std::size_t>(span.types.front()));
      mentions.push_back(Mention{span.start, span.end, winner});
    }
    out.push_back(std::move(mentions));
  }
  return out;
}

}  // namespace autoner
