#include "autoner/fuzzy_crf.hpp"

namespace autoner::crf {

TransitionMask structural_transitions(const IobesVocab& vocab) {
  const int k = vocab.size();
  const int start = vocab.start_state();
  const int end = vocab.end_state();
  TransitionMask mask = TransitionMask::Constant(k + 2, k + 2, false);
  auto opens = [&](int b) {
    const auto pos = vocab.position(b);
    return pos == Position::O || pos == Position::B || pos == Position::S;
  };
  for (int b = 0; b < k; ++b) mask(start, b) = opens(b);
  for (int a = 0; a < k; ++a) {
    const auto pa = vocab.position(a);
    const bool inside = pa == Position::B || pa == Position::I;
    for (int b = 0; b < k; ++b) {
      if (inside) {
        const auto pb = vocab.position(b);
        mask(a, b) = (pb == Position::I || pb == Position::E) && vocab.type(a) == vocab.type(b);
      } else {
        mask(a, b) = opens(b);
      }
    }
    mask(a, end) = !inside;
  }
  return mask;
}

namespace {

struct ParsedLabel {
  Position pos = Position::O;
  std::string type;
};

template <typename LabelAt>
std::vector<Mention> decode_runs(std::size_t n, LabelAt&& at) {
  std::vector<Mention> out;
  std::size_t i = 0;
  while (i < n) {
    const ParsedLabel li = at(i);
    if (li.pos == Position::S) {
      out.push_back(Mention{static_cast<int>(i), static_cast<int>(i + 1), li.type});
      ++i;
    } else if (li.pos == Position::B) {
      std::size_t j = i + 1;
      while (j < n && at(j).pos == Position::I && at(j).type == li.type) ++j;
      if (j < n && at(j).pos == Position::E && at(j).type == li.type) {
        out.push_back(Mention{static_cast<int>(i), static_cast<int>(j + 1), li.type});
        i = j + 1;
      } else {
        i = j;
      }
    } else {
      ++i;
    }
  }
  return out;
}

}  // namespace

std::vector<Mention> iobes_to_mentions(std::span<const int> labels, const IobesVocab& vocab) {
  return decode_runs(labels.size(), [&](std::size_t i) {
    const int y = labels[i];
    if (y <= 0 || y >= vocab.size()) return ParsedLabel{};
    return ParsedLabel{vocab.position(y), vocab.types()[static_cast<std::size_t>(vocab.type(y))]};
  });
}

std::vector<Mention> iobes_to_mentions(std::span<const std::string> labels) {
  return decode_runs(labels.size(), [&](std::size_t i) {
    const auto& s = labels[i];
    if (s.size() < 3 || s[1] != '-') return ParsedLabel{};
    Position pos = Position::O;
    switch (s[0]) {
      case 'B': pos = Position::B; break;
      case 'I': pos = Position::I; break;
      case 'E': pos = Position::E; break;
      case 'S': pos = Position::S; break;
      default: return ParsedLabel{};
    }
    return ParsedLabel{pos, s.substr(2)};
  });
}

std::vector<std::string> mentions_to_iobes(std::span<const Mention> mentions, std::size_t n) {
  std::vector<std::string> out(n, "O");
  for (const auto& m : mentions) {
    if (m.start < 0 || static_cast<std::size_t>(m.end) > n || m.end <= m.start) continue;
    if (m.end - m.start == 1) {
      out[static_cast<std::size_t>(m.start)] = "S-" + m.type;
      continue;
    }
    out[static_cast<std::size_t>(m.start)] = "B-" + m.type;
    for (int i = m.start + 1; i < m.end - 1; ++i) out[static_cast<std::size_t>(i)] = "I-" + m.type;
    out[static_cast<std::size_t>(m.end - 1)] = "E-" + m.type;
  }
  return out;
}

nn::Var fuzzy_nll(nn::Tape& tape, const nn::Var& emissions, const nn::Var& transitions, const LabelMask& lattice,
                  const TransitionMask* structural) {
  auto all = std::make_shared<Marginals<double>>(marginals(emissions->value, transitions->value, nullptr, structural));
  auto lat = std::make_shared<Marginals<double>>(marginals(emissions->value, transitions->value, &lattice, structural));
  nn::Matrix loss(1, 1);
  loss(0, 0) = all->log_z - lat->log_z;
  auto out = tape.output(std::move(loss), {&emissions, &transitions});
  if (out->requires_grad) {
    tape.record([emissions, transitions, all, lat, o = out.get()] {
      const double g = o->grad(0, 0);
      if (emissions->requires_grad) emissions->grad += g * (all->labels - lat->labels);
      if (transitions->requires_grad) transitions->grad += g * (all->transitions - lat->transitions);
    });
  }
  return out;
}

}  // namespace autoner::crf
