#include "autoner/autoner_head.hpp"

namespace autoner::tob {

std::vector<std::pair<int, int>> candidate_spans(std::span<const double> break_probs, double threshold) {
  std::vector<std::pair<int, int>> spans;
  const int n = static_cast<int>(break_probs.size()) + 1;
  int start = 0;
  for (int i = 1; i < n; ++i) {
    if (break_probs[static_cast<std::size_t>(i - 1)] >= threshold) {
      spans.emplace_back(start, i);
      start = i;
    }
  }
  spans.emplace_back(start, n);
  return spans;
}

nn::Var span_loss(nn::Tape& tape, const nn::Var& gap_logits, std::span<const GapLabel> gaps) {
  const Eigen::Index m = gap_logits->value.rows();
  if (static_cast<Eigen::Index>(gaps.size()) != m) throw Error(ErrorKind::LengthMismatch, "one logit per gap required");
  nn::Matrix d = nn::Matrix::Zero(m, 1);
  double loss = 0;
  for (Eigen::Index i = 0; i < m; ++i) {
    const double z = gap_logits->value(i, 0);
    const auto label = gaps[static_cast<std::size_t>(i)];
    if (label == GapLabel::Break) {
      loss -= log_sigmoid(z);
      d(i, 0) = sigmoid(z) - 1.0;
    } else if (label == GapLabel::Tie) {
      loss -= log_sigmoid(-z);
      d(i, 0) = sigmoid(z);
    }
  }
  nn::Matrix value(1, 1);
  value(0, 0) = loss;
  auto out = tape.output(std::move(value), {&gap_logits});
  if (out->requires_grad) {
    tape.record([gap_logits, d = std::move(d), o = out.get()] { gap_logits->grad += o->grad(0, 0) * d; });
  }
  return out;
}

nn::Var type_loss(nn::Tape& tape, const nn::Var& type_logits, const std::vector<std::vector<int>>& allowed) {
  const Eigen::Index s = type_logits->value.rows();
  if (static_cast<Eigen::Index>(allowed.size()) != s) throw Error(ErrorKind::LengthMismatch, "one type set per span required");
  nn::Matrix d = nn::Matrix::Zero(s, type_logits->value.cols());
  double loss = 0;
  for (Eigen::Index r = 0; r < s; ++r) {
    const Eigen::VectorXd z = type_logits->value.row(r).transpose();
    const auto& set = allowed[static_cast<std::size_t>(r)];
    const Eigen::VectorXd target = soft_target_from_logits(z, set);
    const Eigen::VectorXd p = softmax(z);
    const double lse = z.maxCoeff() + std::log((z.array() - z.maxCoeff()).exp().sum());
    for (int j : set) loss -= target[j] * (z[j] - lse);
    d.row(r) = (p - target).transpose();
  }
  nn::Matrix value(1, 1);
  value(0, 0) = loss;
  auto out = tape.output(std::move(value), {&type_logits});
  if (out->requires_grad) {
    tape.record([type_logits, d = std::move(d), o = out.get()] { type_logits->grad += o->grad(0, 0) * d; });
  }
  return out;
}

}  // namespace autoner::tob
