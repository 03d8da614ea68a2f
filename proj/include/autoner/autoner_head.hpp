#pragma once

#include "autoner/error.hpp"
#include "autoner/labelgen.hpp"
#include "autoner/tensor.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <span>
#include <utility>
#include <vector>

namespace autoner::tob {

// Break detection and span typing over BiLSTM features. Types are indexed
// over L = user types + {None}; None is the last index.

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
Scalar sigmoid(Scalar z) {
  return z >= 0 ? Scalar(1) / (Scalar(1) + std::exp(-z)) : std::exp(z) / (Scalar(1) + std::exp(z));
}

/// log(sigmoid(z)) without overflow.
template <typename Scalar>
Scalar log_sigmoid(Scalar z) {
  return z >= 0 ? -std::log1p(std::exp(-z)) : z - std::log1p(std::exp(z));
}

/// p(Break | u) = sigmoid(w . u + bias).
template <typename DU, typename DW>
typename DU::Scalar break_probability(const Eigen::MatrixBase<DU>& u, const Eigen::MatrixBase<DW>& w,
                                      typename DU::Scalar bias = 0) {
  return sigmoid(u.reshaped().dot(w.reshaped()) + bias);
}

/// Logistic loss over non-Unknown gaps. Unknown gaps contribute nothing.
inline double span_loss(std::span<const GapLabel> gaps, std::span<const double> probs) {
  if (gaps.size() != probs.size()) throw Error(ErrorKind::LengthMismatch, "one probability per gap required");
  double loss = 0;
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    if (gaps[i] == GapLabel::Break) loss -= std::log(probs[i]);
    if (gaps[i] == GapLabel::Tie) loss -= std::log1p(-probs[i]);
  }
  return loss;
}

template <typename Derived>
VectorX<typename Derived::Scalar> softmax(const Eigen::MatrixBase<Derived>& logits) {
  const auto z = logits.reshaped();
  const auto e = (z.array() - z.maxCoeff()).exp();
  return (e / e.sum()).matrix();
}

/// Softmax over t_j . v; `type_weights` holds t_j as column j (4h x |L|).
template <typename DV, typename DT>
VectorX<typename DV::Scalar> type_distribution(const Eigen::MatrixBase<DV>& v, const Eigen::MatrixBase<DT>& type_weights) {
  return softmax(type_weights.transpose() * v.reshaped());
}

/// Softmax restricted to `allowed` (indices into L), zero elsewhere.
template <typename Derived>
VectorX<typename Derived::Scalar> soft_target_from_logits(const Eigen::MatrixBase<Derived>& logits,
                                                          std::span<const int> allowed) {
  using Scalar = typename Derived::Scalar;
  if (allowed.empty()) throw Error(ErrorKind::EmptyAllowedSet, "soft target needs a non-empty type set");
  const auto z = logits.reshaped();
  Scalar m = z[allowed[0]];
  for (int j : allowed) m = std::max(m, z[j]);
  VectorX<Scalar> p = VectorX<Scalar>::Zero(z.size());
  Scalar total = 0;
  for (int j : allowed) {
    p[j] = std::exp(z[j] - m);
    total += p[j];
  }
  return p / total;
}

template <typename DV, typename DT>
VectorX<typename DV::Scalar> soft_target(const Eigen::MatrixBase<DV>& v, const Eigen::MatrixBase<DT>& type_weights,
                                         std::span<const int> allowed) {
  return soft_target_from_logits(type_weights.transpose() * v.reshaped(), allowed);
}

/// Cross entropy H(p_hat, p) = -sum_j p_hat_j log p_j.
template <typename DV, typename DT>
typename DV::Scalar type_loss(const Eigen::MatrixBase<DV>& v, const Eigen::MatrixBase<DT>& type_weights,
                              std::span<const int> allowed) {
  using Scalar = typename DV::Scalar;
  const VectorX<Scalar> logits = type_weights.transpose() * v.reshaped();
  const VectorX<Scalar> target = soft_target_from_logits(logits, allowed);
  const Scalar lse = logits.maxCoeff() + std::log((logits.array() - logits.maxCoeff()).exp().sum());
  Scalar loss = 0;
  for (Eigen::Index j = 0; j < logits.size(); ++j) {
    if (target[j] > 0) loss -= target[j] * (logits[j] - lse);
  }
  return loss;
}

/// Candidate spans from per-gap break probabilities: a gap with p >= threshold
/// is a Break; sentence edges always are.
std::vector<std::pair<int, int>> candidate_spans(std::span<const double> break_probs, double threshold);

/// Tape op: logistic loss over gap logits (m x 1), skipping Unknown gaps.
nn::Var span_loss(nn::Tape& tape, const nn::Var& gap_logits, std::span<const GapLabel> gaps);

/// Tape op: sum over spans of H(p_hat, p) for type logits (s x |L|). The soft
/// target p_hat is treated as a constant.
nn::Var type_loss(nn::Tape& tape, const nn::Var& type_logits, const std::vector<std::vector<int>>& allowed);

}  // namespace autoner::tob
