#pragma once

#include "autoner/error.hpp"
#include "autoner/labelgen.hpp"
#include "autoner/tensor.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

namespace autoner::crf {

// Emissions are n x K; transitions are (K+2) x (K+2) with the start state at
// index K and the end state at K+1. Disallowed lattice labels and masked
// transitions are skipped, never added as arithmetic -inf.

inline constexpr double kMasked = -1e12;

/// Allowed transitions, (K+2) x (K+2). Empty means everything is allowed.
using TransitionMask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

namespace detail {

inline bool allowed(const LabelMask* lattice, Eigen::Index i, Eigen::Index y) {
  return lattice == nullptr || (*lattice)(i, y);
}

inline bool transition_allowed(const TransitionMask* mask, Eigen::Index from, Eigen::Index to) {
  return mask == nullptr || mask->size() == 0 || (*mask)(from, to);
}

// Streaming log-sum-exp that tolerates an empty set of terms.
template <typename Scalar>
struct LogSumExp {
  Scalar max = 0;
  Scalar sum = 0;
  bool any = false;
  void add(Scalar v) {
    if (!any) {
      max = v;
      sum = 1;
      any = true;
    } else if (v > max) {
      sum = sum * std::exp(max - v) + 1;
      max = v;
    } else {
      sum += std::exp(v - max);
    }
  }
  bool empty() const { return !any; }
  Scalar value() const { return any ? max + std::log(sum) : Scalar(kMasked); }
};

template <typename DP>
void check_lattice(const Eigen::MatrixBase<DP>& P, const LabelMask* lattice) {
  if (!lattice) return;
  if (lattice->rows() != P.rows() || lattice->cols() != P.cols()) {
    throw Error(ErrorKind::EmptyLatticePosition, "lattice shape does not match emissions");
  }
  for (Eigen::Index i = 0; i < lattice->rows(); ++i) {
    if (!lattice->row(i).any()) throw Error(ErrorKind::EmptyLatticePosition, "lattice position with no allowed label");
  }
}

}  // namespace detail

/// Score of one label sequence: start and end transitions, inner
/// transitions, and per-token emissions.
template <typename DP, typename DT>
typename DP::Scalar sequence_score(const Eigen::MatrixBase<DP>& P, const Eigen::MatrixBase<DT>& Phi,
                                   std::span<const int> y) {
  using Scalar = typename DP::Scalar;
  const Eigen::Index n = P.rows();
  const Eigen::Index k = P.cols();
  if (static_cast<Eigen::Index>(y.size()) != n) throw Error(ErrorKind::LabelOutOfRange, "label sequence length differs from n");
  for (int label : y) {
    if (label < 0 || label >= k) throw Error(ErrorKind::LabelOutOfRange, "label index outside vocabulary");
  }
  if (n == 0) return Scalar(0);
  Scalar s = Phi(k, y[0]);
  for (Eigen::Index i = 0; i + 1 < n; ++i) s += Phi(y[i], y[i + 1]);
  s += Phi(y[n - 1], k + 1);
  for (Eigen::Index i = 0; i < n; ++i) s += P(i, y[i]);
  return s;
}

/// Log-space forward algorithm. Alpha entries of disallowed cells are kMasked.
template <typename DP, typename DT>
MatrixX<typename DP::Scalar> forward_scores(const Eigen::MatrixBase<DP>& P, const Eigen::MatrixBase<DT>& Phi,
                                            const LabelMask* lattice, const TransitionMask* transitions) {
  using Scalar = typename DP::Scalar;
  const Eigen::Index n = P.rows();
  const Eigen::Index k = P.cols();
  MatrixX<Scalar> alpha = MatrixX<Scalar>::Constant(n, k, Scalar(kMasked));
  std::vector<char> live(static_cast<std::size_t>(n * k), 0);
  auto is_live = [&](Eigen::Index i, Eigen::Index y) { return live[static_cast<std::size_t>(i * k + y)] != 0; };
  for (Eigen::Index y = 0; y < k; ++y) {
    if (detail::allowed(lattice, 0, y) && detail::transition_allowed(transitions, k, y)) {
      alpha(0, y) = Phi(k, y) + P(0, y);
      live[static_cast<std::size_t>(y)] = 1;
    }
  }
  for (Eigen::Index i = 1; i < n; ++i) {
    for (Eigen::Index b = 0; b < k; ++b) {
      if (!detail::allowed(lattice, i, b)) continue;
      detail::LogSumExp<Scalar> acc;
      for (Eigen::Index a = 0; a < k; ++a) {
        if (is_live(i - 1, a) && detail::transition_allowed(transitions, a, b)) acc.add(alpha(i - 1, a) + Phi(a, b));
      }
      if (acc.empty()) continue;
      alpha(i, b) = acc.value() + P(i, b);
      live[static_cast<std::size_t>(i * k + b)] = 1;
    }
  }
  return alpha;
}

/// log of the summed exp-score over every sequence (lattice == nullptr) or
/// over the lattice-consistent sequences.
template <typename DP, typename DT>
typename DP::Scalar log_partition(const Eigen::MatrixBase<DP>& P, const Eigen::MatrixBase<DT>& Phi,
                                  const LabelMask* lattice = nullptr, const TransitionMask* transitions = nullptr) {
  using Scalar = typename DP::Scalar;
  detail::check_lattice(P, lattice);
  const Eigen::Index n = P.rows();
  const Eigen::Index k = P.cols();
  if (n == 0) return Scalar(0);
  const auto alpha = forward_scores(P, Phi, lattice, transitions);
  detail::LogSumExp<Scalar> acc;
  for (Eigen::Index y = 0; y < k; ++y) {
    if (alpha(n - 1, y) > Scalar(kMasked) && detail::transition_allowed(transitions, y, k + 1)) acc.add(alpha(n - 1, y) + Phi(y, k + 1));
  }
  return acc.value();
}

template <typename Scalar>
struct Marginals {
  Scalar log_z = 0;
  MatrixX<Scalar> labels;       // n x K, d log Z / d P
  MatrixX<Scalar> transitions;  // (K+2) x (K+2), d log Z / d Phi
};

/// Forward-backward; marginals are the gradients of log_partition.
template <typename DP, typename DT>
Marginals<typename DP::Scalar> marginals(const Eigen::MatrixBase<DP>& P, const Eigen::MatrixBase<DT>& Phi,
                                         const LabelMask* lattice = nullptr,
                                         const TransitionMask* transitions = nullptr) {
  using Scalar = typename DP::Scalar;
  detail::check_lattice(P, lattice);
  const Eigen::Index n = P.rows();
  const Eigen::Index k = P.cols();
  Marginals<Scalar> m;
  m.labels = MatrixX<Scalar>::Zero(n, k);
  m.transitions = MatrixX<Scalar>::Zero(k + 2, k + 2);
  if (n == 0) return m;
  const auto alpha = forward_scores(P, Phi, lattice, transitions);
  const Scalar masked(kMasked);

  MatrixX<Scalar> beta = MatrixX<Scalar>::Constant(n, k, masked);
  for (Eigen::Index y = 0; y < k; ++y) {
    if (detail::allowed(lattice, n - 1, y) && detail::transition_allowed(transitions, y, k + 1)) beta(n - 1, y) = Phi(y, k + 1);
  }
  for (Eigen::Index i = n - 2; i >= 0; --i) {
    for (Eigen::Index a = 0; a < k; ++a) {
      if (!detail::allowed(lattice, i, a)) continue;
      detail::LogSumExp<Scalar> acc;
      for (Eigen::Index b = 0; b < k; ++b) {
        if (beta(i + 1, b) > masked && detail::transition_allowed(transitions, a, b)) acc.add(Phi(a, b) + P(i + 1, b) + beta(i + 1, b));
      }
      if (!acc.empty()) beta(i, a) = acc.value();
    }
  }

  detail::LogSumExp<Scalar> z;
  for (Eigen::Index y = 0; y < k; ++y) {
    if (alpha(n - 1, y) > masked && beta(n - 1, y) > masked) z.add(alpha(n - 1, y) + beta(n - 1, y));
  }
  m.log_z = z.value();
  auto live = [&](Eigen::Index i, Eigen::Index y) { return alpha(i, y) > masked && beta(i, y) > masked; };

  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index y = 0; y < k; ++y) {
      if (live(i, y)) m.labels(i, y) = std::exp(alpha(i, y) + beta(i, y) - m.log_z);
    }
  }
  for (Eigen::Index y = 0; y < k; ++y) {
    m.transitions(k, y) = m.labels(0, y);
    m.transitions(y, k + 1) = m.labels(n - 1, y);
  }
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    for (Eigen::Index a = 0; a < k; ++a) {
      if (!live(i, a)) continue;
      for (Eigen::Index b = 0; b < k; ++b) {
        if (!live(i + 1, b) || !detail::transition_allowed(transitions, a, b)) continue;
        m.transitions(a, b) += std::exp(alpha(i, a) + Phi(a, b) + P(i + 1, b) + beta(i + 1, b) - m.log_z);
      }
    }
  }
  return m;
}

/// log Z(all) - log Z(lattice); non-negative.
template <typename DP, typename DT>
typename DP::Scalar fuzzy_nll(const Eigen::MatrixBase<DP>& P, const Eigen::MatrixBase<DT>& Phi,
                              const LabelMask& lattice, const TransitionMask* transitions = nullptr) {
  return log_partition(P, Phi, nullptr, transitions) - log_partition(P, Phi, &lattice, transitions);
}

template <typename Scalar>
struct ViterbiResult {
  std::vector<int> labels;
  Scalar score = 0;
};

/// Highest-scoring sequence. Among equal scores, the sequence with the
/// smaller label at the latest differing position wins.
template <typename DP, typename DT>
ViterbiResult<typename DP::Scalar> viterbi(const Eigen::MatrixBase<DP>& P, const Eigen::MatrixBase<DT>& Phi,
                                           const TransitionMask* transitions = nullptr) {
  using Scalar = typename DP::Scalar;
  const Eigen::Index n = P.rows();
  const Eigen::Index k = P.cols();
  ViterbiResult<Scalar> r;
  if (n == 0) return r;
  const Scalar masked(kMasked);
  MatrixX<Scalar> delta = MatrixX<Scalar>::Constant(n, k, masked);
  Eigen::MatrixXi back = Eigen::MatrixXi::Zero(n, k);
  for (Eigen::Index y = 0; y < k; ++y) {
    if (detail::transition_allowed(transitions, k, y)) delta(0, y) = Phi(k, y) + P(0, y);
  }
  for (Eigen::Index i = 1; i < n; ++i) {
    for (Eigen::Index b = 0; b < k; ++b) {
      bool found = false;
      Scalar best = masked;
      int arg = 0;
      for (Eigen::Index a = 0; a < k; ++a) {
        if (delta(i - 1, a) <= masked || !detail::transition_allowed(transitions, a, b)) continue;
        const Scalar s = delta(i - 1, a) + Phi(a, b);
        if (!found || s > best) {
          found = true;
          best = s;
          arg = static_cast<int>(a);
        }
      }
      if (found) {
        delta(i, b) = best + P(i, b);
        back(i, b) = arg;
      }
    }
  }
  bool found = false;
  int last = 0;
  for (Eigen::Index y = 0; y < k; ++y) {
    if (delta(n - 1, y) <= masked || !detail::transition_allowed(transitions, y, k + 1)) continue;
    const Scalar s = delta(n - 1, y) + Phi(y, k + 1);
    if (!found || s > r.score) {
      found = true;
      r.score = s;
      last = static_cast<int>(y);
    }
  }
  r.labels.assign(static_cast<std::size_t>(n), 0);
  r.labels[static_cast<std::size_t>(n - 1)] = last;
  for (Eigen::Index i = n - 1; i > 0; --i) {
    r.labels[static_cast<std::size_t>(i - 1)] = back(i, r.labels[static_cast<std::size_t>(i)]);
  }
  return r;
}

/// Transitions that keep IOBES sequences well formed (no O->I, B-x->B, etc.).
TransitionMask structural_transitions(const IobesVocab& vocab);

/// Well-formed B..E runs of one type and S labels become mentions; anything
/// else is dropped.
std::vector<Mention> iobes_to_mentions(std::span<const int> labels, const IobesVocab& vocab);

/// Same rule over textual labels such as "B-Disease"; unrecognized labels
/// count as O.
std::vector<Mention> iobes_to_mentions(std::span<const std::string> labels);

/// Renders non-overlapping mentions as IOBES label strings.
std::vector<std::string> mentions_to_iobes(std::span<const Mention> mentions, std::size_t n);

/// Tape op: fuzzy_nll with gradients (unconstrained minus constrained
/// marginals) flowing to emissions and transitions.
nn::Var fuzzy_nll(nn::Tape& tape, const nn::Var& emissions, const nn::Var& transitions, const LabelMask& lattice,
                  const TransitionMask* structural = nullptr);

}  // namespace autoner::crf
