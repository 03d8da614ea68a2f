#pragma once

#include <Eigen/Dense>

#include <functional>
#include <iosfwd>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

namespace autoner::nn {

using Matrix = Eigen::MatrixXd;
using Rng = std::mt19937_64;

struct Node {
  Matrix value;
  Matrix grad;
  bool requires_grad = false;
};

/// Handle to a tensor; parameters and tape intermediates share this type.
using Var = std::shared_ptr<Node>;

Var make_var(Matrix value, bool requires_grad);

/// Records backward closures of a forward computation and replays them in
/// reverse. Parameter gradients accumulate across backward calls; tape
/// intermediates are re-zeroed each call.
class Tape {
 public:
  /// A constant input that never receives gradient.
  Var constant(Matrix value);

  /// Registers the output of an op. `parents` decide whether it needs grad.
  Var output(Matrix value, std::initializer_list<const Var*> parents);
  void record(std::function<void()> backward_fn) { ops_.push_back(std::move(backward_fn)); }

  /// Throws BackwardWithoutForward unless `loss` is a 1x1 output of this tape.
  void backward(const Var& loss);

  void clear();
  bool empty() const { return ops_.empty(); }

 private:
  std::vector<std::function<void()>> ops_;
  std::vector<Var> outputs_;
  std::unordered_set<const Node*> owned_;
};

Var matmul(Tape& tape, const Var& a, const Var& b);
/// x + row broadcast over every row of x.
Var add_row(Tape& tape, const Var& x, const Var& row);
Var add(Tape& tape, const Var& a, const Var& b);
Var scale(Tape& tape, const Var& a, double factor);
/// 1x1 sum of all entries.
Var sum(Tape& tape, const Var& x);
/// Inverted dropout: zeroes entries with probability `rate`, scales the rest
/// by 1/(1-rate). Identity when rate is zero.
Var dropout(Tape& tape, const Var& x, double rate, Rng& rng);
/// Row r of the output is [x(left[r]) , x(right[r])].
Var gather_pairs(Tape& tape, const Var& x, std::span<const int> left, std::span<const int> right);

/// Named parameters with gradient slots.
class ParamStore {
 public:
  Var add(const std::string& name, Matrix init);
  const Var& get(const std::string& name) const;
  bool contains(const std::string& name) const;

  const std::vector<std::pair<std::string, Var>>& items() const { return params_; }
  void zero_grad();
  /// Deep copy of parameter values (grads zeroed).
  ParamStore clone() const;
  void copy_values_from(const ParamStore& other);

  /// `param <name> <rows> <cols>` followed by hexfloat values, one row per
  /// line. Exact round trip.
  void write(std::ostream& out) const;
  static ParamStore read(std::istream& in);

  bool values_equal(const ParamStore& other) const;

 private:
  std::vector<std::pair<std::string, Var>> params_;
};

/// Uniform(-r, r) with r = sqrt(6 / (rows + cols)).
Matrix glorot_uniform(Eigen::Index rows, Eigen::Index cols, Rng& rng);

}  // namespace autoner::nn
