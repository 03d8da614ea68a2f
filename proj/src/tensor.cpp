#include "autoner/tensor.hpp"

#include "autoner/error.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>

namespace autoner::nn {

Var make_var(Matrix value, bool requires_grad) {
  auto node = std::make_shared<Node>();
  node->grad = Matrix::Zero(value.rows(), value.cols());
  node->value = std::move(value);
  node->requires_grad = requires_grad;
  return node;
}

Var Tape::constant(Matrix value) { return make_var(std::move(value), false); }

Var Tape::output(Matrix value, std::initializer_list<const Var*> parents) {
  bool needs = false;
  for (const Var* p : parents) needs = needs || (*p)->requires_grad;
  auto v = make_var(std::move(value), needs);
  outputs_.push_back(v);
  owned_.insert(v.get());
  return v;
}

void Tape::backward(const Var& loss) {
  if (ops_.empty() || !loss || !owned_.count(loss.get())) {
    throw Error(ErrorKind::BackwardWithoutForward, "backward called on a value not produced by this tape");
  }
  if (loss->value.size() != 1) throw Error(ErrorKind::BackwardWithoutForward, "backward needs a scalar loss");
  for (auto& v : outputs_) v->grad.setZero();
  loss->grad(0, 0) = 1.0;
  for (auto it = ops_.rbegin(); it != ops_.rend(); ++it) (*it)();
}

void Tape::clear() {
  ops_.clear();
  outputs_.clear();
  owned_.clear();
}

Var matmul(Tape& tape, const Var& a, const Var& b) {
  auto out = tape.output(a->value * b->value, {&a, &b});
  if (out->requires_grad) {
    tape.record([a, b, o = out.get()] {
      if (a->requires_grad) a->grad.noalias() += o->grad * b->value.transpose();
      if (b->requires_grad) b->grad.noalias() += a->value.transpose() * o->grad;
    });
  }
  return out;
}

Var add_row(Tape& tape, const Var& x, const Var& row) {
  auto out = tape.output(x->value.rowwise() + row->value.row(0), {&x, &row});
  if (out->requires_grad) {
    tape.record([x, row, o = out.get()] {
      if (x->requires_grad) x->grad += o->grad;
      if (row->requires_grad) row->grad += o->grad.colwise().sum();
    });
  }
  return out;
}

Var add(Tape& tape, const Var& a, const Var& b) {
  auto out = tape.output(a->value + b->value, {&a, &b});
  if (out->requires_grad) {
    tape.record([a, b, o = out.get()] {
      if (a->requires_grad) a->grad += o->grad;
      if (b->requires_grad) b->grad += o->grad;
    });
  }
  return out;
}

Var scale(Tape& tape, const Var& a, double factor) {
  auto out = tape.output(a->value * factor, {&a});
  if (out->requires_grad) {
    tape.record([a, factor, o = out.get()] { a->grad += o->grad * factor; });
  }
  return out;
}

Var sum(Tape& tape, const Var& x) {
  Matrix s(1, 1);
  s(0, 0) = x->value.sum();
  auto out = tape.output(std::move(s), {&x});
  if (out->requires_grad) {
    tape.record([x, o = out.get()] { x->grad.array() += o->grad(0, 0); });
  }
  return out;
}

Var dropout(Tape& tape, const Var& x, double rate, Rng& rng) {
  if (rate <= 0.0) return x;
  std::bernoulli_distribution keep(1.0 - rate);
  Matrix mask(x->value.rows(), x->value.cols());
  const double s = 1.0 / (1.0 - rate);
  for (Eigen::Index j = 0; j < mask.cols(); ++j) {
    for (Eigen::Index i = 0; i < mask.rows(); ++i) mask(i, j) = keep(rng) ? s : 0.0;
  }
  auto out = tape.output(x->value.cwiseProduct(mask), {&x});
  if (out->requires_grad) {
    tape.record([x, mask = std::move(mask), o = out.get()] { x->grad += o->grad.cwiseProduct(mask); });
  }
  return out;
}

Var gather_pairs(Tape& tape, const Var& x, std::span<const int> left, std::span<const int> right) {
  const Eigen::Index w = x->value.cols();
  const auto m = static_cast<Eigen::Index>(left.size());
  Matrix v(m, 2 * w);
  for (Eigen::Index r = 0; r < m; ++r) {
    v.row(r).head(w) = x->value.row(left[static_cast<std::size_t>(r)]);
    v.row(r).tail(w) = x->value.row(right[static_cast<std::size_t>(r)]);
  }
  auto out = tape.output(std::move(v), {&x});
  if (out->requires_grad) {
    tape.record([x, l = std::vector<int>(left.begin(), left.end()), rt = std::vector<int>(right.begin(), right.end()),
                 w, o = out.get()] {
      for (std::size_t r = 0; r < l.size(); ++r) {
        const auto row = static_cast<Eigen::Index>(r);
        x->grad.row(l[r]) += o->grad.row(row).head(w);
        x->grad.row(rt[r]) += o->grad.row(row).tail(w);
      }
    });
  }
  return out;
}

Var ParamStore::add(const std::string& name, Matrix init) {
  if (contains(name)) throw std::invalid_argument("duplicate parameter name: " + name);
  params_.emplace_back(name, make_var(std::move(init), true));
  return params_.back().second;
}

const Var& ParamStore::get(const std::string& name) const {
  for (const auto& [n, v] : params_) {
    if (n == name) return v;
  }
  throw std::out_of_range("no parameter named " + name);
}

bool ParamStore::contains(const std::string& name) const {
  for (const auto& p : params_) {
    if (p.first == name) return true;
  }
  return false;
}

void ParamStore::zero_grad() {
  for (auto& p : params_) p.second->grad.setZero();
}

ParamStore ParamStore::clone() const {
  ParamStore out;
  for (const auto& [n, v] : params_) out.add(n, v->value);
  return out;
}

void ParamStore::copy_values_from(const ParamStore& other) {
  for (auto& [n, v] : params_) v->value = other.get(n)->value;
}

void ParamStore::write(std::ostream& out) const {
  char buf[40];
  out << "params " << params_.size() << '\n';
  for (const auto& [n, v] : params_) {
    out << "param " << n << ' ' << v->value.rows() << ' ' << v->value.cols() << '\n';
    for (Eigen::Index i = 0; i < v->value.rows(); ++i) {
      for (Eigen::Index j = 0; j < v->value.cols(); ++j) {
        std::snprintf(buf, sizeof buf, "%a", v->value(i, j));
        out << (j ? " " : "") << buf;
      }
      out << '\n';
    }
  }
}

ParamStore ParamStore::read(std::istream& in) {
  auto bad = [](const std::string& why) { return Error(ErrorKind::BadCheckpoint, "checkpoint: " + why); };
  std::string word;
  std::size_t count = 0;
  if (!(in >> word >> count) || word != "params") throw bad("missing params header");
  ParamStore store;
  for (std::size_t p = 0; p < count; ++p) {
    std::string name;
    Eigen::Index rows = 0, cols = 0;
    if (!(in >> word >> name >> rows >> cols) || word != "param" || rows < 0 || cols < 0) throw bad("bad param header");
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
      for (Eigen::Index j = 0; j < cols; ++j) {
        std::string tok;
        if (!(in >> tok)) throw bad("truncated values for " + name);
        char* end = nullptr;
        m(i, j) = std::strtod(tok.c_str(), &end);
        if (end != tok.c_str() + tok.size()) throw bad("bad number in " + name);
      }
    }
    store.add(name, std::move(m));
  }
  return store;
}

bool ParamStore::values_equal(const ParamStore& other) const {
  if (params_.size() != other.params_.size()) return false;
  for (std::size_t i = 0; i < params_.size(); ++i) {
    if (params_[i].first != other.params_[i].first) return false;
    const auto& a = params_[i].second->value;
    const auto& b = other.params_[i].second->value;
    if (a.rows() != b.rows() || a.cols() != b.cols() || a != b) return false;
  }
  return true;
}

Matrix glorot_uniform(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  const double r = std::sqrt(6.0 / static_cast<double>(rows + cols));
  std::uniform_real_distribution<double> dist(-r, r);
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = dist(rng);
  }
  return m;
}

}  // namespace autoner::nn
