#include "autoner/lstm.hpp"

#include <cmath>

namespace autoner::nn {
namespace {

LstmParams make_direction(ParamStore& store, const std::string& prefix, Eigen::Index d, Eigen::Index h, Rng& rng) {
  LstmParams p;
  p.input_weights = store.add(prefix + ".wx", glorot_uniform(d, 4 * h, rng));
  p.recurrent_weights = store.add(prefix + ".wh", glorot_uniform(h, 4 * h, rng));
  Matrix b = Matrix::Zero(1, 4 * h);
  b.block(0, h, 1, h).setOnes();
  p.bias = store.add(prefix + ".b", std::move(b));
  return p;
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Cached activations of one direction, rows in processing order.
struct DirectionCache {
  Matrix gates;    // n x 4h, post-activation (i, f, o, g)
  Matrix cells;    // n x h
  Matrix hiddens;  // n x h
};

DirectionCache run_direction(const Matrix& x, const LstmParams& p, bool reverse) {
  const Eigen::Index n = x.rows();
  const Eigen::Index h = p.recurrent_weights->value.rows();
  DirectionCache c{Matrix(n, 4 * h), Matrix(n, h), Matrix(n, h)};
  const Matrix zx = (x * p.input_weights->value).rowwise() + p.bias->value.row(0);
  Eigen::RowVectorXd h_prev = Eigen::RowVectorXd::Zero(h);
  Eigen::RowVectorXd c_prev = Eigen::RowVectorXd::Zero(h);
  for (Eigen::Index step = 0; step < n; ++step) {
    const Eigen::Index t = reverse ? n - 1 - step : step;
    Eigen::RowVectorXd z = zx.row(t) + h_prev * p.recurrent_weights->value;
    for (Eigen::Index k = 0; k < 3 * h; ++k) z[k] = sigmoid(z[k]);
    z.tail(h) = z.tail(h).array().tanh().matrix();
    const auto i = z.segment(0, h).array();
    const auto f = z.segment(h, h).array();
    const auto o = z.segment(2 * h, h).array();
    const auto g = z.segment(3 * h, h).array();
    c_prev = (f * c_prev.array() + i * g).matrix();
    h_prev = (o * c_prev.array().tanh()).matrix();
    c.gates.row(step) = z;
    c.cells.row(step) = c_prev;
    c.hiddens.row(step) = h_prev;
  }
  return c;
}

// Backpropagation through time for one direction. `d_out` holds gradients of
// the direction's outputs in sentence order.
void backprop_direction(const Matrix& x, const LstmParams& p, const DirectionCache& c, const Matrix& d_out,
                        bool reverse, Matrix* d_x) {
  const Eigen::Index n = x.rows();
  const Eigen::Index h = p.recurrent_weights->value.rows();
  Matrix dz(n, 4 * h);
  Matrix h_prev_rows = Matrix::Zero(n, h);
  Eigen::RowVectorXd dh_next = Eigen::RowVectorXd::Zero(h);
  Eigen::RowVectorXd dc_next = Eigen::RowVectorXd::Zero(h);
  for (Eigen::Index step = n - 1; step >= 0; --step) {
    const Eigen::Index t = reverse ? n - 1 - step : step;
    const auto z = c.gates.row(step).array();
    const auto i = z.segment(0, h);
    const auto f = z.segment(h, h);
    const auto o = z.segment(2 * h, h);
    const auto g = z.segment(3 * h, h);
    const Eigen::ArrayXXd c_prev =
        step > 0 ? Eigen::ArrayXXd(c.cells.row(step - 1).array()) : Eigen::ArrayXXd::Zero(1, h);
    if (step > 0) h_prev_rows.row(step) = c.hiddens.row(step - 1);

    const Eigen::ArrayXXd tc = c.cells.row(step).array().tanh();
    const Eigen::ArrayXXd dh = d_out.row(t).array() + dh_next.array();
    const Eigen::ArrayXXd dc = dh * o * (1.0 - tc.square()) + dc_next.array();
    dz.block(step, 0, 1, h) = (dc * g * i * (1.0 - i)).matrix();
    dz.block(step, h, 1, h) = (dc * c_prev * f * (1.0 - f)).matrix();
    dz.block(step, 2 * h, 1, h) = (dh * tc * o * (1.0 - o)).matrix();
    dz.block(step, 3 * h, 1, h) = (dc * i * (1.0 - g.square())).matrix();
    dc_next = (dc * f).matrix();
    dh_next = dz.row(step) * p.recurrent_weights->value.transpose();
  }
  // dz rows are in processing order; realign x rows to match.
  Matrix x_steps = reverse ? Matrix(x.colwise().reverse()) : x;
  if (p.input_weights->requires_grad) p.input_weights->grad.noalias() += x_steps.transpose() * dz;
  if (p.recurrent_weights->requires_grad) p.recurrent_weights->grad.noalias() += h_prev_rows.transpose() * dz;
  if (p.bias->requires_grad) p.bias->grad += dz.colwise().sum();
  if (d_x) {
    Matrix dx = dz * p.input_weights->value.transpose();
    if (reverse) dx = dx.colwise().reverse().eval();
    *d_x += dx;
  }
}

}  // namespace

BiLstmParams make_bilstm(ParamStore& store, const std::string& prefix, Eigen::Index input_dim,
                         Eigen::Index hidden_dim, Rng& rng) {
  BiLstmParams p{input_dim, hidden_dim, {}, {}};
  p.forward = make_direction(store, prefix + ".fwd", input_dim, hidden_dim, rng);
  p.backward = make_direction(store, prefix + ".bwd", input_dim, hidden_dim, rng);
  return p;
}

BiLstmParams bind_bilstm(const ParamStore& store, const std::string& prefix) {
  BiLstmParams p;
  p.forward = {store.get(prefix + ".fwd.wx"), store.get(prefix + ".fwd.wh"), store.get(prefix + ".fwd.b")};
  p.backward = {store.get(prefix + ".bwd.wx"), store.get(prefix + ".bwd.wh"), store.get(prefix + ".bwd.b")};
  p.input_dim = p.forward.input_weights->value.rows();
  p.hidden_dim = p.forward.recurrent_weights->value.rows();
  return p;
}

Matrix embed(const Sentence& sentence, const EmbeddingTable& table) {
  Matrix x(static_cast<Eigen::Index>(sentence.size()), table.dimension());
  for (std::size_t i = 0; i < sentence.size(); ++i) {
    x.row(static_cast<Eigen::Index>(i)) = table.lookup(sentence[i].normalized).transpose();
  }
  return x;
}

Var bilstm_forward(Tape& tape, const Var& x, const BiLstmParams& params, double dropout_rate, bool training,
                   Rng& rng) {
  const Eigen::Index h = params.hidden_dim;
  auto fwd = std::make_shared<DirectionCache>(run_direction(x->value, params.forward, false));
  auto bwd = std::make_shared<DirectionCache>(run_direction(x->value, params.backward, true));
  const Eigen::Index n = x->value.rows();
  Matrix out(n, 2 * h);
  out.leftCols(h) = fwd->hiddens;
  out.rightCols(h) = bwd->hiddens.colwise().reverse();

  const Var& wf = params.forward.input_weights;
  auto y = tape.output(std::move(out), {&x, &wf});
  y->requires_grad = true;
  tape.record([x, params, fwd, bwd, h, o = y.get()] {
    Matrix d_x = Matrix::Zero(x->value.rows(), x->value.cols());
    Matrix* dx_ptr = x->requires_grad ? &d_x : nullptr;
    backprop_direction(x->value, params.forward, *fwd, o->grad.leftCols(h), false, dx_ptr);
    backprop_direction(x->value, params.backward, *bwd, o->grad.rightCols(h), true, dx_ptr);
    if (dx_ptr) x->grad += d_x;
  });
  if (training && dropout_rate > 0.0) return dropout(tape, y, dropout_rate, rng);
  return y;
}

}  // namespace autoner::nn
