#include "autoner/trainer.hpp"

#include "autoner/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <set>

namespace autoner {

void validate(const TrainConfig& cfg) {
  auto fail = [](const std::string& what) { throw Error(ErrorKind::ConfigError, "invalid training config: " + what); };
  if (cfg.batch_size <= 0) fail("batch_size must be positive");
  if (!(cfg.momentum >= 0 && cfg.momentum < 1)) fail("momentum must be in [0,1)");
  if (!(cfg.initial_lr > 0)) fail("initial_lr must be positive");
  if (!(cfg.lr_shrink > 0 && cfg.lr_shrink < 1)) fail("lr_shrink must be in (0,1)");
  if (cfg.patience_rounds <= 0) fail("patience_rounds must be positive");
  if (!(cfg.grad_clip > 0)) fail("grad_clip must be positive");
  if (!(cfg.dropout >= 0 && cfg.dropout < 1)) fail("dropout must be in [0,1)");
  if (cfg.max_epochs <= 0) fail("max_epochs must be positive");
  if (cfg.hidden_dim <= 0) fail("hidden_dim must be positive");
  if (!(cfg.break_threshold > 0 && cfg.break_threshold < 1)) fail("break_threshold must be in (0,1)");
}

EvalResult evaluate(std::span<const std::vector<Mention>> predicted, std::span<const std::vector<Mention>> gold) {
  if (predicted.size() != gold.size()) throw Error(ErrorKind::LengthMismatch, "prediction and gold sentence counts differ");
  EvalResult r;
  for (std::size_t s = 0; s < gold.size(); ++s) {
    const std::set<Mention> truth(gold[s].begin(), gold[s].end());
    const std::set<Mention> guess(predicted[s].begin(), predicted[s].end());
    r.gold += static_cast<long>(truth.size());
    r.predicted += static_cast<long>(guess.size());
    for (const auto& m : guess) r.true_positives += static_cast<long>(truth.count(m));
  }
  r.precision = r.predicted ? static_cast<double>(r.true_positives) / static_cast<double>(r.predicted) : 0.0;
  r.recall = r.gold ? static_cast<double>(r.true_positives) / static_cast<double>(r.gold) : 0.0;
  r.f1 = r.precision + r.recall > 0 ? 2 * r.precision * r.recall / (r.precision + r.recall) : 0.0;
  return r;
}

double SgdMomentum::step(nn::ParamStore& params, double lr) {
  double sq = 0;
  for (const auto& [name, v] : params.items()) sq += v->grad.squaredNorm();
  const double norm = std::sqrt(sq);
  if (!std::isfinite(norm)) throw Error(ErrorKind::NonFiniteGradient, "gradient contains non-finite values");
  const double factor = norm > clip_ ? clip_ / norm : 1.0;
  for (const auto& [name, v] : params.items()) {
    auto it = velocity_.find(name);
    if (it == velocity_.end()) it = velocity_.emplace(name, nn::Matrix::Zero(v->value.rows(), v->value.cols())).first;
    it->second = momentum_ * it->second + factor * v->grad;
    v->value -= lr * it->second;
    v->grad.setZero();
  }
  return norm;
}

const nn::Matrix* SgdMomentum::velocity(const std::string& name) const {
  auto it = velocity_.find(name);
  return it == velocity_.end() ? nullptr : &it->second;
}

double lr_schedule(std::span<const double> history, double lr, const TrainConfig& cfg) {
  if (history.empty()) return lr;
  const auto best = std::max_element(history.begin(), history.end());
  const auto stale = static_cast<int>(history.end() - best) - 1;
  if (stale > 0 && stale % cfg.patience_rounds == 0) return lr * (1.0 - cfg.lr_shrink);
  return lr;
}

std::string format_log_line(const EpochLog& log) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%d,%.6f,%.6f,%.6f,%.6f,%.6g", log.epoch, log.train_loss, log.dev.precision,
                log.dev.recall, log.dev.f1, log.lr);
  return buf;
}

EvalResult evaluate_model(const Model& model, std::span<const DevExample> data, double break_threshold) {
  std::vector<std::vector<Mention>> predicted, gold;
  predicted.reserve(data.size());
  gold.reserve(data.size());
  for (const auto& ex : data) {
    predicted.push_back(model.predict(ex.embedded, break_threshold));
    gold.push_back(ex.gold);
  }
  return evaluate(predicted, gold);
}

namespace {

bool has_match(const TrainingExample& ex) {
  for (Eigen::Index i = 0; i < ex.lattice.rows(); ++i) {
    if (!ex.lattice(i, 0) || ex.lattice.row(i).count() > 1) return true;
  }
  return false;
}

}  // namespace

TrainResult train(std::span<const TrainingExample> examples, std::span<const DevExample> dev,
                  const std::vector<std::string>& types, const TrainConfig& cfg, std::ostream* log_out) {
  validate(cfg);
  if (examples.empty() || std::none_of(examples.begin(), examples.end(), has_match)) {
    throw Error(ErrorKind::SupervisionEmpty, "distant supervision produced no matches");
  }
  ModelConfig mc;
  mc.kind = cfg.model_kind;
  mc.types = types;
  mc.input_dim = examples.front().embedded.cols();
  mc.hidden_dim = cfg.hidden_dim;
  mc.break_bias = cfg.break_bias;
  mc.structural_transitions = cfg.structural_transitions;

  Model model(mc, cfg.seed);
  TrainResult result{model, -1.0, 0, {}};
  result.best.params().copy_values_from(model.params());

  nn::Rng rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  SgdMomentum optimizer(cfg.momentum, cfg.grad_clip);
  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> history;
  double lr = cfg.initial_lr;
  if (log_out) *log_out << kLogHeader << '\n';

  nn::Tape tape;
  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0;
    std::size_t counted = 0;
    for (std::size_t b = 0; b < order.size(); b += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t e = std::min(order.size(), b + static_cast<std::size_t>(cfg.batch_size));
      tape.clear();
      nn::Var batch_loss;
      std::size_t used = 0;
      for (std::size_t i = b; i < e; ++i) {
        auto l = model.loss(tape, examples[order[i]], cfg.dropout, true, rng);
        if (!l) continue;
        batch_loss = batch_loss ? nn::add(tape, batch_loss, l) : l;
        ++used;
      }
      if (!batch_loss) continue;
      batch_loss = nn::scale(tape, batch_loss, 1.0 / static_cast<double>(used));
      epoch_loss += batch_loss->value(0, 0) * static_cast<double>(used);
      counted += used;
      tape.backward(batch_loss);
      optimizer.step(model.params(), lr);
    }
    tape.clear();

    EpochLog entry;
    entry.epoch = epoch;
    entry.train_loss = counted ? epoch_loss / static_cast<double>(counted) : 0.0;
    entry.dev = evaluate_model(model, dev, cfg.break_threshold);
    entry.lr = lr;
    result.log.push_back(entry);
    if (log_out) *log_out << format_log_line(entry) << '\n' << std::flush;

    if (entry.dev.f1 > result.best_dev_f1) {
      result.best_dev_f1 = entry.dev.f1;
      result.best_epoch = epoch;
      result.best.params().copy_values_from(model.params());
    }
    history.push_back(entry.dev.f1);
    lr = lr_schedule(history, lr, cfg);
    if (lr < cfg.min_lr) break;
  }
  return result;
}

}  // namespace autoner
