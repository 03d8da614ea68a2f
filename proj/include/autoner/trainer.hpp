#pragma once

#include "autoner/matcher.hpp"
#include "autoner/model.hpp"
#include "autoner/tensor.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace autoner {

struct TrainConfig {
  int batch_size = 10;
  double momentum = 0.9;
  double initial_lr = 0.05;
  /// Fraction removed from the learning rate on each stagnation window.
  double lr_shrink = 0.4;
  int patience_rounds = 5;
  double grad_clip = 5.0;
  double dropout = 0.5;
  int max_epochs = 50;
  double min_lr = 1e-4;
  std::uint64_t seed = 1;
  ModelKind model_kind = ModelKind::AutoNer;
  Eigen::Index hidden_dim = 50;
  bool break_bias = true;
  bool structural_transitions = false;
  double break_threshold = 0.5;
};

/// Throws ConfigError when a field is out of range.
void validate(const TrainConfig& cfg);

struct EvalResult {
  double precision = 0;
  double recall = 0;
  double f1 = 0;
  long true_positives = 0;
  long predicted = 0;
  long gold = 0;
};

/// Micro-averaged exact-match (start, end, type) evaluation.
EvalResult evaluate(std::span<const std::vector<Mention>> predicted, std::span<const std::vector<Mention>> gold);

/// SGD with momentum and global-norm gradient clipping.
class SgdMomentum {
 public:
  SgdMomentum(double momentum, double clip) : momentum_(momentum), clip_(clip) {}

  /// Clips, updates velocity and parameters, then zeroes gradients. Returns
  /// the pre-clipping gradient norm. Throws NonFiniteGradient.
  double step(nn::ParamStore& params, double lr);
  const nn::Matrix* velocity(const std::string& name) const;

 private:
  double momentum_;
  double clip_;
  std::map<std::string, nn::Matrix> velocity_;
};

/// Returns lr shrunk by (1 - lr_shrink) when the best dev F1 so far (first
/// occurrence) lies a positive multiple of patience_rounds entries back,
/// i.e. once per full window without a strictly better score.
double lr_schedule(std::span<const double> dev_f1_history, double lr, const TrainConfig& cfg);

struct DevExample {
  nn::Matrix embedded;
  std::vector<Mention> gold;
};

struct EpochLog {
  int epoch = 0;
  double train_loss = 0;
  EvalResult dev;
  double lr = 0;
};

/// `epoch,train_loss,dev_P,dev_R,dev_F1,lr`.
std::string format_log_line(const EpochLog& log);
inline constexpr const char* kLogHeader = "epoch,train_loss,dev_P,dev_R,dev_F1,lr";

struct TrainResult {
  Model best;
  double best_dev_f1 = 0;
  int best_epoch = 0;
  std::vector<EpochLog> log;
};

EvalResult evaluate_model(const Model& model, std::span<const DevExample> data, double break_threshold);

/// Mini-batch training with per-epoch dev evaluation; keeps the parameters
/// with the best dev F1. Throws SupervisionEmpty when no example carries a
/// match. `log_out`, when given, receives the CSV log as it is produced.
TrainResult train(std::span<const TrainingExample> examples, std::span<const DevExample> dev,
                  const std::vector<std::string>& types, const TrainConfig& cfg, std::ostream* log_out = nullptr);

}  // namespace autoner
