#include "autoner/model.hpp"

#include "autoner/autoner_head.hpp"
#include "autoner/error.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

namespace autoner {

const char* to_string(ModelKind kind) { return kind == ModelKind::Fuzzy ? "fuzzy" : "autoner"; }

ModelKind parse_model_kind(const std::string& name) {
  if (name == "fuzzy") return ModelKind::Fuzzy;
  if (name == "autoner") return ModelKind::AutoNer;
  throw Error(ErrorKind::ConfigError, "model kind must be 'fuzzy' or 'autoner', got '" + name + "'");
}

TrainingExample make_example(const AnnotatedSentence& ann, const std::vector<std::string>& types,
                             const EmbeddingTable& embeddings) {
  return TrainingExample{nn::embed(ann.sentence, embeddings), build_iobes_lattice(ann, types).mask(),
                         build_tie_break(ann, types)};
}

Model::Model(ModelConfig config, std::uint64_t seed) : config_(std::move(config)) {
  nn::Rng rng(seed);
  const Eigen::Index h = config_.hidden_dim;
  nn::make_bilstm(params_, "lstm", config_.input_dim, h, rng);
  if (config_.kind == ModelKind::Fuzzy) {
    const int k = vocab().size();
    params_.add("crf.emit.w", nn::glorot_uniform(2 * h, k, rng));
    params_.add("crf.emit.b", nn::Matrix::Zero(1, k));
    params_.add("crf.transitions", nn::Matrix::Zero(k + 2, k + 2));
  } else {
    params_.add("tob.break.w", nn::glorot_uniform(4 * h, 1, rng));
    if (config_.break_bias) params_.add("tob.break.b", nn::Matrix::Zero(1, 1));
    params_.add("tob.type.w", nn::glorot_uniform(4 * h, type_count(), rng));
  }
  bind();
}

Model::Model(ModelConfig config, nn::ParamStore params) : config_(std::move(config)), params_(std::move(params)) {
  bind();
}

Model::Model(const Model& other) : Model(other.config_, other.params_.clone()) {}

Model& Model::operator=(const Model& other) {
  if (this != &other) *this = Model(other);
  return *this;
}

void Model::bind() {
  lstm_ = nn::bind_bilstm(params_, "lstm");
  if (lstm_.input_dim != config_.input_dim || lstm_.hidden_dim != config_.hidden_dim) {
    throw Error(ErrorKind::BadCheckpoint, "parameter shapes disagree with model header");
  }
  if (config_.kind == ModelKind::Fuzzy && config_.structural_transitions) {
    structural_ = crf::structural_transitions(vocab());
  }
}

nn::Var Model::loss(nn::Tape& tape, const TrainingExample& ex, double dropout, bool training, nn::Rng& rng) const {
  const auto n = static_cast<int>(ex.embedded.rows());
  if (n == 0) return nullptr;
  const auto x = tape.constant(ex.embedded);
  const auto hidden = nn::bilstm_forward(tape, x, lstm_, dropout, training, rng);

  if (config_.kind == ModelKind::Fuzzy) {
    const auto emissions = nn::add_row(tape, nn::matmul(tape, hidden, params_.get("crf.emit.w")), params_.get("crf.emit.b"));
    const crf::TransitionMask* mask = structural_.size() ? &structural_ : nullptr;
    return crf::fuzzy_nll(tape, emissions, params_.get("crf.transitions"), ex.lattice, mask);
  }

  nn::Var total;
  const auto& tb = ex.tie_break;
  const bool any_gap = std::any_of(tb.gaps.begin(), tb.gaps.end(), [](GapLabel g) { return g != GapLabel::Unknown; });
  if (any_gap) {
    std::vector<int> left(static_cast<std::size_t>(n - 1));
    std::iota(left.begin(), left.end(), 0);
    std::vector<int> right(left.size());
    std::iota(right.begin(), right.end(), 1);
    auto logits = nn::matmul(tape, nn::gather_pairs(tape, hidden, left, right), params_.get("tob.break.w"));
    if (config_.break_bias) logits = nn::add_row(tape, logits, params_.get("tob.break.b"));
    total = tob::span_loss(tape, logits, tb.gaps);
  }
  if (!tb.supervision_spans.empty()) {
    std::vector<int> first, last;
    std::vector<std::vector<int>> sets;
    for (const auto& s : tb.supervision_spans) {
      first.push_back(s.start);
      last.push_back(s.end - 1);
      sets.push_back(s.types);
    }
    const auto logits = nn::matmul(tape, nn::gather_pairs(tape, hidden, first, last), params_.get("tob.type.w"));
    const auto type_term = tob::type_loss(tape, logits, sets);
    total = total ? nn::add(tape, total, type_term) : type_term;
  }
  return total;
}

nn::Matrix Model::features(const nn::Matrix& embedded) const {
  nn::Tape tape;
  nn::Rng unused(0);
  return nn::bilstm_forward(tape, tape.constant(embedded), lstm_, 0.0, false, unused)->value;
}

std::vector<int> Model::viterbi_labels(const nn::Matrix& embedded) const {
  if (config_.kind != ModelKind::Fuzzy) throw Error(ErrorKind::CheckpointModelKindMismatch, "viterbi needs a fuzzy model");
  if (embedded.rows() == 0) return {};
  const nn::Matrix emissions =
      (features(embedded) * params_.get("crf.emit.w")->value).rowwise() + params_.get("crf.emit.b")->value.row(0);
  const crf::TransitionMask* mask = structural_.size() ? &structural_ : nullptr;
  return crf::viterbi(emissions, params_.get("crf.transitions")->value, mask).labels;
}

std::vector<double> Model::break_probabilities(const nn::Matrix& embedded) const {
  if (config_.kind != ModelKind::AutoNer) throw Error(ErrorKind::CheckpointModelKindMismatch, "break scores need an autoner model");
  const Eigen::Index n = embedded.rows();
  if (n < 2) return {};
  const nn::Matrix h = features(embedded);
  const Eigen::Index w = h.cols();
  const auto& weights = params_.get("tob.break.w")->value;
  const double bias = config_.break_bias ? params_.get("tob.break.b")->value(0, 0) : 0.0;
  std::vector<double> probs;
  probs.reserve(static_cast<std::size_t>(n - 1));
  Eigen::RowVectorXd u(2 * w);
  for (Eigen::Index i = 1; i < n; ++i) {
    u << h.row(i - 1), h.row(i);
    probs.push_back(tob::break_probability(u, weights, bias));
  }
  return probs;
}

std::vector<Mention> Model::predict(const nn::Matrix& embedded, double break_threshold, DecodeStats* stats) const {
  if (config_.kind == ModelKind::Fuzzy) return crf::iobes_to_mentions(viterbi_labels(embedded), vocab());

  const Eigen::Index n = embedded.rows();
  if (n == 0) return {};
  const nn::Matrix h = features(embedded);
  const Eigen::Index w = h.cols();
  const auto& break_w = params_.get("tob.break.w")->value;
  const double bias = config_.break_bias ? params_.get("tob.break.b")->value(0, 0) : 0.0;
  std::vector<double> probs;
  Eigen::RowVectorXd u(2 * w);
  for (Eigen::Index i = 1; i < n; ++i) {
    u << h.row(i - 1), h.row(i);
    probs.push_back(tob::break_probability(u, break_w, bias));
  }
  if (stats) stats->gaps_scored += probs.size();

  const auto& type_w = params_.get("tob.type.w")->value;
  const int none = type_count() - 1;
  std::vector<Mention> out;
  for (const auto& [start, end] : tob::candidate_spans(probs, break_threshold)) {
    Eigen::RowVectorXd v(2 * w);
    v << h.row(start), h.row(end - 1);
    const Eigen::VectorXd logits = type_w.transpose() * v.transpose();
    Eigen::Index best = 0;
    for (Eigen::Index j = 1; j < logits.size(); ++j) {
      if (logits[j] > logits[best]) best = j;
    }
    if (stats) ++stats->spans_typed;
    if (best != none) out.push_back(Mention{start, end, config_.types[static_cast<std::size_t>(best)]});
  }
  return out;
}

void Model::write(std::ostream& out) const {
  out << "autoner-checkpoint 1\n";
  out << "kind " << to_string(config_.kind) << '\n';
  out << "types " << config_.types.size();
  for (const auto& t : config_.types) out << ' ' << t;
  out << '\n';
  out << "input_dim " << config_.input_dim << '\n';
  out << "hidden_dim " << config_.hidden_dim << '\n';
  out << "break_bias " << (config_.break_bias ? 1 : 0) << '\n';
  out << "structural_transitions " << (config_.structural_transitions ? 1 : 0) << '\n';
  params_.write(out);
}

void Model::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot write checkpoint " + path.string());
  write(out);
}

Model Model::read(std::istream& in) {
  auto bad = [](const std::string& why) { return Error(ErrorKind::BadCheckpoint, "checkpoint: " + why); };
  std::string key, value;
  int version = 0;
  if (!(in >> key >> version) || key != "autoner-checkpoint" || version != 1) throw bad("missing header");
  ModelConfig cfg;
  std::size_t count = 0;
  if (!(in >> key >> value) || key != "kind") throw bad("missing kind");
  try {
    cfg.kind = parse_model_kind(value);
  } catch (const Error&) {
    throw bad("unknown model kind " + value);
  }
  if (!(in >> key >> count) || key != "types") throw bad("missing types");
  cfg.types.resize(count);
  for (auto& t : cfg.types) {
    if (!(in >> t)) throw bad("truncated type list");
  }
  int flag = 0;
  if (!(in >> key >> cfg.input_dim) || key != "input_dim") throw bad("missing input_dim");
  if (!(in >> key >> cfg.hidden_dim) || key != "hidden_dim") throw bad("missing hidden_dim");
  if (!(in >> key >> flag) || key != "break_bias") throw bad("missing break_bias");
  cfg.break_bias = flag != 0;
  if (!(in >> key >> flag) || key != "structural_transitions") throw bad("missing structural_transitions");
  cfg.structural_transitions = flag != 0;
  auto params = nn::ParamStore::read(in);
  try {
    return Model(std::move(cfg), std::move(params));
  } catch (const std::out_of_range& e) {
    throw bad(e.what());
  }
}

Model Model::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open checkpoint " + path.string());
  return read(in);
}

}  // namespace autoner
