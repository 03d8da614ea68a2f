#include "autoner/config.hpp"

#include "autoner/error.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>

namespace autoner {
namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

Error config_error(const std::string& what) { return Error(ErrorKind::ConfigError, what); }

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const auto* first = value.data();
  const auto* last = value.data() + value.size();
  if constexpr (std::is_floating_point_v<T>) {
    char* end = nullptr;
    out = static_cast<T>(std::strtod(value.c_str(), &end));
    if (value.empty() || end != value.c_str() + value.size()) throw config_error(key + ": expected a number, got '" + value + "'");
  } else {
    auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc() || ptr != last) throw config_error(key + ": expected an integer, got '" + value + "'");
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "1" || value == "true" || value == "on" || value == "yes") return true;
  if (value == "0" || value == "false" || value == "off" || value == "no") return false;
  throw config_error(key + ": expected a boolean, got '" + value + "'");
}

}  // namespace

KeyValues parse_key_values(std::istream& in) {
  KeyValues kv;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw config_error("config line " + std::to_string(line_no) + ": expected key = value");
    auto key = trim(line.substr(0, eq));
    if (key.empty()) throw config_error("config line " + std::to_string(line_no) + ": empty key");
    kv[key] = trim(line.substr(eq + 1));
  }
  return kv;
}

KeyValues read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file " + path.string());
  return parse_key_values(in);
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "corpus", "dictionary", "phrases", "embeddings", "dev", "test", "gold", "checkpoint", "output", "log",
      "embedding_dim", "subsample", "model", "epochs", "seed", "batch_size", "lr", "momentum", "lr_shrink",
      "patience", "clip", "dropout", "hidden_dim", "min_lr", "tailor", "multi_threshold", "single_threshold",
      "break_threshold", "structural_transitions", "break_bias"};
  return keys;
}

RunConfig apply_key_values(RunConfig c, const KeyValues& kv) {
  const auto& keys = config_keys();
  for (const auto& [key, value] : kv) {
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) throw config_error("unknown config key '" + key + "'");
    if (key == "corpus") c.corpus = value;
    else if (key == "dictionary") c.dictionary = value;
    else if (key == "phrases") c.phrases = value;
    else if (key == "embeddings") c.embeddings = value;
    else if (key == "dev") c.dev = value;
    else if (key == "test") c.test = value;
    else if (key == "gold") c.gold = value;
    else if (key == "checkpoint") c.checkpoint = value;
    else if (key == "output") c.output = value;
    else if (key == "log") c.log = value;
    else if (key == "embedding_dim") c.embedding_dim = parse_number<Eigen::Index>(key, value);
    else if (key == "subsample") c.subsample = parse_number<std::size_t>(key, value);
    else if (key == "model") {
      c.train.model_kind = parse_model_kind(value);
      c.model_kind_set = true;
    }
    else if (key == "epochs") c.train.max_epochs = parse_number<int>(key, value);
    else if (key == "seed") c.train.seed = parse_number<std::uint64_t>(key, value);
    else if (key == "batch_size") c.train.batch_size = parse_number<int>(key, value);
    else if (key == "lr") c.train.initial_lr = parse_number<double>(key, value);
    else if (key == "momentum") c.train.momentum = parse_number<double>(key, value);
    else if (key == "lr_shrink") c.train.lr_shrink = parse_number<double>(key, value);
    else if (key == "patience") c.train.patience_rounds = parse_number<int>(key, value);
    else if (key == "clip") c.train.grad_clip = parse_number<double>(key, value);
    else if (key == "dropout") c.train.dropout = parse_number<double>(key, value);
    else if (key == "hidden_dim") c.train.hidden_dim = parse_number<Eigen::Index>(key, value);
    else if (key == "min_lr") c.train.min_lr = parse_number<double>(key, value);
    else if (key == "tailor") c.tailor = parse_bool(key, value);
    else if (key == "multi_threshold") c.multi_threshold = parse_number<double>(key, value);
    else if (key == "single_threshold") c.single_threshold = parse_number<double>(key, value);
    else if (key == "break_threshold") c.train.break_threshold = parse_number<double>(key, value);
    else if (key == "structural_transitions") c.train.structural_transitions = parse_bool(key, value);
    else if (key == "break_bias") c.train.break_bias = parse_bool(key, value);
  }
  auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!in_unit(c.multi_threshold) || !in_unit(c.single_threshold)) throw config_error("phrase thresholds must lie in [0,1]");
  return c;
}

void require_file(const std::filesystem::path& path, const std::string& key) {
  if (path.empty()) throw config_error("missing required setting '" + key + "'");
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) throw config_error(key + ": no such file " + path.string());
}

}  // namespace autoner
