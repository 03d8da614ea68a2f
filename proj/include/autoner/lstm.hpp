#pragma once

#include "autoner/corpus.hpp"
#include "autoner/tensor.hpp"

#include <string>

namespace autoner::nn {

/// One direction's gate parameters. Gate blocks along the columns are
/// ordered input, forget, output, cell.
struct LstmParams {
  Var input_weights;      // d x 4h
  Var recurrent_weights;  // h x 4h
  Var bias;               // 1 x 4h
};

struct BiLstmParams {
  Eigen::Index input_dim = 0;
  Eigen::Index hidden_dim = 0;
  LstmParams forward;
  LstmParams backward;

  Eigen::Index output_dim() const { return 2 * hidden_dim; }
};

/// Registers `<prefix>.fwd.*` and `<prefix>.bwd.*`, glorot-initialized with the
/// forget-gate bias set to 1.
BiLstmParams make_bilstm(ParamStore& store, const std::string& prefix, Eigen::Index input_dim,
                         Eigen::Index hidden_dim, Rng& rng);

/// Binds existing parameters from a store.
BiLstmParams bind_bilstm(const ParamStore& store, const std::string& prefix);

/// n x d embedding rows; out-of-vocabulary tokens get the unk vector.
Matrix embed(const Sentence& sentence, const EmbeddingTable& table);

/// n x 2h output, row i = [forward h_i , backward h_i]. Dropout at
/// `dropout_rate` hits the output rows when `training` is set.
Var bilstm_forward(Tape& tape, const Var& x, const BiLstmParams& params, double dropout_rate, bool training,
                   Rng& rng);

}  // namespace autoner::nn
