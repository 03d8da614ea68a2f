#include "autoner/fuzzy_crf.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace autoner;
using Eigen::MatrixXd;

namespace {

struct Instance {
  MatrixXd P;
  MatrixXd Phi;
};

Instance random_instance(std::mt19937_64& rng, int max_n = 4, int max_k = 4) {
  const int n = std::uniform_int_distribution<int>(1, max_n)(rng);
  const int k = std::uniform_int_distribution<int>(1, max_k)(rng);
  return {oracle::random_matrix(n, k, rng, 2.0), oracle::random_matrix(k + 2, k + 2, rng, 2.0)};
}

}  // namespace

TEST_CASE("sequence_score sums start, transitions, emissions and end") {
  MatrixXd P(1, 2);
  P << 0.3, -1.0;
  MatrixXd Phi = MatrixXd::Zero(4, 4);
  Phi(2, 1) = 0.5;
  Phi(1, 3) = 0.25;
  const std::vector<int> y = {1};
  CHECK(crf::sequence_score(P, Phi, y) == doctest::Approx(0.5 - 1.0 + 0.25));
  CHECK(crf::sequence_score(MatrixXd::Zero(3, 3), MatrixXd::Zero(5, 5), std::vector<int>{0, 2, 1}) == 0.0);

  std::mt19937_64 rng(1);
  const MatrixXd P3 = oracle::random_matrix(3, 3, rng);
  const MatrixXd Phi3 = oracle::random_matrix(5, 5, rng);
  const std::vector<int> y3 = {2, 0, 1};
  const double hand = Phi3(3, 2) + P3(0, 2) + Phi3(2, 0) + P3(1, 0) + Phi3(0, 1) + P3(2, 1) + Phi3(1, 4);
  CHECK(crf::sequence_score(P3, Phi3, y3) == doctest::Approx(hand).epsilon(1e-14));
  CHECK_THROWS_AS(crf::sequence_score(P3, Phi3, std::vector<int>{0, 3, 1}), Error);
  CHECK_THROWS_AS(crf::sequence_score(P3, Phi3, std::vector<int>{0, 1}), Error);
}

TEST_CASE("log_partition closed forms") {
  CHECK(crf::log_partition(MatrixXd::Zero(1, 2), MatrixXd::Zero(4, 4)) == doctest::Approx(std::log(2.0)));
  CHECK(crf::log_partition(MatrixXd::Zero(3, 2), MatrixXd::Zero(4, 4)) == doctest::Approx(3 * std::log(2.0)));

  std::mt19937_64 rng(2);
  const MatrixXd P = oracle::random_matrix(4, 3, rng);
  const MatrixXd Phi = oracle::random_matrix(5, 5, rng);
  LabelMask single = LabelMask::Constant(4, 3, false);
  const std::vector<int> y = {2, 2, 0, 1};
  for (int i = 0; i < 4; ++i) single(i, y[static_cast<std::size_t>(i)]) = true;
  CHECK(std::abs(crf::log_partition(P, Phi, &single) - crf::sequence_score(P, Phi, y)) < 1e-12);

  LabelMask empty_row = LabelMask::Constant(4, 3, true);
  empty_row.row(2).setConstant(false);
  CHECK_THROWS_AS(crf::log_partition(P, Phi, &empty_row), Error);
}

TEST_CASE("log_partition matches enumeration with and without lattices") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    const auto inst = random_instance(rng);
    const auto lattice = oracle::random_lattice(inst.P.rows(), inst.P.cols(), rng);
    CHECK(std::abs(crf::log_partition(inst.P, inst.Phi) - oracle::log_partition(inst.P, inst.Phi)) < 1e-9);
    CHECK(std::abs(crf::log_partition(inst.P, inst.Phi, &lattice) - oracle::log_partition(inst.P, inst.Phi, &lattice)) <
          1e-9);
  }
}

TEST_CASE("structural transitions restrict the sums like enumeration does") {
  const IobesVocab vocab({"A"});
  const auto mask = crf::structural_transitions(vocab);
  CHECK(mask.rows() == 7);
  const int O = 0, B = vocab.index(Position::B, 0), I = vocab.index(Position::I, 0), E = vocab.index(Position::E, 0),
            S = vocab.index(Position::S, 0);
  CHECK(mask(vocab.start_state(), B));
  CHECK(!mask(vocab.start_state(), I));
  CHECK(!mask(O, E));
  CHECK(mask(B, I));
  CHECK(mask(I, E));
  CHECK(!mask(B, O));
  CHECK(mask(E, S));
  CHECK(!mask(B, vocab.end_state()));
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = std::uniform_int_distribution<int>(1, 4)(rng);
    const MatrixXd P = oracle::random_matrix(n, 5, rng);
    const MatrixXd Phi = oracle::random_matrix(7, 7, rng);
    CHECK(std::abs(crf::log_partition(P, Phi, nullptr, &mask) - oracle::log_partition(P, Phi, nullptr, &mask)) < 1e-9);
    const auto v = crf::viterbi(P, Phi, &mask);
    CHECK(v.score == oracle::best_sequence(P, Phi, &mask).score);
    CHECK(crf::iobes_to_mentions(v.labels, vocab).size() ==
          static_cast<std::size_t>(std::count_if(v.labels.begin(), v.labels.end(),
                                                 [&](int l) { return l == B || l == S; })));
  }
}

TEST_CASE("fuzzy_nll cases") {
  std::mt19937_64 rng(5);
  const MatrixXd P = oracle::random_matrix(3, 5, rng);
  const MatrixXd Phi = oracle::random_matrix(7, 7, rng);
  CHECK(crf::fuzzy_nll(P, Phi, LabelMask::Constant(3, 5, true)) == 0.0);
  for (int trial = 0; trial < 200; ++trial) {
    const auto inst = random_instance(rng);
    const auto lattice = oracle::random_lattice(inst.P.rows(), inst.P.cols(), rng);
    const double want = oracle::log_partition(inst.P, inst.Phi) - oracle::log_partition(inst.P, inst.Phi, &lattice);
    const double got = crf::fuzzy_nll(inst.P, inst.Phi, lattice);
    CHECK(got >= 0.0);
    CHECK(std::abs(got - want) < 1e-9);
  }
}

TEST_CASE("singleton lattices give the conventional CRF likelihood") {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 200; ++trial) {
    const auto inst = random_instance(rng);
    std::vector<int> gold;
    LabelMask lattice = LabelMask::Constant(inst.P.rows(), inst.P.cols(), false);
    for (Eigen::Index i = 0; i < inst.P.rows(); ++i) {
      gold.push_back(static_cast<int>(rng() % static_cast<std::uint64_t>(inst.P.cols())));
      lattice(i, gold.back()) = true;
    }
    const double crf_nll = oracle::log_partition(inst.P, inst.Phi) - oracle::path_score(inst.P, inst.Phi, gold);
    CHECK(std::abs(crf::fuzzy_nll(inst.P, inst.Phi, lattice) - crf_nll) < 1e-9);
  }
}

TEST_CASE("shifting one emission row leaves fuzzy_nll unchanged") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const auto inst = random_instance(rng);
    const auto lattice = oracle::random_lattice(inst.P.rows(), inst.P.cols(), rng);
    MatrixXd shifted = inst.P;
    const Eigen::Index row = static_cast<Eigen::Index>(rng() % static_cast<std::uint64_t>(inst.P.rows()));
    shifted.row(row).array() += 250.0;
    CHECK(std::abs(crf::fuzzy_nll(shifted, inst.Phi, lattice) - crf::fuzzy_nll(inst.P, inst.Phi, lattice)) < 1e-9);
    MatrixXd all = inst.P.array() + 40.0;
    CHECK(std::abs(crf::log_partition(all, inst.Phi) - crf::log_partition(inst.P, inst.Phi) -
                   40.0 * static_cast<double>(inst.P.rows())) < 1e-9);
  }
  const MatrixXd huge = MatrixXd::Constant(4, 3, 800.0);
  CHECK(std::isfinite(crf::log_partition(huge, MatrixXd::Zero(5, 5))));
}

TEST_CASE("marginals are the gradient of log_partition") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 30; ++trial) {
    auto inst = random_instance(rng);
    const auto lattice = oracle::random_lattice(inst.P.rows(), inst.P.cols(), rng);
    const auto m = crf::marginals(inst.P, inst.Phi, &lattice);
    CHECK(std::abs(m.log_z - crf::log_partition(inst.P, inst.Phi, &lattice)) < 1e-12);
    auto f = [&] { return crf::log_partition(inst.P, inst.Phi, &lattice); };
    CHECK(oracle::relative_error(m.labels, oracle::numeric_gradient(inst.P, f)) < 1e-6);
    CHECK(oracle::relative_error(m.transitions, oracle::numeric_gradient(inst.Phi, f)) < 1e-6);
    CHECK(std::abs(m.labels.sum() - static_cast<double>(inst.P.rows())) < 1e-9);
  }
}

TEST_CASE("viterbi matches brute force") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 300; ++trial) {
    const auto inst = random_instance(rng);
    const auto v = crf::viterbi(inst.P, inst.Phi);
    const auto best = oracle::best_sequence(inst.P, inst.Phi);
    CHECK(v.score == best.score);
    CHECK(oracle::path_score(inst.P, inst.Phi, v.labels) == v.score);
  }
}

TEST_CASE("viterbi special cases") {
  std::mt19937_64 rng(10);
  const MatrixXd one_label = oracle::random_matrix(4, 1, rng);
  CHECK(crf::viterbi(one_label, oracle::random_matrix(3, 3, rng)).labels == std::vector<int>{0, 0, 0, 0});

  MatrixXd diag = MatrixXd::Zero(3, 3);
  diag(0, 2) = 5;
  diag(1, 0) = 5;
  diag(2, 1) = 5;
  CHECK(crf::viterbi(diag, MatrixXd::Zero(5, 5)).labels == std::vector<int>{2, 0, 1});

  // All sequences tie: the smaller label wins at every position.
  CHECK(crf::viterbi(MatrixXd::Zero(3, 2), MatrixXd::Zero(4, 4)).labels == std::vector<int>{0, 0, 0});

  for (int trial = 0; trial < 100; ++trial) {
    const auto inst = random_instance(rng);
    MatrixXd shifted = inst.P;
    shifted.row(static_cast<Eigen::Index>(rng() % static_cast<std::uint64_t>(inst.P.rows()))).array() += 3.25;
    CHECK(crf::viterbi(shifted, inst.Phi).labels == crf::viterbi(inst.P, inst.Phi).labels);
  }
}

TEST_CASE("iobes_to_mentions keeps well-formed segments only") {
  const IobesVocab v({"Chemical", "Disease"});
  auto L = [&](const char* name) { return v.parse(name); };
  CHECK(crf::iobes_to_mentions(std::vector<int>{L("S-Chemical")}, v) == std::vector<Mention>{{0, 1, "Chemical"}});
  CHECK(crf::iobes_to_mentions(std::vector<int>{L("B-Disease"), L("E-Disease")}, v) ==
        std::vector<Mention>{{0, 2, "Disease"}});
  CHECK(crf::iobes_to_mentions(std::vector<int>{L("B-Disease"), L("E-Chemical")}, v).empty());
  CHECK(crf::iobes_to_mentions(std::vector<int>{L("B-Disease"), L("I-Disease"), L("I-Disease"), L("E-Disease"), L("O"),
                                                L("I-Chemical"), L("E-Chemical"), L("S-Disease")},
                               v) == std::vector<Mention>{{0, 4, "Disease"}, {7, 8, "Disease"}});
  CHECK(crf::iobes_to_mentions(std::vector<int>{L("B-Chemical"), L("B-Chemical"), L("E-Chemical")}, v) ==
        std::vector<Mention>{{1, 3, "Chemical"}});

  const std::vector<std::string> text = {"B-Disease", "E-Disease", "O", "S-Gene", "weird", "S-Chemical"};
  CHECK(crf::iobes_to_mentions(text) ==
        std::vector<Mention>{{0, 2, "Disease"}, {3, 4, "Gene"}, {5, 6, "Chemical"}});
  const std::vector<Mention> ms = {{0, 3, "Disease"}, {4, 5, "Chemical"}};
  const auto tags = crf::mentions_to_iobes(ms, 6);
  CHECK(tags == std::vector<std::string>{"B-Disease", "I-Disease", "E-Disease", "O", "S-Chemical", "O"});
  CHECK(crf::iobes_to_mentions(tags) == ms);
}

TEST_CASE("tape fuzzy_nll gradients match finite differences") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    auto inst = random_instance(rng);
    const auto lattice = oracle::random_lattice(inst.P.rows(), inst.P.cols(), rng);
    nn::Tape tape;
    auto P = nn::make_var(inst.P, true);
    auto Phi = nn::make_var(inst.Phi, true);
    auto loss = crf::fuzzy_nll(tape, P, Phi, lattice);
    CHECK(std::abs(loss->value(0, 0) - crf::fuzzy_nll(inst.P, inst.Phi, lattice)) < 1e-12);
    tape.backward(loss);
    auto f = [&] { return crf::fuzzy_nll(inst.P, inst.Phi, lattice); };
    CHECK(oracle::relative_error(P->grad, oracle::numeric_gradient(inst.P, f)) < 1e-4);
    CHECK(oracle::relative_error(Phi->grad, oracle::numeric_gradient(inst.Phi, f)) < 1e-4);
  }
}

TEST_CASE("an all-allowed lattice contributes no gradient") {
  std::mt19937_64 rng(12);
  const MatrixXd P0 = oracle::random_matrix(4, 5, rng);
  nn::Tape tape;
  auto P = nn::make_var(P0, true);
  auto Phi = nn::make_var(oracle::random_matrix(7, 7, rng), true);
  auto loss = crf::fuzzy_nll(tape, P, Phi, LabelMask::Constant(4, 5, true));
  tape.backward(loss);
  CHECK(loss->value(0, 0) == 0.0);
  CHECK(P->grad.cwiseAbs().maxCoeff() == 0.0);
  CHECK(Phi->grad.cwiseAbs().maxCoeff() == 0.0);
}
