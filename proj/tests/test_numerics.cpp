#include <cmath>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "textgraph/numerics.hpp"

using namespace textgraph;

namespace {

SparseX from_triplets(Index rows, Index cols, const std::vector<Triplet>& ts) {
  SparseX m(rows, cols);
  m.setFromTriplets(ts.begin(), ts.end());
  m.makeCompressed();
  return m;
}

SparseX random_sparse(Index rows, Index cols, double density, RandomSource& rng) {
  std::vector<Triplet> ts;
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) {
      if (rng.uniform() < density) {
        ts.emplace_back(i, j, rng.uniform(-2.0, 2.0));
      }
    }
  }
  return from_triplets(rows, cols, ts);
}

DenseX random_dense(Index rows, Index cols, RandomSource& rng) {
  DenseX m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) {
      m(i, j) = rng.uniform(-2.0, 2.0);
    }
  }
  return m;
}

}  // namespace

TEST_CASE("spmm identity and zero") {
  RandomSource rng(1);
  const DenseX d = random_dense(4, 3, rng);
  std::vector<Triplet> eye;
  for (Index i = 0; i < 4; ++i) eye.emplace_back(i, i, 1.0);
  CHECK(spmm(from_triplets(4, 4, eye), d) == d);
  CHECK(spmm(from_triplets(4, 4, {}), d).isZero(0.0));
}

TEST_CASE("spmm hand example") {
  const SparseX s = from_triplets(2, 2, {{0, 1, 2.0}, {1, 0, 1.0}});
  DenseX d(2, 1);
  d << 1.0, 3.0;
  const DenseX r = spmm(s, d);
  CHECK(r(0, 0) == 6.0);
  CHECK(r(1, 0) == 1.0);
}

TEST_CASE("spmm rejects dimension mismatch") {
  const DenseX d = DenseX::Zero(2, 2);
  CHECK_THROWS_AS(spmm(from_triplets(2, 3, {}), d), std::invalid_argument);
}

TEST_CASE("spmm agrees with densified product") {
  RandomSource rng(2);
  for (int rep = 0; rep < 10; ++rep) {
    const SparseX s = random_sparse(20, 20, 0.3, rng);
    const DenseX d = random_dense(20, 5, rng);
    const DenseX expected = DenseX(s) * d;
    CHECK(((spmm(s, d) - expected).array().abs() <= 1e-12).all());
  }
}

TEST_CASE("softmax_rows examples") {
  DenseX m(3, 2);
  m << 0.0, 0.0, 1000.0, 1000.0, std::log(1.0), std::log(3.0);
  const DenseX p = softmax_rows(m);
  CHECK(p(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(p(1, 0) == doctest::Approx(0.5).epsilon(1e-12));  // max-subtraction guard
  CHECK(p(2, 0) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(p(2, 1) == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("softmax_rows sums to one and is shift invariant") {
  RandomSource rng(3);
  const DenseX m = random_dense(6, 5, rng);
  const DenseX p = softmax_rows(m);
  for (Index i = 0; i < p.rows(); ++i) {
    CHECK(std::abs(p.row(i).sum() - 1.0) <= 1e-12);
  }
  DenseX shifted = m;
  shifted.array() += 17.25;
  CHECK(((softmax_rows(shifted) - p).array().abs() <= 1e-12).all());
}

TEST_CASE("glorot_init bound, determinism, mean") {
  RandomSource a(7), b(7);
  const DenseX m1 = glorot_init(1, 5, a);  // bound sqrt(6/6) = 1
  CHECK((m1.array().abs() <= 1.0).all());
  CHECK(glorot_init(1, 5, b) == m1);

  RandomSource c(11);
  const DenseX big = glorot_init(100, 100, c);
  const double bound = std::sqrt(6.0 / 200.0);
  CHECK((big.array().abs() < bound).all());
  const double sigma = bound / std::sqrt(3.0);
  CHECK(std::abs(big.mean()) <= 3.0 * sigma / 100.0);
}

TEST_CASE("dropout identity paths") {
  RandomSource rng(5);
  const DenseX m = random_dense(4, 4, rng);
  CHECK(dropout(m, 0.0, rng, true) == m);
  CHECK(dropout(m, 0.5, rng, false) == m);
  CHECK_THROWS_AS(dropout(m, 1.0, rng, true), std::invalid_argument);
}

TEST_CASE("dropout preserves expectation") {
  RandomSource rng(6);
  const DenseX m = random_dense(3, 3, rng).array() + 3.0;  // keep entries away from 0
  DenseX sum = DenseX::Zero(3, 3);
  const int reps = 4000;
  for (int r = 0; r < reps; ++r) {
    RandomSource local(1000 + static_cast<std::uint64_t>(r));
    sum += dropout(m, 0.5, local, true);
  }
  const DenseX avg = sum / reps;
  CHECK(((avg - m).array().abs() <= 0.12 * m.array().abs()).all());
}

TEST_CASE("RandomSource determinism and substreams") {
  RandomSource a(42), b(42);
  for (int k = 0; k < 100; ++k) {
    CHECK(a.next_u64() == b.next_u64());
  }
  RandomSource base(42);
  RandomSource s1 = base.substream("graph");
  RandomSource s2 = base.substream("model");
  CHECK(s1.next_u64() != s2.next_u64());
  CHECK(RandomSource(42).substream("graph").next_u64() ==
        RandomSource(42).substream("graph").next_u64());

  RandomSource u(9);
  for (int k = 0; k < 1000; ++k) {
    const double x = u.uniform();
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
    CHECK(u.uniform_index(7) < 7);
  }

  std::vector<int> v1{1, 2, 3, 4, 5, 6}, v2{1, 2, 3, 4, 5, 6};
  RandomSource sh1(3), sh2(3);
  sh1.shuffle(v1);
  sh2.shuffle(v2);
  CHECK(v1 == v2);
}

TEST_CASE("COO round trip is exact") {
  RandomSource rng(8);
  const SparseX m = random_sparse(13, 9, 0.25, rng);
  const auto path = std::filesystem::temp_directory_path() / "textgraph_test_coo.txt";
  save_coo(m, path);
  const SparseX r = load_coo(path);
  REQUIRE(r.rows() == m.rows());
  REQUIRE(r.cols() == m.cols());
  REQUIRE(r.nonZeros() == m.nonZeros());
  CHECK(((DenseX(r) - DenseX(m)).array() == 0.0).all());

  std::ifstream in(path);
  Index rows, cols;
  std::int64_t nnz;
  in >> rows >> cols >> nnz;
  CHECK(rows == 13);
  CHECK(cols == 9);
  CHECK(nnz == m.nonZeros());
  std::filesystem::remove(path);
}

TEST_CASE("COO load prunes explicit zeros") {
  const auto path = std::filesystem::temp_directory_path() / "textgraph_test_coo_zero.txt";
  {
    std::ofstream out(path);
    out << "2 2 2\n0 0 0\n1 1 2.5\n";
  }
  const SparseX m = load_coo(path);
  CHECK(m.nonZeros() == 1);
  CHECK(m.coeff(1, 1) == 2.5);
  std::filesystem::remove(path);
}
