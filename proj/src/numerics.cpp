#include "textgraph/numerics.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <vector>

namespace textgraph {

DenseX glorot_init(Index rows, Index cols, RandomSource& rng) {
  if (rows < 1 || cols < 1) {
    throw std::invalid_argument("glorot_init: rows and cols must be >= 1");
  }
  const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
  DenseX m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) {
      m(i, j) = rng.uniform(-bound, bound);
    }
  }
  return m;
}

DenseX dropout_mask(Index rows, Index cols, double rate, RandomSource& rng) {
  if (rate < 0.0 || rate >= 1.0) {
    throw std::invalid_argument("dropout: rate must be in [0, 1)");
  }
  const double scale = 1.0 / (1.0 - rate);
  DenseX m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) {
      m(i, j) = rng.uniform() < rate ? 0.0 : scale;
    }
  }
  return m;
}

DenseX dropout(const DenseX& m, double rate, RandomSource& rng, bool training) {
  if (rate < 0.0 || rate >= 1.0) {
    throw std::invalid_argument("dropout: rate must be in [0, 1)");
  }
  if (!training || rate == 0.0) {
    return m;
  }
  return m.cwiseProduct(dropout_mask(m.rows(), m.cols(), rate, rng));
}

void save_coo(const SparseX& m, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("save_coo: cannot open " + path.string());
  }
  SparseX c = m;
  c.makeCompressed();
  out << c.rows() << ' ' << c.cols() << ' ' << c.nonZeros() << '\n';
  char line[96];
  for (Index row = 0; row < c.outerSize(); ++row) {
    for (SparseX::InnerIterator it(c, row); it; ++it) {
      std::snprintf(line, sizeof(line), "%lld %lld %.17g\n", static_cast<long long>(it.row()),
                    static_cast<long long>(it.col()), it.value());
      out << line;
    }
  }
  if (!out) {
    throw std::runtime_error("save_coo: write failed for " + path.string());
  }
}

SparseX load_coo(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("load_coo: cannot open " + path.string());
  }
  Index rows = 0, cols = 0;
  std::int64_t nnz = 0;
  if (!(in >> rows >> cols >> nnz) || rows < 0 || cols < 0 || nnz < 0) {
    throw std::runtime_error("load_coo: bad header in " + path.string());
  }
  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<std::size_t>(nnz));
  for (std::int64_t k = 0; k < nnz; ++k) {
    Index r = 0, c = 0;
    double v = 0.0;
    if (!(in >> r >> c >> v)) {
      throw std::runtime_error("load_coo: truncated entry " + std::to_string(k) + " in " +
                               path.string());
    }
    if (r < 0 || r >= rows || c < 0 || c >= cols) {
      throw std::runtime_error("load_coo: entry out of bounds in " + path.string());
    }
    triplets.emplace_back(r, c, v);
  }
  SparseX m(rows, cols);
  m.setFromTriplets(triplets.begin(), triplets.end());
  m.prune([](Index, Index, double v) { return v != 0.0; });
  m.makeCompressed();
  return m;
}

}  // namespace textgraph
