#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "textgraph/types.hpp"

namespace textgraph {

/// Sparse * dense product. Row-major sparse times dense accumulates each
/// output row in stored column order, serially, so results are bitwise
/// reproducible.
template <typename Scalar>
Dense<Scalar> spmm(const Sparse<Scalar>& s, const Dense<Scalar>& d) {
  if (s.cols() != d.rows()) {
    throw std::invalid_argument("spmm: dimension mismatch (" + std::to_string(s.rows()) + "x" +
                                std::to_string(s.cols()) + " vs " + std::to_string(d.rows()) +
                                "x" + std::to_string(d.cols()) + ")");
  }
  return s * d;
}

/// Row softmax with max subtraction.
template <typename Scalar>
Dense<Scalar> softmax_rows(const Dense<Scalar>& m) {
  Dense<Scalar> out(m.rows(), m.cols());
  for (Index i = 0; i < m.rows(); ++i) {
    const Scalar mx = m.row(i).maxCoeff();
    out.row(i) = (m.row(i).array() - mx).exp();
    out.row(i) /= out.row(i).sum();
  }
  return out;
}

template <typename Scalar>
Dense<Scalar> relu(const Dense<Scalar>& m) {
  return m.cwiseMax(Scalar(0));
}

/// Glorot uniform init: entries in +-sqrt(6 / (rows + cols)), drawn in
/// row-major order from `rng`.
DenseX glorot_init(Index rows, Index cols, RandomSource& rng);

/// Inverted-dropout keep mask: entries are 0 with probability `rate`,
/// 1/(1-rate) otherwise, drawn in row-major order. rate must be in [0, 1).
DenseX dropout_mask(Index rows, Index cols, double rate, RandomSource& rng);

/// Inverted dropout. Identity when not training or rate == 0 (consumes no
/// randomness in either case).
DenseX dropout(const DenseX& m, double rate, RandomSource& rng, bool training);

/// COO text format: header "rows cols nnz", then one "row col value" line per
/// stored entry in row-major order, values with 17 significant digits
/// (round-trip exact for doubles).
void save_coo(const SparseX& m, const std::filesystem::path& path);
SparseX load_coo(const std::filesystem::path& path);

}  // namespace textgraph
