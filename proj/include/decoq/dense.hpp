#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <vector>

namespace decoq::dense {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Complex = std::complex<double>;

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline Vector kron(const Vector& a, const Vector& b) {
  Vector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i)
    out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

// |r><c| on a d-level system.
inline Matrix ketbra(int d, int r, int c) {
  Matrix m = Matrix::Zero(d, d);
  m(r, c) = 1.0;
  return m;
}

inline Matrix annihilator(int d) {
  Matrix a = Matrix::Zero(d, d);
  for (int n = 1; n < d; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

// Embeds op acting on factor `which` of a tensor product with the given
// per-factor dimensions.
inline Matrix embed(const std::vector<int>& dims, size_t which, const Matrix& op) {
  if (which >= dims.size()) throw std::invalid_argument("dense: factor index out of range");
  if (op.rows() != dims[which]) throw std::invalid_argument("dense: operator dimension mismatch");
  Matrix out = Matrix::Identity(1, 1);
  for (size_t f = 0; f < dims.size(); ++f) {
    const Matrix next =
        (f == which) ? op : Matrix(Matrix::Identity(dims[f], dims[f]));
    out = kron(out, next);
  }
  return out;
}

inline Vector basis_state(int d, int idx) {
  Vector v = Vector::Zero(d);
  v(idx) = 1.0;
  return v;
}

}  // namespace decoq::dense
