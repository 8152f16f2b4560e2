#include "dephasim/linalg.hpp"

#include <Eigen/Eigenvalues>

#include "dephasim/errors.hpp"

namespace dephasim {

double hermiticity_defect(const Matrix& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

double min_eigenvalue(const Matrix& hermitian) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

long dims_product(const std::vector<int>& dims) {
  long d = 1;
  for (int x : dims) d *= x;
  return d;
}

long flat_index(const std::vector<int>& positions, const std::vector<int>& dims) {
  long flat = 0;
  for (size_t i = 0; i < dims.size(); ++i) flat = flat * dims[i] + positions[i];
  return flat;
}

std::vector<int> unflatten_index(long flat, const std::vector<int>& dims) {
  std::vector<int> pos(dims.size());
  for (size_t i = dims.size(); i-- > 0;) {
    pos[i] = static_cast<int>(flat % dims[i]);
    flat /= dims[i];
  }
  return pos;
}

Matrix partial_trace(const Matrix& rho, const std::vector<int>& dims,
                     const std::vector<int>& traced) {
  std::vector<bool> is_traced(dims.size(), false);
  for (int t : traced) is_traced[t] = true;

  std::vector<int> kept;
  for (size_t i = 0; i < dims.size(); ++i)
    if (!is_traced[i]) kept.push_back(static_cast<int>(i));

  std::vector<int> kept_dims, traced_dims;
  for (int k : kept) kept_dims.push_back(dims[k]);
  for (size_t i = 0; i < dims.size(); ++i)
    if (is_traced[i]) traced_dims.push_back(dims[i]);

  const long dk = dims_product(kept_dims);
  const long dt = dims_product(traced_dims);
  Matrix out = Matrix::Zero(dk, dk);

  std::vector<int> full_row(dims.size()), full_col(dims.size());
  for (long r = 0; r < dk; ++r) {
    auto rk = unflatten_index(r, kept_dims);
    for (long c = 0; c < dk; ++c) {
      auto ck = unflatten_index(c, kept_dims);
      Complex acc = 0.0;
      for (long m = 0; m < dt; ++m) {
        auto tm = unflatten_index(m, traced_dims);
        size_t ik = 0, it = 0;
        for (size_t i = 0; i < dims.size(); ++i) {
          if (is_traced[i]) {
            full_row[i] = tm[it];
            full_col[i] = tm[it];
            ++it;
          } else {
            full_row[i] = rk[ik];
            full_col[i] = ck[ik];
            ++ik;
          }
        }
        acc += rho(flat_index(full_row, dims), flat_index(full_col, dims));
      }
      out(r, c) = acc;
    }
  }
  return out;
}

void validate_density_matrix(const Matrix& rho, double herm_tol, double trace_tol,
                             double eig_floor) {
  if (rho.rows() != rho.cols())
    throw DimensionMismatch("density matrix: not square");
  if (hermiticity_defect(rho) > herm_tol)
    throw ValidationError("density matrix: not Hermitian within tolerance");
  if (std::abs(rho.trace() - Complex(1.0, 0.0)) > trace_tol)
    throw ValidationError("density matrix: trace differs from 1");
  if (min_eigenvalue(rho) < eig_floor)
    throw NotPositiveSemidefinite("density matrix: negative eigenvalue");
}

}  // namespace dephasim
