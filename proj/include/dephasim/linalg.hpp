#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace dephasim {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

double hermiticity_defect(const Matrix& m);
double min_eigenvalue(const Matrix& hermitian);

Matrix kron(const Matrix& a, const Matrix& b);

/// Mixed-radix flat index codec. dims[0] is the most significant digit
/// (subsystem 1 varies slowest in the flat basis).
long flat_index(const std::vector<int>& positions, const std::vector<int>& dims);
std::vector<int> unflatten_index(long flat, const std::vector<int>& dims);
long dims_product(const std::vector<int>& dims);

/// Trace out the subsystems listed in `traced` (0-based positions into dims).
/// Remaining subsystems keep their original relative order.
Matrix partial_trace(const Matrix& rho, const std::vector<int>& dims,
                     const std::vector<int>& traced);

/// Hermitian / unit-trace / positivity gate for ingested states.
/// Throws ValidationError subclasses on failure.
void validate_density_matrix(const Matrix& rho, double herm_tol = 1e-12,
                             double trace_tol = 1e-12, double eig_floor = -1e-9);

}  // namespace dephasim
