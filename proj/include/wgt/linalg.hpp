#pragma once

#include <Eigen/Dense>

namespace wgt {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Largest eigenvalue modulus (dense, general real matrix).
double spectral_radius(const Matrix& m);

// Largest singular value.
double spectral_norm(const Matrix& m);

// Numerical rank from a column-pivoted Householder QR.
Eigen::Index numerical_rank(const Matrix& m);

}  // namespace wgt
