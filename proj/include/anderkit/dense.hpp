#pragma once

#include <Eigen/Dense>

namespace anderkit {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Pivots with |R_ii| <= kRankTolerance * |R_00| are treated as zero.
inline constexpr double kRankTolerance = 1e-12;

// Reductions accumulate strictly left to right so traces are reproducible
// regardless of how Eigen vectorizes its own reductions.
double dot(const Vector& a, const Vector& b);
double norm2(const Vector& v);

/// Returns alpha * x + y.
Vector axpy(double alpha, const Vector& x, const Vector& y);

bool all_finite(const Vector& v);

/// Solves min ||rhs - matrix * w||_2 with column-pivoted Householder QR.
///
/// Columns whose pivot falls below the rank tolerance get a zero
/// coefficient, so an all-zero matrix yields an all-zero solution.
/// Throws std::invalid_argument on dimension mismatch or when the matrix
/// has more columns than rows.
Vector least_squares(const Matrix& matrix, const Vector& rhs);

}  // namespace anderkit
