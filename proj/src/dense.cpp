#include "anderkit/dense.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace anderkit {

namespace {

void require_same_length(const Vector& a, const Vector& b, const char* what) {
  if (a.size() != b.size()) {
    throw std::invalid_argument(std::string(what) + ": length mismatch (" +
                                std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()) + ")");
  }
}

}  // namespace

double dot(const Vector& a, const Vector& b) {
  require_same_length(a, b, "dot");
  double sum = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

double norm2(const Vector& v) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) sum += v[i] * v[i];
  return std::sqrt(sum);
}

Vector axpy(double alpha, const Vector& x, const Vector& y) {
  require_same_length(x, y, "axpy");
  Vector out(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) out[i] = alpha * x[i] + y[i];
  return out;
}

bool all_finite(const Vector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) return false;
  }
  return true;
}

Vector least_squares(const Matrix& matrix, const Vector& rhs) {
  if (matrix.rows() != rhs.size()) {
    throw std::invalid_argument("least_squares: matrix has " +
                                std::to_string(matrix.rows()) +
                                " rows but rhs has length " +
                                std::to_string(rhs.size()));
  }
  if (matrix.cols() < 1 || matrix.rows() < 1) {
    throw std::invalid_argument("least_squares: empty system");
  }
  if (matrix.cols() > matrix.rows()) {
    throw std::invalid_argument("least_squares: more columns than rows");
  }
  Eigen::ColPivHouseholderQR<Matrix> qr(matrix.rows(), matrix.cols());
  qr.setThreshold(kRankTolerance);
  qr.compute(matrix);
  if (qr.maxPivot() == 0.0) return Vector::Zero(matrix.cols());
  return qr.solve(rhs);
}

}  // namespace anderkit
