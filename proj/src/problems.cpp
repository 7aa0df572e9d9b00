#include "anderkit/problems.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <stdexcept>

namespace anderkit {

namespace {

std::string fmt_param(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// 4 u_p - sum of the four neighbours, zero outside the grid.
void apply_laplacian(const Grid2D& grid, const Vector& u, Vector& out) {
  const int n = grid.side;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const Eigen::Index p = grid.index(i, j);
      double v = 4.0 * u[p];
      if (i > 0) v -= u[p - 1];
      if (i + 1 < n) v -= u[p + 1];
      if (j > 0) v -= u[p - n];
      if (j + 1 < n) v -= u[p + n];
      out[p] = v;
    }
  }
}

}  // namespace

FixedPointProblem bratu_problem(int side, double lambda) {
  if (side < 2) throw std::invalid_argument("bratu: grid side must be at least 2");
  if (lambda < 0.0) throw std::invalid_argument("bratu: lambda must be nonnegative");
  const Grid2D grid{side};
  const double h = grid.h();
  const double scaled_lambda = lambda * h * h;

  FixedPointProblem p;
  p.label = "bratu";
  p.n = grid.unknowns();
  p.default_start = Vector::Zero(p.n);
  p.params = {{"N", std::to_string(side)}, {"lambda", fmt_param(lambda)}};
  p.g = [grid, scaled_lambda](const Vector& u) {
    if (u.size() != grid.unknowns()) throw std::invalid_argument("bratu: dimension mismatch");
    Vector au(u.size());
    apply_laplacian(grid, u, au);
    Vector out(u.size());
    for (Eigen::Index r = 0; r < u.size(); ++r) {
      out[r] = u[r] + (scaled_lambda * std::exp(u[r]) - au[r]) / 4.0;
    }
    return out;
  };
  return p;
}

FixedPointProblem convdiff_problem(int side, double eps, double k, ConvectionScheme scheme) {
  if (side < 2) throw std::invalid_argument("convdiff: grid side must be at least 2");
  if (!(eps > 0.0)) throw std::invalid_argument("convdiff: eps must be positive");
  const Grid2D grid{side};
  const double h = grid.h();
  const double h2 = h * h;

  Vector source(grid.unknowns());
  for (int j = 0; j < side; ++j) {
    for (int i = 0; i < side; ++i) {
      const double x = (i + 1) * h;
      const double y = (j + 1) * h;
      source[grid.index(i, j)] = h2 * 2.0 * std::numbers::pi * std::numbers::pi *
                                 std::sin(std::numbers::pi * x) * std::sin(std::numbers::pi * y);
    }
  }

  // Stencil weights of L: centre, west, east, south, north.
  double centre = 4.0 * eps;
  double west = -eps, east = -eps, south = -eps, north = -eps;
  if (scheme == ConvectionScheme::centered) {
    west -= h / 2.0;
    south -= h / 2.0;
    east += h / 2.0;
    north += h / 2.0;
  } else {
    centre += 2.0 * h;
    west -= h;
    south -= h;
  }

  FixedPointProblem p;
  p.label = "convdiff";
  p.n = grid.unknowns();
  p.default_start = Vector::Ones(p.n);
  p.params = {{"N", std::to_string(side)},
              {"epsilon", fmt_param(eps)},
              {"k", fmt_param(k)},
              {"scheme", scheme == ConvectionScheme::centered ? "centered" : "upwind"}};
  p.g = [=](const Vector& u) {
    if (u.size() != grid.unknowns()) throw std::invalid_argument("convdiff: dimension mismatch");
    const int n = side;
    Vector out(u.size());
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        const Eigen::Index q = grid.index(i, j);
        double lu = centre * u[q];
        if (i > 0) lu += west * u[q - 1];
        if (i + 1 < n) lu += east * u[q + 1];
        if (j > 0) lu += south * u[q - n];
        if (j + 1 < n) lu += north * u[q + n];
        out[q] = u[q] + (source[q] - lu - k * h2 * u[q] * u[q]) / centre;
      }
    }
    return out;
  };
  return p;
}

FixedPointProblem tridiag_problem(int n) {
  if (n < 2) throw std::invalid_argument("tridiag: n must be at least 2");
  FixedPointProblem p;
  p.label = "tridiag";
  p.n = n;
  p.default_start = Vector::Zero(n);
  p.params = {{"n", std::to_string(n)}};
  Vector solution(n);
  for (int i = 1; i <= n; ++i) solution[i - 1] = 0.5 * i * (n + 1 - i);
  p.known_solution = solution;
  p.g = [n](const Vector& x) {
    if (x.size() != n) throw std::invalid_argument("tridiag: dimension mismatch");
    Vector out(n);
    for (int i = 0; i < n; ++i) {
      double ax = 2.0 * x[i];
      if (i > 0) ax -= x[i - 1];
      if (i + 1 < n) ax -= x[i + 1];
      out[i] = x[i] - (ax - 1.0) / 2.0;
    }
    return out;
  };
  return p;
}

FixedPointProblem affine_problem(const Matrix& c, const Vector& d) {
  if (c.rows() != c.cols() || c.rows() != d.size()) {
    throw std::invalid_argument("affine: C must be square and match d");
  }
  FixedPointProblem p;
  p.label = "affine";
  p.n = d.size();
  p.default_start = Vector::Zero(p.n);
  const Matrix identity = Matrix::Identity(p.n, p.n);
  p.known_solution = (identity - c).colPivHouseholderQr().solve(d);
  p.g = [c, d](const Vector& x) -> Vector { return c * x + d; };
  return p;
}

FixedPointProblem random_affine_contraction(int n, double kappa, std::uint64_t seed,
                                            Matrix* iteration_matrix) {
  if (n < 1) throw std::invalid_argument("random_affine_contraction: n must be positive");
  if (!(kappa >= 0.0 && kappa < 1.0)) {
    throw std::invalid_argument("random_affine_contraction: kappa must lie in [0, 1)");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix c(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) c(i, j) = normal(rng);
  Vector d(n);
  for (int i = 0; i < n; ++i) d[i] = normal(rng);
  const double sigma_max = Eigen::JacobiSVD<Matrix>(c).singularValues()[0];
  c *= kappa / sigma_max;
  if (iteration_matrix != nullptr) *iteration_matrix = c;
  FixedPointProblem p = affine_problem(c, d);
  p.params = {{"n", std::to_string(n)}, {"kappa", fmt_param(kappa)},
              {"seed", std::to_string(seed)}};
  return p;
}

double spectral_norm(const Matrix& m, int max_iters, double tol) {
  if (m.size() == 0) return 0.0;
  const Matrix gram = m.transpose() * m;
  Vector v = Vector::Ones(m.cols()) / std::sqrt(static_cast<double>(m.cols()));
  double lambda = 0.0;
  for (int it = 0; it < max_iters; ++it) {
    Vector w = gram * v;
    const double w_norm = norm2(w);
    if (w_norm == 0.0) return 0.0;
    const double next = dot(v, w);
    v = w / w_norm;
    if (std::abs(next - lambda) <= tol * std::abs(next)) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  return std::sqrt(lambda);
}

GmresHistory gmres_reference(const std::function<Vector(const Vector&)>& apply, const Vector& b,
                             const Vector& x0, int iters) {
  if (b.size() != x0.size()) throw std::invalid_argument("gmres: dimension mismatch");
  if (iters < 0 || iters > b.size()) throw std::invalid_argument("gmres: iters must be in [0, n]");

  GmresHistory out;
  out.iterates.push_back(x0);
  Vector r0 = b - apply(x0);
  const double beta = norm2(r0);
  out.residual_norms.push_back(beta);
  if (beta == 0.0 || iters == 0) return out;

  const Eigen::Index n = b.size();
  Matrix basis(n, iters + 1);
  Matrix hessenberg = Matrix::Zero(iters + 1, iters);
  std::vector<double> cs(static_cast<std::size_t>(iters)), sn(static_cast<std::size_t>(iters));
  Vector rhs = Vector::Zero(iters + 1);
  rhs[0] = beta;
  basis.col(0) = r0 / beta;

  for (int k = 0; k < iters; ++k) {
    Vector w = apply(basis.col(k));
    for (int i = 0; i <= k; ++i) {
      hessenberg(i, k) = dot(w, basis.col(i));
      w -= hessenberg(i, k) * basis.col(i);
    }
    const double w_norm = norm2(w);
    hessenberg(k + 1, k) = w_norm;

    for (int i = 0; i < k; ++i) {
      const double a = hessenberg(i, k);
      const double c = hessenberg(i + 1, k);
      hessenberg(i, k) = cs[i] * a + sn[i] * c;
      hessenberg(i + 1, k) = -sn[i] * a + cs[i] * c;
    }
    const double denom = std::hypot(hessenberg(k, k), hessenberg(k + 1, k));
    cs[k] = hessenberg(k, k) / denom;
    sn[k] = hessenberg(k + 1, k) / denom;
    hessenberg(k, k) = denom;
    hessenberg(k + 1, k) = 0.0;
    rhs[k + 1] = -sn[k] * rhs[k];
    rhs[k] = cs[k] * rhs[k];

    const Vector y = hessenberg.topLeftCorner(k + 1, k + 1)
                         .triangularView<Eigen::Upper>()
                         .solve(rhs.head(k + 1));
    Vector x = x0 + basis.leftCols(k + 1) * y;
    out.residual_norms.push_back(norm2(b - apply(x)));
    out.iterates.push_back(std::move(x));

    if (w_norm <= 1e-14 * beta) {
      out.breakdown = true;
      break;
    }
    basis.col(k + 1) = w / w_norm;
  }
  return out;
}

}  // namespace anderkit
