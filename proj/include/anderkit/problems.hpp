#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "anderkit/dense.hpp"

namespace anderkit {

/// x = g(x) with g pure and deterministic.
struct FixedPointProblem {
  std::string label;
  Eigen::Index n = 0;
  std::function<Vector(const Vector&)> g;
  std::optional<Vector> known_solution;
  Vector default_start;
  std::map<std::string, std::string> params;

  Vector residual_of(const Vector& x) const { return g(x) - x; }
};

/// N x N interior unknowns of the unit square, h = 1 / (N + 1).
/// Row index of node (i, j) is j * N + i, with i running along x.
struct Grid2D {
  int side = 0;

  double h() const { return 1.0 / (side + 1); }
  Eigen::Index unknowns() const { return static_cast<Eigen::Index>(side) * side; }
  Eigen::Index index(int i, int j) const { return static_cast<Eigen::Index>(j) * side + i; }
};

enum class ConvectionScheme { centered, upwind };

/// Laplace(u) + lambda e^u = 0 with zero Dirichlet data, Jacobi-preconditioned:
///   g(u) = u + (lambda h^2 e^u - A u) / 4,  A = 5-point stencil (4, -1).
FixedPointProblem bratu_problem(int side, double lambda);

/// eps (-u_xx - u_yy) + (u_x + u_y) + k u^2 = 2 pi^2 sin(pi x) sin(pi y),
/// assembled in h^2-scaled form L u + k h^2 u^2 = h^2 f and preconditioned
/// with D = diag(L):  g(u) = u + D^{-1} (h^2 f - L u - k h^2 u^2).
FixedPointProblem convdiff_problem(int side, double eps, double k, ConvectionScheme scheme);

/// tridiag(-1, 2, -1) x = 1 with g(x) = x - (A x - b) / 2.
FixedPointProblem tridiag_problem(int n);

/// g(x) = C x + d with the fixed point solved densely.
FixedPointProblem affine_problem(const Matrix& c, const Vector& d);

/// Random C with spectral norm exactly kappa and random d; deterministic in seed.
FixedPointProblem random_affine_contraction(int n, double kappa, std::uint64_t seed,
                                            Matrix* iteration_matrix = nullptr);

/// ||M||_2 by power iteration on M^T M.
double spectral_norm(const Matrix& m, int max_iters = 10000, double tol = 1e-14);

struct GmresHistory {
  std::vector<Vector> iterates;          // x_0, x_1, ...
  std::vector<double> residual_norms;    // ||b - A x_k||_2 for each iterate
  bool breakdown = false;
};

/// Full-memory GMRES with modified Gram-Schmidt Arnoldi and Givens rotations.
/// Stops early on happy breakdown with the exact solution as the last iterate.
GmresHistory gmres_reference(const std::function<Vector(const Vector&)>& apply, const Vector& b,
                             const Vector& x0, int iters);

}  // namespace anderkit
