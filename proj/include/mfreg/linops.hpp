#pragma once

// Regularity moduli of matrices (Euclidean norms) and finite truncations of
// the diagonal operator (x_n) -> (x_n / n).

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "mfreg/regmoduli.hpp"
#include "mfreg/report.hpp"
#include "mfreg/setcore.hpp"

namespace mfreg {

struct Matrix {
  size_t rows = 0, cols = 0;
  std::vector<double> a;  // row-major

  Matrix() = default;
  Matrix(size_t m, size_t n, double fill = 0.0) : rows(m), cols(n), a(m * n, fill) {}
  static Matrix from_rows(const std::vector<std::vector<double>>& r) {
    if (r.empty() || r[0].empty()) throw std::invalid_argument("empty matrix");
    Matrix M(r.size(), r[0].size());
    for (size_t i = 0; i < M.rows; ++i) {
      if (r[i].size() != M.cols) throw std::invalid_argument("ragged matrix rows");
      for (size_t j = 0; j < M.cols; ++j) {
        if (!std::isfinite(r[i][j])) throw std::invalid_argument("matrix entries must be finite");
        M(i, j) = r[i][j];
      }
    }
    return M;
  }
  static Matrix diag(const std::vector<double>& d) {
    Matrix M(d.size(), d.size());
    for (size_t i = 0; i < d.size(); ++i) M(i, i) = d[i];
    return M;
  }
  double& operator()(size_t i, size_t j) { return a[i * cols + j]; }
  double operator()(size_t i, size_t j) const { return a[i * cols + j]; }

  Matrix transpose() const {
    Matrix T(cols, rows);
    for (size_t i = 0; i < rows; ++i)
      for (size_t j = 0; j < cols; ++j) T(j, i) = (*this)(i, j);
    return T;
  }
  Point apply(const Point& x) const {
    if (x.size() != cols) throw std::invalid_argument("dimension mismatch");
    Point y(rows, 0.0);
    for (size_t i = 0; i < rows; ++i)
      for (size_t j = 0; j < cols; ++j) y[i] += (*this)(i, j) * x[j];
    return y;
  }
  friend Matrix operator*(const Matrix& A, const Matrix& B) {
    if (A.cols != B.rows) throw std::invalid_argument("dimension mismatch");
    Matrix C(A.rows, B.cols);
    for (size_t i = 0; i < A.rows; ++i)
      for (size_t k = 0; k < A.cols; ++k)
        for (size_t j = 0; j < B.cols; ++j) C(i, j) += A(i, k) * B(k, j);
    return C;
  }
  Matrix scaled(double c) const {
    Matrix M = *this;
    for (auto& v : M.a) v *= c;
    return M;
  }
  bool is_diagonal() const {
    for (size_t i = 0; i < rows; ++i)
      for (size_t j = 0; j < cols; ++j)
        if (i != j && (*this)(i, j) != 0.0) return false;
    return true;
  }
};

inline json to_json(const Matrix& M) {
  json r = json::array();
  for (size_t i = 0; i < M.rows; ++i) {
    json row = json::array();
    for (size_t j = 0; j < M.cols; ++j) row.push_back(M(i, j));
    r.push_back(row);
  }
  return r;
}

inline Matrix matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw std::invalid_argument("matrix must be a nonempty array of rows");
  std::vector<std::vector<double>> rows;
  for (const auto& r : j) {
    if (!r.is_array()) throw std::invalid_argument("matrix rows must be arrays");
    std::vector<double> row;
    for (const auto& v : r) {
      if (!v.is_number()) throw std::invalid_argument("matrix entries must be numbers");
      row.push_back(v.get<double>());
    }
    rows.push_back(std::move(row));
  }
  return Matrix::from_rows(rows);
}

// Singular values in decreasing order (min(m, n) of them), by one-sided
// Jacobi rotations on the columns of A or of A^T, whichever is tall.
inline std::vector<double> singular_values(const Matrix& A) {
  Matrix B = A.rows >= A.cols ? A : A.transpose();
  const size_t m = B.rows, n = B.cols;
  for (int sweep = 0; sweep < 80; ++sweep) {
    double off = 0;
    for (size_t p = 0; p + 1 < n; ++p)
      for (size_t q = p + 1; q < n; ++q) {
        double alpha = 0, beta = 0, gamma = 0;
        for (size_t i = 0; i < m; ++i) {
          alpha += B(i, p) * B(i, p);
          beta += B(i, q) * B(i, q);
          gamma += B(i, p) * B(i, q);
        }
        if (gamma == 0) continue;
        double scale = std::sqrt(alpha * beta);
        if (scale == 0) continue;
        off = std::max(off, std::abs(gamma) / scale);
        if (std::abs(gamma) <= 1e-15 * scale) continue;
        double zeta = (beta - alpha) / (2 * gamma);
        double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1 + zeta * zeta));
        double c = 1 / std::sqrt(1 + t * t), s = c * t;
        for (size_t i = 0; i < m; ++i) {
          double bp = B(i, p), bq = B(i, q);
          B(i, p) = c * bp - s * bq;
          B(i, q) = s * bp + c * bq;
        }
      }
    if (off <= 1e-15) break;
  }
  std::vector<double> sv(n);
  for (size_t j = 0; j < n; ++j) {
    double s = 0;
    for (size_t i = 0; i < m; ++i) s += B(i, j) * B(i, j);
    sv[j] = std::sqrt(s);
  }
  std::sort(sv.rbegin(), sv.rend());
  return sv;
}

inline double rank_tolerance(const Matrix& A, const std::vector<double>& sv) {
  double smax = sv.empty() ? 0 : sv.front();
  return static_cast<double>(std::max(A.rows, A.cols)) * smax * 1e-12;
}

inline size_t matrix_rank(const Matrix& A) {
  auto sv = singular_values(A);
  double tol = rank_tolerance(A, sv);
  return static_cast<size_t>(std::count_if(sv.begin(), sv.end(), [&](double s) { return s > tol; }));
}

// 1 / (smallest nonzero singular value); 0 for the zero matrix, whose
// kernel is the whole space.
inline ExtReal subreg_modulus(const Matrix& A) {
  auto sv = singular_values(A);
  double tol = rank_tolerance(A, sv);
  double smallest = 0;
  for (double s : sv)
    if (s > tol) smallest = s;
  if (smallest == 0) return ExtReal(0.0);
  return ExtReal(1 / smallest);
}

inline Matrix truncated_T(int k) {
  if (k <= 0) throw std::invalid_argument("k must be positive");
  std::vector<double> d;
  for (int n = 1; n <= k; ++n) d.push_back(1.0 / n);
  return Matrix::diag(d);
}

// Operator norm from (R^n, max) to (R^m, euclid). Closed form only for
// diagonal matrices: the extremal x has |x_j| = 1 with matched signs.
inline double mixed_norm_max_to_euclid(const Matrix& A) {
  if (!A.is_diagonal()) throw std::invalid_argument("mixed norm is implemented for diagonal matrices only");
  double s = 0;
  for (size_t i = 0; i < A.rows; ++i) {
    double row = 0;
    for (size_t j = 0; j < A.cols; ++j) row += std::abs(A(i, j));
    s += row * row;
  }
  return std::sqrt(s);
}

// Smallest L admissible for ||x||_max <= L ||A x||_2 at a given x, for
// injective A (kernel {0}, so d(x, Ker A) = ||x||).
inline double injective_subreg_bound_at(const Matrix& A, const Point& x) {
  if (matrix_rank(A) != A.cols) throw std::invalid_argument("matrix is not injective");
  double ax = norm(A.apply(x), Norm::euclid);
  if (ax == 0) throw std::invalid_argument("x must be nonzero");
  return norm(x, Norm::max) / ax;
}

namespace detail {

// Solves M z = r for a small symmetric positive definite M by Gaussian
// elimination with partial pivoting.
inline Point solve_small(Matrix M, Point r) {
  const size_t n = M.rows;
  for (size_t c = 0; c < n; ++c) {
    size_t piv = c;
    for (size_t i = c + 1; i < n; ++i)
      if (std::abs(M(i, c)) > std::abs(M(piv, c))) piv = i;
    if (M(piv, c) == 0) throw std::runtime_error("singular system");
    if (piv != c) {
      for (size_t j = 0; j < n; ++j) std::swap(M(c, j), M(piv, j));
      std::swap(r[c], r[piv]);
    }
    for (size_t i = c + 1; i < n; ++i) {
      double f = M(i, c) / M(c, c);
      for (size_t j = c; j < n; ++j) M(i, j) -= f * M(c, j);
      r[i] -= f * r[c];
    }
  }
  Point z(n);
  for (size_t i = n; i-- > 0;) {
    double s = r[i];
    for (size_t j = i + 1; j < n; ++j) s -= M(i, j) * z[j];
    z[i] = s / M(i, i);
  }
  return z;
}

inline Matrix inverse_small(const Matrix& M) {
  Matrix inv(M.rows, M.rows);
  for (size_t k = 0; k < M.rows; ++k) {
    Point e(M.rows, 0.0);
    e[k] = 1;
    Point c = solve_small(M, e);
    for (size_t i = 0; i < M.rows; ++i) inv(i, k) = c[i];
  }
  return inv;
}

}  // namespace detail

struct ChainConfig {
  double h = 0.05;        // lattice step on the codomain box
  double radius = 1.0;    // box [-radius, radius]^m
  size_t max_nodes = 3000000;
  double tolerance = 0.05;  // relative agreement required of the chain
};

struct ChainReport {
  bool surjective = false;
  double sigma_min = 0;
  ExtReal subreg_value;
  json chain_values = json::object();
  double sampled_reg_estimate = 0;
  double max_discrepancy = 0;
  bool agrees = false;
  json witness;
  std::vector<std::string> notes;

  json to_json() const {
    return {{"surjective", surjective},
            {"sigma_min", num(sigma_min)},
            {"subreg_value", num(subreg_value)},
            {"chain_values", chain_values},
            {"sampled_reg_estimate", num(sampled_reg_estimate)},
            {"max_discrepancy", num(max_discrepancy)},
            {"agrees", agrees},
            {"witness", witness},
            {"norm", "euclid"},
            {"notes", notes}};
  }
};

// Surjective case: the regularity modulus sup d(x, A^-1 y) / d(y, A x) is
// sampled on a codomain lattice, using the exact affine preimage distance
// ||A^T (A A^T)^-1 (A x - y)||; it is compared with 1/sigma_min. The same
// ratio is the calmness ratio of A^-1 at (0, 0) since A^-1(y) meets the row
// space in A^+ y. Non-surjective case: A is sampled as a finite relation
// and the metric regularity check is expected to fail.
inline ChainReport verify_chain(const Matrix& A, const ChainConfig& cfg = {}) {
  ChainReport rep;
  auto sv = singular_values(A);
  size_t rank = matrix_rank(A);
  rep.subreg_value = subreg_modulus(A);
  rep.surjective = rank == A.rows;
  rep.sigma_min = sv.size() < A.rows ? 0.0 : sv[A.rows - 1];
  if (rep.surjective) {
    Matrix AAt = A * A.transpose();
    Matrix P = A.transpose() * detail::inverse_small(AAt);  // n x m, the pseudo-inverse
    Window box = Window::box(A.rows, -cfg.radius, cfg.radius);
    double h = cfg.h;
    while (std::pow(2 * cfg.radius / h + 1, static_cast<double>(A.rows)) > static_cast<double>(cfg.max_nodes)) h *= 1.25;
    if (h != cfg.h) rep.notes.push_back("lattice step coarsened to " + std::to_string(h));
    double best = 0;
    Point arg;
    // x ranges over {0} and the unit coordinate vectors scaled by h.
    std::vector<Point> xs{Point(A.cols, 0.0)};
    for (size_t j = 0; j < A.cols; ++j) {
      Point e(A.cols, 0.0);
      e[j] = h;
      xs.push_back(e);
    }
    for (const auto& y : lattice_nodes(box, h, cfg.max_nodes * 2)) {
      for (const auto& x : xs) {
        Point r = sub(A.apply(x), y);
        double den = norm(r, Norm::euclid);
        if (den <= 1e-12) continue;
        double q = norm(P.apply(r), Norm::euclid) / den;
        if (q > best) {
          best = q;
          arg = y;
        }
      }
    }
    rep.sampled_reg_estimate = best;
    double exact = 1 / rep.sigma_min;
    rep.chain_values = {{"norm_of_adjoint_inverse", num(exact)},
                        {"reg_A", num(best)},
                        {"lip_A_inverse", num(best)},
                        {"clm_A_inverse", num(best)},
                        {"inverse_lop_A", num(best)},
                        {"subreg_A", num(rep.subreg_value)}};
    rep.max_discrepancy = std::max(std::abs(best - exact), std::abs(rep.subreg_value.value() - exact)) / exact;
    rep.agrees = rep.max_discrepancy <= cfg.tolerance;
    rep.witness = {{"argmax_target", to_json(arg)}};
  } else {
    // Finite relation on a coarse domain lattice; metric regularity must fail
    // because A misses a direction of the codomain.
    double h = cfg.h;
    while (std::pow(2 * cfg.radius / h + 1, static_cast<double>(A.cols)) > 20000.0) h *= 1.25;
    double hy = h / 2;
    auto grid = lattice_nodes(Window::box(A.cols, -cfg.radius, cfg.radius), h);
    double reach = 0;
    for (size_t i = 0; i < A.rows; ++i) {
      double row = 0;
      for (size_t j = 0; j < A.cols; ++j) row += std::abs(A(i, j));
      reach = std::max(reach, row * cfg.radius);
    }
    reach = std::max(reach, cfg.radius);
    auto F = sample_multifunction([&](const Point& x) { return SetDescription::singleton(A.apply(x)); }, grid,
                                  Window::box(A.rows, -reach, reach), hy, h, Norm::euclid, Norm::euclid);
    NbhdConfig nb;
    nb.r_U = cfg.radius / 2;
    nb.r_V = cfg.radius / 4;
    nb.eps = cfg.radius / 4;
    double L = std::max(1.0, rep.subreg_value.value()) * 10;
    auto r = check_property(F, Point(A.cols, 0.0), Point(A.rows, 0.0), Property::reg, L, nb);
    rep.chain_values = {{"subreg_A", num(rep.subreg_value)}, {"reg_check_L", num(L)}, {"reg_holds", r.holds}};
    rep.witness = r.witness;
    rep.agrees = !r.holds;
    rep.notes.push_back("not surjective: around-point regularity fails; only the subregularity branch applies");
  }
  return rep;
}

}  // namespace mfreg
