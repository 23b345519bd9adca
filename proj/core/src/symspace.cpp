#include "cartan/symspace.hpp"

#include "cartan/errors.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/QR>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <tuple>

namespace cartan {

namespace {

constexpr double kSqrt2 = 1.41421356237309504880;

Mat unit(int n, int i, int j) {
  Mat e = Mat::Zero(n, n);
  e(i, j) = 1.0;
  return e;
}

// Involution paired with eta_t: outer corners swap, middle block is fixed.
int partner(const SpaceId& s, int k) {
  const int n = s.matrix_size();
  if (k < s.r || k >= s.r + s.q) return n - 1 - k;
  return k;
}

// Eta-weight of a diagonal slot: (r, ..., 1, 0, ..., 0, -1, ..., -r).
int slot_grade(const SpaceId& s, int k) {
  const int n = s.matrix_size();
  if (k < s.r) return s.r - k;
  if (k >= s.r + s.q) return -(s.r - (n - 1 - k));
  return 0;
}

double snap(double x) {
  if (std::abs(x) < 1e-14) return 0.0;
  double a = std::round(x);
  if (std::abs(x - a) < 1e-13) return a;
  double b = std::round(x * kSqrt2);
  if (std::abs(x * kSqrt2 - b) < 1e-13) return b / kSqrt2;
  return x;
}

void check_bound(double exponent) {
  if (!std::isfinite(exponent) || std::abs(exponent) > kCartanBound)
    fail(ErrorKind::range, "Cartan coordinate outside the bound |w| <= 300");
}

void finalize_projector(SolvAlgebra& alg) {
  const int n = alg.space.matrix_size();
  Mat basis(n * n, alg.d);
  for (int i = 0; i < alg.d; ++i) basis.col(i) = alg.generators[i].reshaped();
  Mat gram = basis.transpose() * basis;
  alg.projector = gram.ldlt().solve(basis.transpose());
}

}  // namespace

Mat matrix_exp(const Mat& a) {
  const int n = static_cast<int>(a.rows());
  if (a.isDiagonal(0.0)) {
    Mat out = Mat::Zero(n, n);
    for (int i = 0; i < n; ++i) out(i, i) = std::exp(a(i, i));
    return out;
  }
  bool strictly_upper = true;
  for (int j = 0; j < n && strictly_upper; ++j)
    for (int i = j; i < n; ++i)
      if (a(i, j) != 0.0) {
        strictly_upper = false;
        break;
      }
  if (strictly_upper) {
    Mat out = Mat::Identity(n, n);
    Mat term = Mat::Identity(n, n);
    for (int k = 1; k < n; ++k) {
      term = term * a / static_cast<double>(k);
      if (term.isZero(0.0)) break;
      out += term;
    }
    return out;
  }
  return a.exp();
}

EtaForm build_eta(const SpaceId& space) {
  validate(space);
  if (space.family != Family::so) fail(ErrorKind::unsupported, "sl family carries no eta form");
  const int n = space.matrix_size();
  EtaForm e;
  e.n = n;
  e.eta_t = Mat::Zero(n, n);
  for (int k = 0; k < n; ++k) e.eta_t(k, partner(space, k)) = 1.0;

  e.omega = Mat::Zero(n, n);
  e.eta_b = Mat::Zero(n, n);
  const double h = 1.0 / kSqrt2;
  int row = 0;
  for (int i = 0; i < space.r; ++i, ++row) {
    e.omega(row, i) = h;
    e.omega(row, n - 1 - i) = h;
    e.eta_b(row, row) = 1.0;
  }
  for (int k = space.r; k < space.r + space.q; ++k, ++row) {
    e.omega(row, k) = 1.0;
    e.eta_b(row, row) = 1.0;
  }
  for (int i = 0; i < space.r; ++i, ++row) {
    e.omega(row, i) = h;
    e.omega(row, n - 1 - i) = -h;
    e.eta_b(row, row) = -1.0;
  }
  return e;
}

SolvAlgebra solvable_basis(const SpaceId& space) {
  validate(space);
  SolvAlgebra alg;
  alg.space = space;
  const int n = space.matrix_size();

  if (space.family == Family::so) {
    for (int i = 0; i < space.r; ++i) {
      int pi = partner(space, i);
      alg.generators.push_back(unit(n, i, i) - unit(n, pi, pi));
      alg.weights.push_back(1.0);
      alg.labels.push_back("H" + std::to_string(i + 1));
      alg.pivots.emplace_back(-1, -1);
    }
    alg.n_cartan = space.r;
    std::vector<std::tuple<int, int, int>> roots;
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b) {
        int pa = partner(space, b), pb = partner(space, a);
        if (pa >= pb) continue;
        if (pa == a && pb == b) continue;
        if (std::make_pair(pa, pb) < std::make_pair(a, b)) continue;
        roots.emplace_back(slot_grade(space, a) - slot_grade(space, b), a, b);
      }
    std::sort(roots.begin(), roots.end());
    for (auto [g, a, b] : roots) {
      alg.generators.push_back((unit(n, a, b) - unit(n, partner(space, b), partner(space, a))) / kSqrt2);
      alg.weights.push_back(1.0);
      alg.labels.push_back("E[" + std::to_string(a + 1) + "," + std::to_string(b + 1) + "]");
      alg.pivots.emplace_back(a, b);
    }
  } else {
    for (int i = 1; i < n; ++i) {
      alg.generators.push_back(unit(n, i, i) - unit(n, 0, 0));
      alg.weights.push_back(-0.5);
      alg.labels.push_back("[0," + std::to_string(i) + "]");
      alg.pivots.emplace_back(-1, -1);
    }
    alg.n_cartan = n - 1;
    for (int h = 1; h < n; ++h)
      for (int k = 0; k + h < n; ++k) {
        alg.generators.push_back(unit(n, k, k + h));
        alg.weights.push_back(-1.0);
        alg.labels.push_back("[" + std::to_string(h) + "," + std::to_string(k + 1) + "]");
        alg.pivots.emplace_back(k, k + h);
      }
  }
  alg.d = static_cast<int>(alg.generators.size());
  if (alg.d != space.dim()) fail(ErrorKind::numeric, "generator count does not match the coset dimension");
  finalize_projector(alg);
  return alg;
}

SolvAlgebra solvable_generators(const SpaceId& space) {
  SolvAlgebra alg = solvable_basis(space);
  const int d = alg.d;
  const int n = space.matrix_size();
  alg.f = StructureConstants(d);
  Mat basis(n * n, d);
  for (int i = 0; i < d; ++i) basis.col(i) = alg.generators[i].reshaped();
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k) {
      Mat c = alg.generators[j] * alg.generators[k] - alg.generators[k] * alg.generators[j];
      Vec coeffs = alg.projector * c.reshaped();
      if ((basis * coeffs - c.reshaped()).cwiseAbs().maxCoeff() > 1e-12)
        fail(ErrorKind::numeric, "commutator leaves the solvable span");
      for (int i = 0; i < d; ++i) alg.f(i, j, k) = snap(coeffs(i));
    }
  return alg;
}

Vec project_onto_basis(const SolvAlgebra& alg, const Mat& x) { return alg.projector * x.reshaped(); }

Mat algebra_element(const SolvAlgebra& alg, const Vec& coeffs) {
  const int n = alg.space.matrix_size();
  Mat out = Mat::Zero(n, n);
  for (int i = 0; i < alg.d; ++i) out += coeffs(i) * alg.generators[i];
  return out;
}

namespace r1 {

Mat sigma(const Vec& w) {
  const int p = static_cast<int>(w.size()) - 1;
  const int n = p + 2;
  check_bound(w(0));
  const double e = std::exp(w(0));
  Mat L = Mat::Identity(n, n);
  L(0, 0) = e;
  L(n - 1, n - 1) = 1.0 / e;
  double sq = 0.0;
  for (int a = 1; a <= p; ++a) {
    L(0, a) = e * w(a) / kSqrt2;
    L(a, n - 1) = -w(a) / kSqrt2;
    sq += w(a) * w(a);
  }
  L(0, n - 1) = -0.25 * e * sq;
  return L;
}

Vec sigma_inv(const Mat& L) {
  const int n = static_cast<int>(L.rows());
  Vec w(n - 1);
  w(0) = std::log(L(0, 0));
  for (int a = 1; a < n - 1; ++a) w(a) = -kSqrt2 * L(a, n - 1);
  return w;
}

Vec product(const Vec& u, const Vec& w) {
  Vec out(w.size());
  out(0) = u(0) + w(0);
  check_bound(out(0));
  const double s = std::exp(-w(0));
  out.tail(w.size() - 1) = w.tail(w.size() - 1) + s * u.tail(u.size() - 1);
  return out;
}

Vec inverse(const Vec& u) {
  Vec out(u.size());
  out(0) = -u(0);
  out.tail(u.size() - 1) = -std::exp(u(0)) * u.tail(u.size() - 1);
  return out;
}

}  // namespace r1

TriangularElement sigma(const SolvAlgebra& alg, const Vec& y) {
  if (y.size() != alg.d) fail(ErrorKind::mismatch, "coordinate length does not match the algebra");
  if (!y.allFinite()) fail(ErrorKind::domain, "non-finite coordinates");
  const int n = alg.space.matrix_size();
  Vec expo = Vec::Zero(n);
  for (int i = 0; i < alg.n_cartan; ++i) expo += alg.weights[i] * y(i) * alg.generators[i].diagonal();
  for (int k = 0; k < n; ++k) check_bound(expo(k));

  Mat L = Mat::Identity(n, n);
  for (int k = 0; k < n; ++k) L(k, k) = std::exp(expo(k));
  for (int i = alg.n_cartan; i < alg.d; ++i) {
    if (y(i) == 0.0) continue;
    L = L * matrix_exp(alg.weights[i] * y(i) * alg.generators[i]);
  }
  return {alg.space, L};
}

TriangularElement sigma(const SolvCoords& coords) {
  validate(coords.space);
  if (coords.values.size() != coords.space.dim())
    fail(ErrorKind::mismatch, "coordinate length does not match the space");
  if (!coords.values.allFinite()) fail(ErrorKind::domain, "non-finite coordinates");
  if (coords.space.is_r1()) return {coords.space, r1::sigma(coords.values)};
  return sigma(solvable_basis(coords.space), coords.values);
}

Vec sigma_inv(const SolvAlgebra& alg, const Mat& L) {
  const int n = alg.space.matrix_size();
  if (L.rows() != n || L.cols() != n) fail(ErrorKind::mismatch, "matrix size does not match the space");
  for (int k = 0; k < n; ++k)
    if (!(L(k, k) > 0.0)) fail(ErrorKind::domain, "triangular element needs a positive diagonal");

  Vec y = Vec::Zero(alg.d);
  Mat a(n, alg.n_cartan);
  for (int i = 0; i < alg.n_cartan; ++i) a.col(i) = alg.weights[i] * alg.generators[i].diagonal();
  Vec logs = L.diagonal().array().log().matrix();
  y.head(alg.n_cartan) = a.colPivHouseholderQr().solve(logs);

  Vec expo = a * y.head(alg.n_cartan);
  Mat u = L;
  for (int k = 0; k < n; ++k) u.row(k) *= std::exp(-expo(k));
  for (int i = alg.n_cartan; i < alg.d; ++i) {
    auto [r, c] = alg.pivots[i];
    y(i) = u(r, c) / (alg.weights[i] * alg.generators[i](r, c));
    if (y(i) != 0.0) u = matrix_exp(-alg.weights[i] * y(i) * alg.generators[i]) * u;
  }
  return y;
}

SolvCoords sigma_inv(const TriangularElement& L) {
  validate(L.space);
  const int n = L.space.matrix_size();
  if (L.matrix.rows() != n || L.matrix.cols() != n)
    fail(ErrorKind::mismatch, "matrix size does not match the space");
  for (int k = 0; k < n; ++k)
    if (!(L.matrix(k, k) > 0.0)) fail(ErrorKind::domain, "triangular element needs a positive diagonal");
  if (L.space.is_r1()) return {L.space, r1::sigma_inv(L.matrix)};
  return {L.space, sigma_inv(solvable_basis(L.space), L.matrix)};
}

TriangularElement cholesky_crout(const CosetPoint& M) {
  const Mat& m = M.matrix;
  if (m.rows() != m.cols()) fail(ErrorKind::mismatch, "coset matrix must be square");
  if (!m.allFinite()) fail(ErrorKind::numeric, "non-finite coset matrix");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    fail(ErrorKind::domain, "coset matrix is not symmetric");
  // Upper-triangular factor of M equals the reversed lower factor of the reversed matrix.
  Mat rev = m.reverse();
  Eigen::LLT<Mat> llt(rev);
  if (llt.info() != Eigen::Success) fail(ErrorKind::numeric, "coset matrix is not positive definite");
  Mat lower = llt.matrixL();
  return {M.space, lower.reverse()};
}

CosetPoint to_coset(const TriangularElement& L) {
  Mat m = L.matrix * L.matrix.transpose();
  return {L.space, 0.5 * (m + m.transpose())};
}

SolvCoords group_product(const SolvCoords& u, const SolvCoords& w) {
  if (!(u.space == w.space)) fail(ErrorKind::mismatch, "group product across different spaces");
  if (u.space.is_r1()) return {u.space, r1::product(u.values, w.values)};
  TriangularElement prod{u.space, sigma(u).matrix * sigma(w).matrix};
  return sigma_inv(prod);
}

SolvCoords group_inverse(const SolvCoords& u) {
  TriangularElement L = sigma(u);
  Mat inv = L.matrix.triangularView<Eigen::Upper>().solve(Mat::Identity(L.matrix.rows(), L.matrix.cols()));
  return sigma_inv(TriangularElement{u.space, inv});
}

Mat coframe(const SolvAlgebra& alg, const Vec& y) {
  const int n = alg.space.matrix_size();
  Mat out(alg.d, alg.d);
  Mat b = Mat::Identity(n, n);
  Mat binv = Mat::Identity(n, n);
  for (int mu = alg.d - 1; mu >= 0; --mu) {
    const Mat& t = alg.generators[mu];
    const double c = alg.weights[mu];
    Mat x = binv * (c * t) * b;
    out.col(mu) = alg.projector * x.reshaped();
    b = matrix_exp(c * y(mu) * t) * b;
    binv = binv * matrix_exp(-c * y(mu) * t);
  }
  return out;
}

Mat metric_at(const SolvCoords& coords) {
  if (!coords.space.is_r1()) fail(ErrorKind::unsupported, "closed-form metric is only available for r = 1");
  const Vec& w = coords.values;
  const int d = static_cast<int>(w.size());
  Mat e = Mat::Identity(d, d);
  for (int a = 1; a < d; ++a) e(a, 0) = w(a);
  Vec scale = Vec::Constant(d, 0.25);
  scale(0) = 1.0;
  return e.transpose() * scale.asDiagonal() * e;
}

double distance_constant(const SpaceId&) { return 1.0 / (2.0 * kSqrt2); }

double coset_distance(const CosetPoint& a, const CosetPoint& b) {
  if (!(a.space == b.space)) fail(ErrorKind::mismatch, "distance across different spaces");
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(b.matrix, a.matrix, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) fail(ErrorKind::numeric, "eigenvalue solve failed");
  double s = 0.0;
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    double lam = es.eigenvalues()(i);
    if (!(lam > 0.0)) fail(ErrorKind::numeric, "non-positive generalized eigenvalue");
    double l = std::log(lam);
    s += l * l;
  }
  return distance_constant(a.space) * std::sqrt(s);
}

SolvCoords ts_project(const SolvCoords& coords) {
  if (!coords.space.is_r1()) fail(ErrorKind::unsupported, "Tits-Satake projection is defined for r = 1");
  SolvCoords out = coords;
  for (int i = 2; i < out.values.size(); ++i) out.values(i) = 0.0;
  return out;
}

SolvCoords origin(const SpaceId& space) { return {space, Vec::Zero(space.dim())}; }

double eta_orthogonality_error(const SpaceId& space, const Mat& g) {
  if (space.family == Family::sl) return std::abs(g.determinant() - 1.0);
  Mat eta = build_eta(space).eta_t;
  return (g.transpose() * eta * g - eta).cwiseAbs().maxCoeff();
}

double triangularity_error(const Mat& L) {
  double e = 0.0;
  for (int j = 0; j < L.cols(); ++j)
    for (int i = j + 1; i < L.rows(); ++i) e = std::max(e, std::abs(L(i, j)));
  return e;
}

double coset_eta_error(const CosetPoint& M) {
  if (M.space.family == Family::sl) return std::abs(M.matrix.determinant() - 1.0);
  Mat eta = build_eta(M.space).eta_t;
  return (M.matrix * eta * M.matrix - eta).cwiseAbs().maxCoeff();
}

}  // namespace cartan
