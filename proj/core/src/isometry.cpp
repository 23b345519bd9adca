#include "cartan/isometry.hpp"

#include "cartan/errors.hpp"
#include "cartan/symspace.hpp"

#include <Eigen/LU>

#include <cmath>

namespace cartan {

namespace {

constexpr double kSqrt2 = 1.41421356237309504880;
constexpr double kGroupTol = 1e-10;

}  // namespace

const char* to_string(ElementKind k) {
  switch (k) {
    case ElementKind::solvable: return "solvable";
    case ElementKind::paint: return "paint";
    case ElementKind::grassmannian: return "grassmannian";
    case ElementKind::external: return "external";
  }
  return "external";
}

AdjointResult adjoint_on_coset(const GroupElement& g, const CosetPoint& m) {
  if (g.matrix.rows() != m.matrix.rows()) fail(ErrorKind::mismatch, "group element and coset point differ in size");
  Mat out = g.matrix * m.matrix * g.matrix.transpose();
  return {{m.space, 0.5 * (out + out.transpose())}, g.kind == ElementKind::external};
}

SolvCoords isometry_action(const GroupElement& g, const SolvCoords& coords) {
  if (g.kind == ElementKind::external) fail(ErrorKind::domain, "isometry_action needs an eta-orthogonal element");
  CosetPoint m = to_coset(sigma(coords));
  CosetPoint moved = adjoint_on_coset(g, m).point;
  return sigma_inv(cholesky_crout(moved));
}

GroupElement paint_embed(const PaintRotation& rot) {
  if (!rot.space.is_r1()) fail(ErrorKind::unsupported, "Paint rotations are implemented for r = 1");
  const int p = rot.space.subpaint_dim();
  if (rot.orthogonal.rows() != p || rot.orthogonal.cols() != p)
    fail(ErrorKind::mismatch, "Paint rotation has the wrong size");
  const int n = rot.space.matrix_size();
  Mat g = Mat::Identity(n, n);
  g.block(1, 1, p, p) = rot.orthogonal;
  return {rot.space, g, ElementKind::paint};
}

SolvCoords paint_rotate(const PaintRotation& rot, const SolvCoords& coords) {
  if (!coords.space.is_r1() || !(rot.space == coords.space))
    fail(ErrorKind::mismatch, "Paint rotation and coordinates live on different spaces");
  const int p = coords.space.subpaint_dim();
  if (rot.orthogonal.rows() != p || rot.orthogonal.cols() != p)
    fail(ErrorKind::mismatch, "Paint rotation has the wrong size");
  SolvCoords out = coords;
  out.values.tail(p) = rot.orthogonal * coords.values.tail(p);
  return out;
}

SolvCoords bias_translate(const SolvCoords& u, const SolvCoords& coords) { return group_product(u, coords); }

std::vector<FiberGenerator> build_fiber_generators(const SpaceId& space) {
  if (!space.is_r1()) fail(ErrorKind::unsupported, "fiber generators are implemented for r = 1");
  const int n = space.matrix_size();
  std::vector<FiberGenerator> out;
  for (int j = 1; j <= space.layer_q(); ++j) {
    const int c = j + 1;
    Mat t = Mat::Zero(n, n);
    t(0, c) = 1.0 / kSqrt2;
    t(c, n - 1) = -1.0 / kSqrt2;
    out.push_back({space, j, t - t.transpose()});
  }
  return out;
}

GroupElement fiber_rotation(const FiberGenerator& f, double angle) {
  return {f.space, matrix_exp(angle * f.matrix), ElementKind::grassmannian};
}

GroupElement classify_element(const Mat& g, const SpaceId& space) {
  validate(space);
  const int n = space.matrix_size();
  if (g.rows() != n || g.cols() != n) fail(ErrorKind::mismatch, "matrix size does not match the space");
  const double det = g.determinant();
  const double scale = std::pow(std::max(1.0, g.cwiseAbs().maxCoeff()), n);
  if (!(std::abs(det) > 1e-14 * scale)) fail(ErrorKind::domain, "singular matrix");

  if (eta_orthogonality_error(space, g) > kGroupTol) {
    Mat normalized = g / std::pow(std::abs(det), 1.0 / n);
    return {space, normalized, ElementKind::external};
  }
  bool positive_diagonal = (g.diagonal().array() > 0.0).all();
  if (triangularity_error(g) <= 1e-12 && positive_diagonal) return {space, g, ElementKind::solvable};

  SolvAlgebra alg = solvable_basis(space);
  Mat ginv = g.inverse();
  for (const Mat& t : alg.generators) {
    Mat x = g * t * ginv;
    Mat back = algebra_element(alg, project_onto_basis(alg, x));
    if ((back - x).cwiseAbs().maxCoeff() > kGroupTol) return {space, g, ElementKind::grassmannian};
  }
  return {space, g, ElementKind::paint};
}

Vec r1_rotate(const Mat& generator, double angle, const Vec& w) {
  const int d = static_cast<int>(w.size());
  const Mat L = r1::sigma(w);
  const Mat g = matrix_exp(angle * generator);
  Vec v = L.transpose() * g.row(d).transpose();
  Vec u = g * (L * v);
  const double vv = v.squaredNorm(), nv = std::sqrt(vv);
  Vec out(d);
  out(0) = -0.5 * std::log(vv);
  for (int a = 1; a < d; ++a) out(a) = -kSqrt2 * u(a) / nv;
  return out;
}

ActionJet r1_rotation_jet(const Mat& generator, double angle, const Vec& w) {
  // Only the last column of g M g^T is needed: M'_{NN} = |v|^2 and M'_{aN} = (g L v)_a with v = L^T g^T e_N.
  const int d = static_cast<int>(w.size());
  const int n = d + 1;
  const Mat L = r1::sigma(w);
  const Mat g = matrix_exp(angle * generator);
  const Mat dg = generator * g;

  auto evaluate = [&](const Mat& dL, const Mat& dG, Vec* val, Vec* der) {
    Vec gn = g.row(n - 1).transpose();
    Vec v = L.transpose() * gn;
    Vec u = g * (L * v);
    double vv = v.squaredNorm();
    double nv = std::sqrt(vv);
    if (val) {
      Vec out(d);
      out(0) = -0.5 * std::log(vv);
      for (int a = 1; a < d; ++a) out(a) = -kSqrt2 * u(a) / nv;
      *val = out;
    }
    if (der) {
      Vec dv = dL.transpose() * gn + L.transpose() * dG.row(n - 1).transpose();
      Vec du = dG * (L * v) + g * (dL * v) + g * (L * dv);
      double vdv = v.dot(dv);
      Vec out(d);
      out(0) = -vdv / vv;
      for (int a = 1; a < d; ++a) out(a) = -kSqrt2 * (du(a) / nv - u(a) * vdv / (vv * nv));
      *der = out;
    }
  };

  ActionJet jet;
  evaluate(Mat::Zero(n, n), Mat::Zero(n, n), &jet.value, nullptr);
  jet.d_coords.resize(d, d);
  const double e = std::exp(w(0));
  for (int k = 0; k < d; ++k) {
    Mat dL = Mat::Zero(n, n);
    if (k == 0) {
      dL.row(0) = L.row(0);
      dL(n - 1, n - 1) = -1.0 / e;
    } else {
      dL(0, k) = e / kSqrt2;
      dL(0, n - 1) = -0.5 * e * w(k);
      dL(k, n - 1) = -1.0 / kSqrt2;
    }
    Vec col;
    evaluate(dL, Mat::Zero(n, n), nullptr, &col);
    jet.d_coords.col(k) = col;
  }
  evaluate(Mat::Zero(n, n), dg, nullptr, &jet.d_angle);
  return jet;
}

}  // namespace cartan
