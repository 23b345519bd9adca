#include "cartan/homo.hpp"

#include "cartan/errors.hpp"
#include "cartan/symspace.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cartan {

namespace {

int root_index(int n, int h, int k) {
  // Roots follow the Cartans, ordered by height and then by k (1-based).
  int idx = n - 1;
  for (int hh = 1; hh < h; ++hh) idx += n - hh;
  return idx + (k - 1);
}

std::vector<std::string> borel_labels(int n) {
  std::vector<std::string> out;
  for (int i = 1; i < n; ++i) out.push_back("[0," + std::to_string(i) + "]");
  for (int h = 1; h < n; ++h)
    for (int k = 1; k + h <= n; ++k) out.push_back("[" + std::to_string(h) + "," + std::to_string(k) + "]");
  return out;
}

std::string format_coeff(double c, bool leading) {
  std::ostringstream os;
  double a = std::abs(c);
  if (leading) {
    if (c < 0) os << "-";
  } else {
    os << (c < 0 ? " - " : " + ");
  }
  if (std::abs(a - 1.0) > 1e-12) {
    double r = std::round(a);
    if (std::abs(a - r) < 1e-12)
      os << static_cast<long long>(r) << " ";
    else
      os << a << " ";
  }
  return os.str();
}

}  // namespace

std::vector<Root> aN_root_system(int l) {
  if (l < 1) fail(ErrorKind::invalid_argument, "root system rank must be positive");
  const int n = l + 1;
  std::vector<Root> out;
  for (int h = 1; h < n; ++h)
    for (int k = 1; k + h <= n; ++k) {
      Root r;
      r.coeffs.assign(n, 0);
      r.coeffs[k - 1] = 1;
      r.coeffs[k - 1 + h] = -1;
      r.positive = true;
      r.label = {h, k};
      out.push_back(r);
    }
  const size_t npos = out.size();
  for (size_t i = 0; i < npos; ++i) {
    Root r = out[i];
    for (int& c : r.coeffs) c = -c;
    r.positive = false;
    r.label = {};
    out.push_back(r);
  }
  return out;
}

MCStructure borel_mc(int n) {
  if (n < 2) fail(ErrorKind::invalid_argument, "borel_mc needs N >= 2");
  const int l = n - 1;
  const int d = n * (n + 1) / 2 - 1;
  MCStructure mc;
  mc.name = "borel_sl(" + std::to_string(n) + ")";
  mc.space = SpaceId::sl(n);
  mc.d = d;
  mc.f = StructureConstants(d);
  mc.labels = borel_labels(n);

  // Cartan [0,i] sits on diagonal slot i with -1 on slot 0.
  auto cartan_weight = [](int i, int slot) { return slot == 0 ? -1 : (slot == i ? 1 : 0); };
  for (int i = 1; i <= l; ++i)
    for (int h = 1; h < n; ++h)
      for (int k = 1; k + h <= n; ++k) {
        int a = k - 1, b = k - 1 + h;
        int c = cartan_weight(i, a) - cartan_weight(i, b);
        if (c == 0) continue;
        int ri = root_index(n, h, k);
        mc.f(ri, i - 1, ri) = c;
        mc.f(ri, ri, i - 1) = -c;
      }
  // [h1,k1] = [h2,k2] + [h3,k3] with h1 = h2 + h3, k1 = k2, k3 = k2 + h2.
  for (int h2 = 1; h2 < n; ++h2)
    for (int k2 = 1; k2 + h2 <= n; ++k2)
      for (int h3 = 1; h2 + h3 < n; ++h3) {
        int k3 = k2 + h2;
        if (k3 + h3 > n) continue;
        int r1 = root_index(n, h2 + h3, k2);
        int r2 = root_index(n, h2, k2);
        int r3 = root_index(n, h3, k3);
        mc.f(r1, r2, r3) = 1.0;
        mc.f(r1, r3, r2) = -1.0;
      }
  return mc;
}

MCStructure borel_mc_from_matrices(int n) {
  SolvAlgebra alg = solvable_generators(SpaceId::sl(n));
  MCStructure mc;
  mc.name = "borel_sl(" + std::to_string(n) + ")";
  mc.space = alg.space;
  mc.d = alg.d;
  mc.f = alg.f;
  mc.labels = alg.labels;
  return mc;
}

MCStructure r1_mc(int q) {
  if (q < 0) fail(ErrorKind::invalid_argument, "r1_mc needs q >= 0");
  MCStructure mc;
  mc.name = "r1(" + std::to_string(q) + ")";
  mc.space = SpaceId::layer(q);
  mc.d = q + 2;
  mc.f = StructureConstants(mc.d);
  mc.labels.push_back("H1");
  for (int a = 1; a < mc.d; ++a) {
    mc.f(a, 0, a) = 1.0;
    mc.f(a, a, 0) = -1.0;
    mc.labels.push_back("E[1," + std::to_string(a + 1) + "]");
  }
  return mc;
}

MCStructure mc_for_space(const SpaceId& space) {
  validate(space);
  if (space.family == Family::sl) return borel_mc(space.n);
  if (space.is_r1()) return r1_mc(space.layer_q());
  SolvAlgebra alg = solvable_generators(space);
  MCStructure mc;
  mc.name = "solv_" + space.name();
  mc.space = space;
  mc.d = alg.d;
  mc.f = alg.f;
  mc.labels = alg.labels;
  return mc;
}

std::vector<MCTerm> mc_terms(const MCStructure& mc) {
  std::vector<MCTerm> out;
  for (int i = 0; i < mc.d; ++i)
    for (int j = 0; j < mc.d; ++j)
      for (int k = j + 1; k < mc.d; ++k)
        if (mc.f(i, j, k) != 0.0) out.push_back({i, j, k, mc.f(i, j, k)});
  return out;
}

std::string format_mc(const MCStructure& mc) {
  std::ostringstream os;
  auto terms = mc_terms(mc);
  for (int i = 0; i < mc.d; ++i) {
    os << "dE" << i + 1;
    for (const auto& t : terms)
      if (t.i == i) os << format_coeff(t.coeff, false) << "E" << t.j + 1 << "^E" << t.k + 1;
    os << " = 0\n";
  }
  return os.str();
}

double jacobi_error(const StructureConstants& f) {
  const int d = f.dim();
  double worst = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l) {
          double s = 0.0;
          for (int m = 0; m < d; ++m)
            s += f(m, i, j) * f(l, m, k) + f(m, j, k) * f(l, m, i) + f(m, k, i) * f(l, m, j);
          worst = std::max(worst, std::abs(s));
        }
  return worst;
}

ConstraintSystem::ConstraintSystem(MCStructure source, MCStructure target)
    : source_(std::move(source)), target_(std::move(target)) {}

Vec ConstraintSystem::evaluate(const Mat& W) const {
  const int d2 = target_.d, d1 = source_.d;
  if (W.rows() != d2 || W.cols() != d1) fail(ErrorKind::mismatch, "W has the wrong shape for this system");
  Vec out(size());
  int row = 0;
  for (int i = 0; i < d2; ++i)
    for (int b = 0; b < d1; ++b)
      for (int c = b + 1; c < d1; ++c, ++row) {
        double v = 0.0;
        for (int a = 0; a < d1; ++a) v += W(i, a) * source_.f(a, b, c);
        for (int j = 0; j < d2; ++j) {
          if (W(j, b) == 0.0) continue;
          for (int k = 0; k < d2; ++k) v -= target_.f(i, j, k) * W(j, b) * W(k, c);
        }
        out(row) = v;
      }
  return out;
}

Mat ConstraintSystem::jacobian(const Mat& W) const {
  const int d2 = target_.d, d1 = source_.d;
  Mat J = Mat::Zero(size(), d2 * d1);
  int row = 0;
  for (int i = 0; i < d2; ++i)
    for (int b = 0; b < d1; ++b)
      for (int c = b + 1; c < d1; ++c, ++row) {
        for (int a = 0; a < d1; ++a) J(row, i + a * d2) += source_.f(a, b, c);
        for (int m = 0; m < d2; ++m) {
          double db = 0.0, dc = 0.0;
          for (int k = 0; k < d2; ++k) db += target_.f(i, m, k) * W(k, c);
          for (int j = 0; j < d2; ++j) dc += target_.f(i, j, m) * W(j, b);
          J(row, m + b * d2) -= db;
          J(row, m + c * d2) -= dc;
        }
      }
  return J;
}

ConstraintSystem build_constraints(const MCStructure& source, const MCStructure& target) {
  return ConstraintSystem(source, target);
}

double residual(const Mat& W, const ConstraintSystem& c) { return c.evaluate(W).norm(); }

double residual(const HomoMatrix& W, const ConstraintSystem& c) { return residual(W.W, c); }

double residual(const HomoMatrix& W) {
  return residual(W.W, build_constraints(mc_for_space(W.source), mc_for_space(W.target)));
}

SolvCoords r1_homomorphism(const Mat& W, const Vec& b, const SolvCoords& coords) {
  if (!coords.space.is_r1()) fail(ErrorKind::unsupported, "r1_homomorphism needs an r = 1 source");
  const int p1 = coords.space.subpaint_dim();
  if (W.cols() != p1) fail(ErrorKind::mismatch, "W columns do not match the source subPaint dimension");
  if (W.rows() < 1) fail(ErrorKind::mismatch, "W needs at least one row");
  if (b.size() != 0 && b.size() != W.rows()) fail(ErrorKind::mismatch, "b length does not match W rows");
  const double y1 = coords.values(0);
  if (std::abs(y1) > kCartanBound) fail(ErrorKind::range, "Cartan coordinate outside the bound |w| <= 300");
  SolvCoords out{SpaceId::so(1, static_cast<int>(W.rows())), Vec(W.rows() + 1)};
  out.values(0) = y1;
  out.values.tail(W.rows()) = W * coords.values.tail(p1);
  if (b.size() != 0) out.values.tail(W.rows()) += -std::expm1(-y1) * b;
  return out;
}

Mat r1_algebra_matrix(const Mat& W, const Vec& b) {
  Mat out = Mat::Zero(W.rows() + 1, W.cols() + 1);
  out(0, 0) = 1.0;
  out.block(1, 1, W.rows(), W.cols()) = W;
  if (b.size() != 0) out.block(1, 0, W.rows(), 1) = b;
  return out;
}

namespace {

struct PathOde {
  SolvAlgebra source;
  SolvAlgebra target;
  Mat W;

  Vec rhs(const Vec& x, const Vec& xdot, const Vec& y) const {
    Vec forcing = W * (coframe(source, x) * xdot);
    Eigen::PartialPivLU<Mat> lu(coframe(target, y));
    double det = lu.determinant();
    if (!std::isfinite(det) || std::abs(det) < 1e-300) fail(ErrorKind::numeric, "target coframe is not invertible");
    Vec out = lu.solve(forcing);
    if (!out.allFinite()) fail(ErrorKind::numeric, "non-finite value while integrating the coordinate map");
    return out;
  }

  Vec segment(const Vec& xa, const Vec& xb, Vec y, int steps) const {
    const Vec dx = xb - xa;
    const double h = 1.0 / steps;
    for (int s = 0; s < steps; ++s) {
      double t = s * h;
      Vec k1 = rhs(xa + t * dx, dx, y);
      Vec k2 = rhs(xa + (t + 0.5 * h) * dx, dx, y + 0.5 * h * k1);
      Vec k3 = rhs(xa + (t + 0.5 * h) * dx, dx, y + 0.5 * h * k2);
      Vec k4 = rhs(xa + (t + h) * dx, dx, y + h * k3);
      y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return y;
  }
};

}  // namespace

IntegrationResult integrate_path(const HomoMatrix& W, const std::vector<Vec>& path, const Vec& start) {
  if (path.size() < 2) fail(ErrorKind::invalid_argument, "path needs at least two points");
  if (W.W.rows() != W.target.dim() || W.W.cols() != W.source.dim())
    fail(ErrorKind::mismatch, "W shape does not match its spaces");
  if (start.size() != W.target.dim()) fail(ErrorKind::mismatch, "start point has the wrong length");
  const double res = residual(W);
  if (res > 1e-10) fail(ErrorKind::domain, "W is not a verified homomorphism (residual " + std::to_string(res) + ")");

  PathOde ode{solvable_basis(W.source), solvable_basis(W.target), W.W};
  Vec coarse = start, fine = start;
  int total = 0;
  for (size_t s = 0; s + 1 < path.size(); ++s) {
    double len = (path[s + 1] - path[s]).norm();
    int steps = std::max(1, static_cast<int>(std::ceil(kStepsPerUnitLength * len)));
    coarse = ode.segment(path[s], path[s + 1], coarse, steps);
    fine = ode.segment(path[s], path[s + 1], fine, 2 * steps);
    total += 2 * steps;
  }
  IntegrationResult out;
  out.coords = {W.target, fine};
  out.richardson_gap = (fine - coarse).cwiseAbs().maxCoeff();
  out.reduced_accuracy = out.richardson_gap > 1e-7;
  out.steps = total;
  return out;
}

IntegrationResult integrate_coordinate_map(const HomoMatrix& W, const SolvCoords& source_coords) {
  if (!(source_coords.space == W.source)) fail(ErrorKind::mismatch, "coordinates do not live on the source space");
  std::vector<Vec> path{Vec::Zero(W.source.dim()), source_coords.values};
  return integrate_path(W, path, Vec::Zero(W.target.dim()));
}

}  // namespace cartan
