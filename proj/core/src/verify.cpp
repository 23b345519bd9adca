#include "cartan/verify.hpp"

#include "cartan/errors.hpp"
#include "cartan/fixtures.hpp"
#include "cartan/homo.hpp"
#include "cartan/io.hpp"
#include "cartan/isometry.hpp"
#include "cartan/random.hpp"
#include "cartan/symspace.hpp"

#include <Eigen/QR>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace cartan {

namespace {

constexpr double kFault = 1e-3;

void add(Report& r, std::string name, double residual, double tol) {
  const bool ok = std::isfinite(residual) && residual <= tol;
  r.checks.push_back({std::move(name), residual, tol, ok});
  if (std::isfinite(residual)) r.max_residual = std::max(r.max_residual, residual);
  r.pass = r.pass && ok;
}

// Runs body, turning a thrown error into a failed check.
void guarded(Report& r, const std::string& name, double tol, const std::function<double()>& body) {
  double res;
  try {
    res = body();
  } catch (const std::exception&) {
    res = std::numeric_limits<double>::infinity();
  }
  add(r, name, res, tol);
}

double max_abs(const Mat& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

std::vector<SpaceId> core_spaces() {
  return {SpaceId::hyperbolic(2), SpaceId::hyperbolic(3), SpaceId::hyperbolic(5), SpaceId::sl(4)};
}

Mat random_isometry(std::mt19937_64& rng, const SpaceId& s) {
  const int n = s.matrix_size();
  Mat a = uniform_mat(rng, n, n, -0.5, 0.5);
  if (s.family == Family::sl) {
    a -= (a.trace() / n) * Mat::Identity(n, n);
    return matrix_exp(a);
  }
  Mat anti = a - a.transpose();
  return matrix_exp(build_eta(s).eta_t * anti);
}

Mat random_orthogonal(std::mt19937_64& rng, int n) {
  Mat g(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) g(i, j) = normal(rng);
  Eigen::HouseholderQR<Mat> qr(g);
  return qr.householderQ() * Mat::Identity(n, n);
}

Mat fd_jacobian(const std::function<Vec(const Vec&)>& f, const Vec& x, double h) {
  Vec f0 = f(x);
  Mat J(f0.size(), x.size());
  for (int k = 0; k < x.size(); ++k) {
    Vec xp = x, xm = x;
    xp(k) += h;
    xm(k) -= h;
    J.col(k) = (f(xp) - f(xm)) / (2 * h);
  }
  return J;
}

// max |E_t(F(x)) dF(x) - W E_s(x)|
double pullback_error(const std::function<Vec(const Vec&)>& F, const Mat& W, const SolvAlgebra& src,
                      const SolvAlgebra& tgt, const Vec& x) {
  Mat lhs = coframe(tgt, F(x)) * fd_jacobian(F, x, 1e-5);
  Mat rhs = W * coframe(src, x);
  return max_abs(lhs - rhs);
}

}  // namespace

Report verify_core(const VerifyOptions& o) {
  Report r;
  r.suite = "core";
  auto rng = seeded(o.seed, 0xc0fe);
  for (const auto& s : core_spaces()) {
    const std::string tag = "[" + s.name() + "]";
    const int d = s.dim();
    double e_sigma = 0, e_coset = 0, e_eta = 0, e_tri = 0, e_group = 0;
    guarded(r, "sigma_roundtrip" + tag, 1e-12, [&] {
      for (int i = 0; i < o.samples; ++i) {
        SolvCoords y{s, uniform_vec(rng, d, -1, 1)};
        TriangularElement L = sigma(y);
        e_sigma = std::max(e_sigma, max_abs(sigma_inv(L).values - y.values));
        CosetPoint M = to_coset(L);
        e_coset = std::max(e_coset, max_abs(cholesky_crout(M).matrix - L.matrix));
        e_eta = std::max(e_eta, coset_eta_error(M));
        e_tri = std::max(e_tri, triangularity_error(L.matrix));
        SolvCoords u{s, uniform_vec(rng, d, -1, 1)};
        SolvCoords w{s, uniform_vec(rng, d, -1, 1)};
        double assoc = max_abs(group_product(group_product(u, w), y).values - group_product(u, group_product(w, y)).values);
        double unit = max_abs(group_product(u, origin(s)).values - u.values);
        double inv = max_abs(group_product(u, group_inverse(u)).values);
        e_group = std::max({e_group, assoc, unit, inv});
      }
      return e_sigma;
    });
    add(r, "coset_roundtrip" + tag, e_coset, 1e-12);
    add(r, "coset_invariant" + tag, std::max(e_eta, e_tri), 1e-12);
    add(r, "group_axioms" + tag, e_group, 1e-10);
  }
  for (int n = 2; n <= 7; ++n) {
    guarded(r, "borel_structure[sl(" + std::to_string(n) + ")]", 1e-12, [&] {
      MCStructure a = borel_mc(n), b = borel_mc_from_matrices(n);
      double e = 0;
      for (int i = 0; i < a.d; ++i)
        for (int j = 0; j < a.d; ++j)
          for (int k = 0; k < a.d; ++k) e = std::max(e, std::abs(a.f(i, j, k) - b.f(i, j, k)));
      return std::max(e, jacobi_error(a.f));
    });
  }
  guarded(r, "r1_homomorphism_law", 1e-10, [&] {
    double e = 0;
    for (int i = 0; i < o.samples; ++i) {
      const int q1 = 1 + static_cast<int>(uniform01(rng) * 4), q2 = 1 + static_cast<int>(uniform01(rng) * 4);
      const SpaceId s = SpaceId::layer(q1 - 1);
      Mat W = uniform_mat(rng, q2, q1, -1, 1);
      Vec b = uniform_vec(rng, q2, -1, 1);
      SolvCoords u{s, uniform_vec(rng, s.dim(), -1, 1)}, w{s, uniform_vec(rng, s.dim(), -1, 1)};
      Vec lhs = r1_homomorphism(W, b, group_product(u, w)).values;
      Vec rhs = group_product(r1_homomorphism(W, b, u), r1_homomorphism(W, b, w)).values;
      e = std::max(e, max_abs(lhs - rhs));
    }
    return e;
  });
  guarded(r, "r1_composition", 1e-12, [&] {
    double e = 0;
    for (int i = 0; i < o.samples; ++i) {
      const SpaceId s = SpaceId::layer(2);
      Mat W1 = uniform_mat(rng, 4, 3, -1, 1), W2 = uniform_mat(rng, 2, 4, -1, 1);
      Vec b1 = uniform_vec(rng, 4, -1, 1), b2 = uniform_vec(rng, 2, -1, 1);
      SolvCoords x{s, uniform_vec(rng, s.dim(), -1, 1)};
      Vec lhs = r1_homomorphism(W2, b2, r1_homomorphism(W1, b1, x)).values;
      Vec rhs = r1_homomorphism(W2 * W1, b2 + W2 * b1, x).values;
      e = std::max(e, max_abs(lhs - rhs));
    }
    return e;
  });
  return r;
}

Report verify_isometry(const VerifyOptions& o) {
  Report r;
  r.suite = "isometry";
  auto rng = seeded(o.seed, 0x150);
  for (const auto& s : core_spaces()) {
    guarded(r, "distance_invariance[" + s.name() + "]", 1e-8, [&] {
      double e = 0;
      for (int i = 0; i < o.samples; ++i) {
        CosetPoint a = to_coset(sigma(SolvCoords{s, uniform_vec(rng, s.dim(), -1, 1)}));
        CosetPoint b = to_coset(sigma(SolvCoords{s, uniform_vec(rng, s.dim(), -1, 1)}));
        GroupElement g{s, random_isometry(rng, s), ElementKind::grassmannian};
        double d0 = coset_distance(a, b);
        double d1 = coset_distance(adjoint_on_coset(g, a).point, adjoint_on_coset(g, b).point);
        e = std::max(e, std::abs(d1 - d0));
      }
      return e;
    });
  }
  for (int n : {3, 5}) {
    const SpaceId s = SpaceId::hyperbolic(n);
    guarded(r, "paint_equivalence[" + s.name() + "]", 1e-10, [&] {
      double e = 0;
      for (int i = 0; i < o.samples; ++i) {
        PaintRotation rot{s, random_orthogonal(rng, s.subpaint_dim())};
        SolvCoords y{s, uniform_vec(rng, s.dim(), -1, 1)};
        e = std::max(e, max_abs(paint_rotate(rot, y).values - isometry_action(paint_embed(rot), y).values));
      }
      return e;
    });
  }
  for (int n : {2, 3, 5}) {
    const SpaceId s = SpaceId::hyperbolic(n);
    guarded(r, "metric_left_invariance[" + s.name() + "]", 1e-8, [&] {
      double e = 0;
      for (int i = 0; i < std::min(o.samples, 100); ++i) {
        SolvCoords u{s, uniform_vec(rng, s.dim(), -1, 1)};
        SolvCoords w{s, uniform_vec(rng, s.dim(), -1, 1)};
        auto left = [&](const Vec& x) { return group_product(u, SolvCoords{s, x}).values; };
        Mat J = fd_jacobian(left, w.values, 1e-5);
        Mat pulled = J.transpose() * metric_at(SolvCoords{s, left(w.values)}) * J;
        e = std::max(e, max_abs(pulled - metric_at(w)));
      }
      return e;
    });
  }
  return r;
}

Report verify_appendix(const VerifyOptions& o) {
  Report r;
  r.suite = "appendix";
  auto rng = seeded(o.seed, 0xa99);
  auto faulted = [&](const std::string& name, Mat W) {
    if (o.fault == name) W(0, 0) += kFault;
    return W;
  };
  const ConstraintSystem inj = build_constraints(mc_for_space(appendix::h3()), mc_for_space(appendix::sl4()));
  const ConstraintSystem res = build_constraints(mc_for_space(appendix::sl4()), mc_for_space(appendix::h3()));

  for (const auto& fx : appendix::appendix_fixtures()) {
    const ConstraintSystem& c = fx.source == appendix::h3() ? inj : res;
    if (fx.params == 0) {
      guarded(r, fx.name, 1e-12, [&] { return residual(faulted(fx.name, fx.build(Vec())), c); });
      continue;
    }
    guarded(r, fx.name, 1e-10, [&] {
      double e = 0;
      for (int i = 0; i < std::min(o.samples, 100); ++i) e = std::max(e, residual(faulted(fx.name, fx.build(fx.sample(rng))), c));
      return e;
    });
  }
  guarded(r, "w12_substitution", 1e-14,
          [&] { return max_abs(faulted("w12_substitution", appendix::w12(appendix::w12_substitution())) - appendix::w_can()); });

  const SolvAlgebra a_h3 = solvable_generators(appendix::h3());
  const SolvAlgebra a_sl4 = solvable_generators(appendix::sl4());
  guarded(r, "w11_map", 1e-7, [&] {
    double e = 0;
    for (int i = 0; i < 50; ++i) {
      Vec p = appendix::sample_w11_map_params(rng);
      Vec x = uniform_vec(rng, 3, -1, 1);
      auto F = [&](const Vec& w) {
        Vec y = appendix::w11_map(p, w);
        if (o.fault == "w11_map") y(0) += kFault * w(0) * w(0);
        return y;
      };
      e = std::max(e, pullback_error(F, appendix::w11(p.head(11)), a_h3, a_sl4, x));
    }
    return e;
  });
  guarded(r, "w3_map", 1e-7, [&] {
    double e = 0;
    for (int i = 0; i < 50; ++i) {
      Vec a = uniform_vec(rng, 4, -1, 1);
      Vec x = uniform_vec(rng, 9, -1, 1);
      auto F = [&](const Vec& y) {
        Vec w = appendix::w3_phi(a, y);
        if (o.fault == "w3_map") w(0) += kFault * y(0) * y(0);
        return w;
      };
      e = std::max(e, pullback_error(F, appendix::restriction(3, a), a_sl4, a_h3, x));
    }
    return e;
  });
  guarded(r, "canonical_embedding", 1e-8, [&] {
    double e = 0;
    HomoMatrix W{faulted("canonical_embedding", appendix::w_can()), appendix::h3(), appendix::sl4(), Vec()};
    for (int i = 0; i < 20; ++i) {
      Vec x = uniform_vec(rng, 3, -1, 1);
      IntegrationResult ir = integrate_coordinate_map(W, SolvCoords{appendix::h3(), x});
      e = std::max(e, max_abs(ir.coords.values - appendix::canonical_embedding(x)));
    }
    return e;
  });
  return r;
}

Report run_verify(const std::string& scope, const VerifyOptions& o) {
  if (scope == "core") return verify_core(o);
  if (scope == "isometry") return verify_isometry(o);
  if (scope == "appendix") return verify_appendix(o);
  if (scope != "all") fail(ErrorKind::invalid_argument, "unknown verify scope: " + scope);
  Report all;
  all.suite = "all";
  for (const Report& part : {verify_core(o), verify_isometry(o), verify_appendix(o)})
    for (const auto& c : part.checks) {
      all.checks.push_back({part.suite + "/" + c.name, c.residual, c.tolerance, c.pass});
      if (std::isfinite(c.residual)) all.max_residual = std::max(all.max_residual, c.residual);
      all.pass = all.pass && c.pass;
    }
  return all;
}

std::string report_json(const Report& r) {
  nlohmann::ordered_json j;
  j["format_version"] = kFormatVersion;
  j["suite"] = r.suite;
  auto arr = nlohmann::ordered_json::array();
  for (const auto& c : r.checks) {
    nlohmann::ordered_json e;
    e["name"] = c.name;
    e["residual"] = std::isfinite(c.residual) ? nlohmann::ordered_json(c.residual) : nlohmann::ordered_json(nullptr);
    e["tolerance"] = c.tolerance;
    e["pass"] = c.pass;
    arr.push_back(e);
  }
  j["checks"] = arr;
  j["max_residual"] = r.max_residual;
  j["pass"] = r.pass;
  return j.dump(2) + "\n";
}

}  // namespace cartan
