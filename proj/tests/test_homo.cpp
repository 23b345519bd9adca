#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cartan/fixtures.hpp"
#include "cartan/homo.hpp"
#include "cartan/random.hpp"
#include "cartan/symspace.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <map>
#include <set>

using namespace cartan;
namespace ap = cartan::appendix;

namespace {

double max_abs(const Mat& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

using oracle::kSl4MaurerCartan;

// Quadratic polynomial in (alpha, beta, gamma, a1..a18); monomial key (i, j), -1 marks a missing factor.
using Poly = std::map<std::pair<int, int>, double>;

Poly term(std::initializer_list<std::tuple<double, int, int>> ts) {
  Poly p;
  for (auto [c, i, j] : ts) p[{std::min(i, j), std::max(i, j)}] += c;
  return p;
}

constexpr int A = 0, B = 1, G = 2, ONE = -1;
constexpr int a(int k) { return 2 + k; }

std::vector<Poly> equatoni() {
  return {
      term({{1, a(2), a(6)}, {-1, a(3), a(5)}}),
      term({{1, a(9), a(11)}, {-1, a(8), a(12)}, {-1, a(3), a(14)}, {1, a(2), a(15)}}),
      term({{1, a(5), a(9)}, {-1, a(6), a(8)}}),
      term({{1, a(5), A}, {-1, a(5), B}, {-1, ONE, a(5)}}),
      term({{1, a(6), A}, {-1, a(6), B}, {-1, ONE, a(6)}}),
      term({{1, a(8), B}, {-1, a(8), G}, {-1, ONE, a(8)}}),
      term({{1, a(9), B}, {-1, a(9), G}, {-1, ONE, a(9)}}),
      term({{-2, a(2), A}, {-1, a(2), B}, {-1, a(2), G}, {-1, ONE, a(2)}}),
      term({{-2, a(3), A}, {-1, a(3), B}, {-1, a(3), G}, {-1, ONE, a(3)}}),
      term({{-1, A, a(11)}, {-2, a(11), B}, {-1, a(11), G}, {-1, a(2), a(4)}, {1, a(1), a(5)}, {-1, ONE, a(11)}}),
      term({{-1, A, a(12)}, {-2, a(12), B}, {-1, a(12), G}, {-1, a(3), a(4)}, {1, a(1), a(6)}, {-1, ONE, a(12)}}),
      term({{1, A, a(14)}, {-1, a(14), G}, {-1, a(5), a(7)}, {1, a(4), a(8)}, {-1, ONE, a(14)}}),
      term({{1, A, a(15)}, {-1, a(15), G}, {-1, a(6), a(7)}, {1, a(4), a(9)}, {-1, ONE, a(15)}}),
      term({{-1, A, a(17)}, {-1, a(17), B}, {-2, a(17), G}, {1, a(8), a(10)}, {-1, a(7), a(11)}, {-1, a(2), a(13)},
            {1, a(1), a(14)}, {-1, ONE, a(17)}}),
      term({{-1, A, a(18)}, {-1, a(18), B}, {-2, a(18), G}, {1, a(9), a(10)}, {-1, a(7), a(12)}, {-1, a(3), a(13)},
            {1, a(1), a(15)}, {-1, ONE, a(18)}}),
  };
}

Mat full_ansatz(const Vec& v) {
  Mat W = Mat::Zero(9, 3);
  W(0, 0) = v(A);
  W(1, 0) = v(B);
  W(2, 0) = v(G);
  for (int k = 1; k <= 18; ++k) W(3 + (k - 1) / 3, (k - 1) % 3) = v(a(k));
  return W;
}

// Scales so the first monomial has coefficient 1, dropping zeros.
std::vector<std::pair<std::pair<int, int>, double>> normalized(const Poly& p) {
  std::vector<std::pair<std::pair<int, int>, double>> out;
  double lead = 0;
  for (auto& [k, c] : p) {
    if (std::abs(c) < 1e-12) continue;
    if (lead == 0) lead = c;
    out.push_back({k, c / lead});
  }
  return out;
}

bool same(const Poly& x, const Poly& y) {
  auto a = normalized(x), b = normalized(y);
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (a[i].first != b[i].first || std::abs(a[i].second - b[i].second) > 1e-12) return false;
  return true;
}

}  // namespace

TEST_CASE("borel_mc(4) reproduces the reference sl(4) Maurer-Cartan table") {
  MCStructure mc = borel_mc(4);
  std::set<std::tuple<int, int, int, double>> got, want(kSl4MaurerCartan.begin(), kSl4MaurerCartan.end());
  for (const auto& t : mc_terms(mc)) got.insert({t.i + 1, t.j + 1, t.k + 1, t.coeff});
  CHECK(got == want);
  std::string text = format_mc(mc);
  CHECK(text.find("dE1 = 0\n") != std::string::npos);
  CHECK(text.find("dE9 - E1^E9 - E2^E9 - 2 E3^E9 + E4^E8 - E6^E7 = 0") != std::string::npos);
}

TEST_CASE("combinatorial and commutator structure constants agree") {
  for (int n = 2; n <= 7; ++n) {
    MCStructure a = borel_mc(n), b = borel_mc_from_matrices(n);
    REQUIRE(a.d == b.d);
    CHECK(a.d == n * (n + 1) / 2 - 1);
    double e = 0;
    for (int i = 0; i < a.d; ++i)
      for (int j = 0; j < a.d; ++j)
        for (int k = 0; k < a.d; ++k) e = std::max(e, std::abs(a.f(i, j, k) - b.f(i, j, k)));
    CHECK(e == 0.0);
    CHECK(jacobi_error(a.f) < 1e-12);
  }
}

TEST_CASE("r = 1 Maurer-Cartan system") {
  MCStructure mc = r1_mc(1);
  CHECK(mc.d == 3);
  auto terms = mc_terms(mc);
  REQUIRE(terms.size() == 2);
  CHECK(terms[0].i == 1);
  CHECK(terms[0].j == 0);
  CHECK(terms[0].k == 1);
  CHECK(terms[0].coeff == 1.0);
  CHECK(terms[1].i == 2);
  CHECK(terms[1].k == 2);
  CHECK(jacobi_error(r1_mc(5).f) == 0.0);
  auto gen = solvable_generators(SpaceId::hyperbolic(3));
  double e = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) e = std::max(e, std::abs(gen.f(i, j, k) - mc.f(i, j, k)));
  CHECK(e < 1e-14);
}

TEST_CASE("A_l root system") {
  auto roots = aN_root_system(3);
  CHECK(roots.size() == 12);
  CHECK(std::count_if(roots.begin(), roots.end(), [](const Root& r) { return r.positive; }) == 6);
  CHECK(roots.front().positive);
}

TEST_CASE("general ansatz gives exactly 15 distinct quadratic equations") {
  ConstraintSystem c = build_constraints(mc_for_space(ap::h3()), mc_for_space(ap::sl4()));
  const int nv = 21;
  auto eval = [&](const Vec& v) { return c.evaluate(full_ansatz(v)); };
  const Vec zero = Vec::Zero(nv);
  const Vec r0 = eval(zero);
  std::vector<Poly> polys(r0.size());
  std::vector<Vec> up(nv), dn(nv);
  for (int i = 0; i < nv; ++i) {
    Vec e = Vec::Zero(nv);
    e(i) = 1;
    up[i] = eval(e);
    dn[i] = eval(-e);
  }
  for (int row = 0; row < r0.size(); ++row) {
    Poly& p = polys[row];
    p[{ONE, ONE}] = r0(row);
    for (int i = 0; i < nv; ++i) {
      p[{ONE, i}] = 0.5 * (up[i](row) - dn[i](row));
      p[{i, i}] = 0.5 * (up[i](row) + dn[i](row)) - r0(row);
    }
  }
  for (int i = 0; i < nv; ++i)
    for (int j = i + 1; j < nv; ++j) {
      Vec e = Vec::Zero(nv);
      e(i) = e(j) = 1;
      Vec rij = eval(e);
      for (int row = 0; row < r0.size(); ++row)
        polys[row][{i, j}] = rij(row) - up[i](row) - up[j](row) + r0(row);
    }

  std::vector<Poly> distinct;
  for (const auto& p : polys) {
    if (normalized(p).empty()) continue;
    bool seen = false;
    for (const auto& q : distinct) seen = seen || same(p, q);
    if (!seen) distinct.push_back(p);
  }
  auto want = equatoni();
  CHECK(distinct.size() == 15);
  for (size_t k = 0; k < want.size(); ++k) {
    bool found = false;
    for (const auto& p : distinct) found = found || same(p, want[k]);
    CHECK_MESSAGE(found, "equation " << k + 1);
  }
}

TEST_CASE("appendix matrices satisfy the homomorphism constraints") {
  ConstraintSystem inj = build_constraints(mc_for_space(ap::h3()), mc_for_space(ap::sl4()));
  ConstraintSystem res = build_constraints(mc_for_space(ap::sl4()), mc_for_space(ap::h3()));
  CHECK(residual(ap::w_can(), inj) <= 1e-12);
  CHECK(max_abs(ap::w12(ap::w12_substitution()) - ap::w_can()) == 0.0);
  auto rng = seeded(11);
  for (const auto& fx : ap::appendix_fixtures()) {
    const ConstraintSystem& c = fx.source == ap::h3() ? inj : res;
    double e = 0;
    for (int i = 0; i < (fx.params ? 100 : 1); ++i) e = std::max(e, residual(fx.build(fx.sample(rng)), c));
    CHECK_MESSAGE(e <= 1e-10, fx.name);
  }
  Mat junk = uniform_mat(rng, 9, 3, -1, 1);
  CHECK(residual(junk, inj) > 1e-2);
}

TEST_CASE("constraint Jacobian matches finite differences") {
  ConstraintSystem c = build_constraints(mc_for_space(ap::sl4()), mc_for_space(ap::h3()));
  auto rng = seeded(5);
  Mat W = uniform_mat(rng, 3, 9, -1, 1);
  Mat J = c.jacobian(W);
  REQUIRE(J.rows() == c.size());
  REQUIRE(J.cols() == 27);
  for (int v = 0; v < 27; ++v) {
    Mat p = W, m = W;
    p(v % 3, v / 3) += 1e-6;
    m(v % 3, v / 3) -= 1e-6;
    Vec fd = (c.evaluate(p) - c.evaluate(m)) / 2e-6;
    CHECK((fd - J.col(v)).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("r = 1 homomorphism is a group homomorphism and composes") {
  auto rng = seeded(3);
  for (int t = 0; t < 200; ++t) {
    const int p1 = 1 + static_cast<int>(uniform01(rng) * 5), p2 = 1 + static_cast<int>(uniform01(rng) * 5);
    const SpaceId s = SpaceId::layer(p1 - 1);
    Mat W = uniform_mat(rng, p2, p1, -1, 1);
    Vec b = uniform_vec(rng, p2, -1, 1);
    SolvCoords u{s, uniform_vec(rng, s.dim(), -1, 1)}, w{s, uniform_vec(rng, s.dim(), -1, 1)};
    Vec lhs = r1_homomorphism(W, b, group_product(u, w)).values;
    Vec rhs = group_product(r1_homomorphism(W, b, u), r1_homomorphism(W, b, w)).values;
    CHECK(max_abs(lhs - rhs) <= 1e-10);
  }
  SolvCoords x{SpaceId::layer(1), Vec::Zero(3)};
  CHECK(max_abs(r1_homomorphism(Mat::Identity(2, 2), Vec::Zero(2), x).values) == 0.0);
  CHECK_THROWS(r1_homomorphism(Mat::Identity(3, 3), Vec::Zero(3), x));
}

TEST_CASE("r = 1 algebra matrix integrates to the closed-form coordinate map") {
  auto rng = seeded(8);
  const SpaceId s = SpaceId::layer(2), t = SpaceId::layer(1);
  Mat W = uniform_mat(rng, 2, 3, -1, 1);
  Vec b = uniform_vec(rng, 2, -1, 1);
  HomoMatrix H{r1_algebra_matrix(W, b), s, t, Vec()};
  CHECK(residual(H) <= 1e-12);
  for (int i = 0; i < 5; ++i) {
    SolvCoords x{s, uniform_vec(rng, 4, -1, 1)};
    IntegrationResult ir = integrate_coordinate_map(H, x);
    CHECK(max_abs(ir.coords.values - r1_homomorphism(W, b, x).values) <= 1e-9);
    CHECK_FALSE(ir.reduced_accuracy);
  }
}

TEST_CASE("integration recovers the fixture coordinate maps") {
  auto rng = seeded(21);
  HomoMatrix can{ap::w_can(), ap::h3(), ap::sl4(), Vec()};
  for (int i = 0; i < 10; ++i) {
    Vec x = uniform_vec(rng, 3, -1, 1);
    CHECK(max_abs(integrate_coordinate_map(can, SolvCoords{ap::h3(), x}).coords.values - ap::canonical_embedding(x)) <= 1e-8);
  }
  // The fixture maps carry integration constants, i.e. they are left translates of the zero-start map.
  for (int i = 0; i < 5; ++i) {
    Vec p = ap::sample_w11_map_params(rng);
    Vec x = uniform_vec(rng, 3, -1, 1);
    HomoMatrix W{ap::w11(p.head(11)), ap::h3(), ap::sl4(), Vec()};
    Vec phi0 = ap::w11_map(p, Vec::Zero(3)), phix = ap::w11_map(p, x);
    IntegrationResult ir = integrate_path(W, {Vec::Zero(3), x}, phi0);
    CHECK(max_abs(ir.coords.values - phix) <= 1e-8);
    Vec zero_start = integrate_coordinate_map(W, SolvCoords{ap::h3(), x}).coords.values;
    Vec expect = group_product(group_inverse(SolvCoords{ap::sl4(), phi0}), SolvCoords{ap::sl4(), phix}).values;
    CHECK(max_abs(zero_start - expect) <= 1e-8);
  }
  for (int i = 0; i < 5; ++i) {
    Vec c = uniform_vec(rng, 4, -1, 1);
    Vec y = uniform_vec(rng, 9, -0.5, 0.5);
    HomoMatrix W{ap::restriction(3, c), ap::sl4(), ap::h3(), Vec()};
    IntegrationResult ir = integrate_path(W, {Vec::Zero(9), y}, ap::w3_phi(c, Vec::Zero(9)));
    CHECK(max_abs(ir.coords.values - ap::w3_phi(c, y)) <= 1e-8);
  }
}

TEST_CASE("integrator rejects non-homomorphisms") {
  auto rng = seeded(2);
  HomoMatrix bad{uniform_mat(rng, 9, 3, -1, 1), ap::h3(), ap::sl4(), Vec()};
  CHECK_THROWS(integrate_coordinate_map(bad, SolvCoords{ap::h3(), Vec::Ones(3)}));
}
