#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cartan/errors.hpp"
#include "cartan/homo.hpp"
#include "cartan/isometry.hpp"
#include "cartan/net.hpp"
#include "cartan/random.hpp"
#include "cartan/symspace.hpp"

#include <Eigen/QR>

#include <cstring>

using namespace cartan;

namespace {

double max_abs(const Vec& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

NetworkConfig config(Task task = Task::multiclass, int K = 3) {
  NetworkConfig c;
  c.input_dim = 4;
  c.layers = {{3}, {1}, {2}};
  c.task = task;
  c.K = K;
  return c;
}

ParamSet random_params(const NetworkConfig& c, std::uint64_t seed) {
  auto rng = seeded(seed, 99);
  return unflatten(c, uniform_vec(rng, param_count(c), -0.5, 0.5));
}

Mat random_orthogonal(std::mt19937_64& rng, int n) {
  Mat g(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) g(i, j) = normal(rng);
  Eigen::HouseholderQR<Mat> qr(g);
  return qr.householderQ() * Mat::Identity(n, n);
}

double dist(const SolvCoords& a, const SolvCoords& b) { return coset_distance(to_coset(sigma(a)), to_coset(sigma(b))); }

}  // namespace

TEST_CASE("layout") {
  for (Task t : {Task::binary, Task::multiclass, Task::regression}) {
    NetworkConfig c = config(t);
    auto layout = param_layout(c);
    int off = 0;
    for (const auto& b : layout) {
      CHECK(b.offset == off);
      off += b.size();
    }
    CHECK(off == param_count(c));
    CHECK(layout[0].name == "Q");
    CHECK(layout[0].rows == 5);
    CHECK(layout[0].cols == 4);
    CHECK(layout[1].name == "Lambda");
    CHECK(layout[1].rows == 3);
    CHECK(layout[2].name == "W0");
    CHECK(layout[2].rows == 2);
    CHECK(layout[2].cols == 4);
  }
  // Q 5x4, Lambda 3, W0 2x4, b0 2, Psi0 1, W1 3x2, b1 3, Psi1 2, alpha 3, beta 3, w 3x3.
  CHECK(param_count(config()) == 20 + 3 + 8 + 2 + 1 + 6 + 3 + 2 + 3 + 3 + 9);
}

TEST_CASE("flatten roundtrip") {
  NetworkConfig c = config();
  ParamSet p = random_params(c, 1);
  FlatParams f = flatten(c, p);
  FlatParams g = flatten(c, unflatten(c, f));
  REQUIRE(f.values.size() == g.values.size());
  CHECK(std::memcmp(f.values.data(), g.values.data(), sizeof(double) * f.values.size()) == 0);
  ParamSet z = unflatten(c, Vec::Zero(param_count(c)));
  CHECK(z.Q.isZero(0));
  CHECK(z.transitions[1].W.isZero(0));
  CHECK(z.separators[2].w.isZero(0));
  FlatParams bad = f;
  bad.layout[1].rows += 1;
  CHECK_THROWS_AS(unflatten(c, bad), Error);
  CHECK_THROWS_AS(unflatten(c, Vec::Zero(3)), Error);
}

TEST_CASE("initialization") {
  NetworkConfig c = config();
  ParamSet a = init_params(c, 5), b = init_params(c, 5);
  CHECK(flatten(c, a).values == flatten(c, b).values);
  CHECK(a.Q.cwiseAbs().maxCoeff() <= 0.5);
  CHECK(a.transitions[0].W.cwiseAbs().maxCoeff() <= 0.5);
  CHECK(a.transitions[0].b.isZero(0));
  CHECK(a.transitions[0].psi.isZero(0));
  CHECK(a.lambda.isZero(0));
  for (const auto& s : a.separators) CHECK(s.w.norm() >= 0.1);
  CHECK(flatten(c, init_params(c, 6)).values != flatten(c, a).values);
}

TEST_CASE("inject") {
  auto rng = seeded(2);
  Mat Q = uniform_mat(rng, 4, 3, -1, 1);
  CHECK(inject(Q, Vec::Zero(2), Vec::Zero(3)).values.isZero(0));
  Vec x = uniform_vec(rng, 3, -1, 1);
  CHECK(inject(Q, Vec::Zero(2), x).values == Q * x);
  Mat On = random_orthogonal(rng, 4).leftCols(3);  // isometric linear stage
  CHECK(inject(On, Vec::Zero(2), x).values.norm() == doctest::Approx(x.norm()).epsilon(1e-14));
  Vec lam = uniform_vec(rng, 2, -1, 1);
  SolvCoords y = inject(Q, lam, x);
  SolvCoords ref{SpaceId::hyperbolic(4), Q * x};
  auto gens = build_fiber_generators(ref.space);
  for (int j = 0; j < 2; ++j) ref = isometry_action(fiber_rotation(gens[j], lam(j)), ref);
  CHECK(max_abs(y.values - ref.values) <= 1e-14);
  Vec nan = x;
  nan(0) = std::nan("");
  CHECK_THROWS_AS(inject(Q, Vec::Zero(2), nan), Error);
  CHECK_THROWS_AS(inject(Q, Vec::Zero(3), x), Error);
}

TEST_CASE("layer_forward") {
  auto rng = seeded(3);
  const SpaceId s = SpaceId::hyperbolic(4);
  SolvCoords y{s, uniform_vec(rng, 4, -1, 1)};
  CHECK(layer_forward(Mat::Identity(3, 3), Vec::Zero(3), Vec::Zero(2), y).values == y.values);
  Mat W = uniform_mat(rng, 2, 3, -1, 1);
  Vec b = uniform_vec(rng, 2, -1, 1);
  CHECK(layer_forward(W, b, Vec::Zero(1), y).values == r1_homomorphism(W, b, y).values);
  // The rotation stage is an isometry of the target layer.
  SolvCoords z{s, uniform_vec(rng, 4, -1, 1)};
  Vec psi = uniform_vec(rng, 2, -1, 1);
  Mat I = Mat::Identity(3, 3);
  const double before = dist(y, z);
  const double after = dist(layer_forward(I, Vec::Zero(3), psi, y), layer_forward(I, Vec::Zero(3), psi, z));
  CHECK(after == doctest::Approx(before).epsilon(1e-10));
  CHECK_THROWS_AS(layer_forward(W, b, Vec::Zero(2), y), Error);
}

TEST_CASE("forward") {
  NetworkConfig one;
  one.input_dim = 3;
  one.layers = {{2}};
  CHECK(forward(one, zero_params(one), Vec::Ones(3)).values.isZero(0));

  // Stacked identities pass the injected point through, truncated to the last layer.
  auto rng = seeded(4);
  NetworkConfig c;
  c.input_dim = 4;
  c.layers = {{3}, {1}};
  ParamSet p = zero_params(c);
  p.Q = uniform_mat(rng, 5, 4, -1, 1);
  p.transitions[0].W = Mat::Identity(2, 4);
  Vec x = uniform_vec(rng, 4, -1, 1);
  Vec y = forward(c, p, x).values;
  CHECK(y == (p.Q * x).head(3));

  // Paint rotations in layer 1 are absorbed by W.
  ParamSet q = random_params(c, 7);
  q.lambda.setZero();
  Mat O = random_orthogonal(rng, 4);
  ParamSet r = q;
  Mat block = Mat::Identity(5, 5);
  block.bottomRightCorner(4, 4) = O;
  r.Q = block * q.Q;
  r.transitions[0].W = q.transitions[0].W * O.transpose();
  CHECK(max_abs(forward(c, q, x).values - forward(c, r, x).values) <= 1e-10);

  // A zero row of W with a zero bias entry zeroes that subPaint coordinate.
  ParamSet zr = q;
  zr.transitions[0].W.row(1).setZero();
  zr.transitions[0].b(1) = 0;
  zr.transitions[0].psi.setZero();
  CHECK(forward(c, zr, x).values(2) == 0.0);

  // Finite, continuous response.
  for (int t = 0; t < 50; ++t) {
    Vec xt = uniform_vec(rng, 4, -2, 2);
    for (int k = 0; k < 4; ++k) {
      Vec a = xt, b = xt;
      a(k) += 1e-6;
      b(k) -= 1e-6;
      Vec d = (forward(c, q, a).values - forward(c, q, b).values) / 2e-6;
      CHECK(d.allFinite());
      CHECK(d.norm() < 1e3);
    }
  }
}

TEST_CASE("config validation") {
  NetworkConfig c;
  c.input_dim = 0;
  c.layers = {{1}};
  CHECK_THROWS_AS(validate(c), Error);
  c.input_dim = 2;
  c.layers.clear();
  CHECK_THROWS_AS(validate(c), Error);
  c.layers = {{1}};
  c.task = Task::multiclass;
  c.K = 1;
  CHECK_THROWS_AS(validate(c), Error);
  CHECK(parse_task("regression") == Task::regression);
  CHECK_THROWS_AS(parse_task("ranking"), Error);
}
