#include "cartan/fixtures.hpp"

#include "cartan/errors.hpp"
#include "cartan/random.hpp"

#include <cmath>

namespace cartan::appendix {

namespace {

constexpr double kS = 0.70710678118654752440;

void need(const Vec& v, int n, const char* what) {
  if (v.size() != n) fail(ErrorKind::mismatch, std::string(what) + " needs " + std::to_string(n) + " parameters");
}

// Uniform(-1, 1) with |x| >= gap, also kept away from the listed poles.
double away(std::mt19937_64& rng, double gap = 0.25) {
  for (;;) {
    double x = uniform(rng, -1.0, 1.0);
    if (std::abs(x) >= gap) return x;
  }
}

}  // namespace

SpaceId h3() { return SpaceId::hyperbolic(3); }
SpaceId sl4() { return SpaceId::sl(4); }

Mat w_can() {
  Mat w = Mat::Zero(9, 3);
  w(2, 0) = -1.0;
  w(3, 1) = kS;
  w(5, 2) = -kS;
  w(6, 2) = kS;
  w(7, 1) = -kS;
  return w;
}

Mat w11(const Vec& p) {
  need(p, 11, "W11");
  const double d1 = p(0), d2 = p(1), d3 = p(2), d4 = p(3), d5 = p(4), d6 = p(5), d7 = p(6), d8 = p(7),
               d9 = p(8), d10 = p(9), d11 = p(10);
  Mat w(9, 3);
  // clang-format off
  w << d11,      0.0, 0.0,
      -d11,      0.0, 0.0,
       d11 - 1,  0.0, 0.0,
       d1,       0.0, 0.0,
       d9,       0.0, 0.0,
       d10,      0.0, 0.0,
       d2,       d3,  d4,
       d5, (2 * d11 * d7 - d7 + d3 * d10) / d1, (2 * d11 * d8 - d8 + d4 * d10) / d1,
       d6,       d7,  d8;
  // clang-format on
  return w;
}

Mat w12(const Vec& p) {
  need(p, 12, "W12");
  const double d1 = p(0), d2 = p(1), d3 = p(2), d4 = p(3), d5 = p(4), d6 = p(5), d7 = p(6), d8 = p(7),
               d9 = p(8), d10 = p(9), d11 = p(10), d12 = p(11);
  Mat w(9, 3);
  // clang-format off
  w << 0.0, 0.0, 0.0,
       0.0, 0.0, 0.0,
      -1.0, 0.0, 0.0,
       d1,  d8,  d9,
       0.0, 0.0, 0.0,
       d10, d11, d12,
       d2,  d3,  d4,
       d5,  d6,  (d6 * d9 + d4 * d11 - d3 * d12) / d8,
       d7,  -d1 * d6 + d5 * d8 + d3 * d10 - d2 * d11,
       (-d1 * d6 * d9 + d5 * d8 * d9 + d4 * d8 * d10 - d1 * d4 * d11 + d1 * d3 * d12 - d2 * d8 * d12) / d8;
  // clang-format on
  return w;
}

Vec w12_substitution() {
  Vec p = Vec::Zero(12);
  p(7) = kS;    // d8
  p(11) = -kS;  // d12
  p(3) = kS;    // d4
  p(5) = -kS;   // d6
  return p;
}

int restriction_params(int which) {
  switch (which) {
    case 1: return 6;
    case 2: return 5;
    case 3: return 4;
    case 7: return 4;
    case 10: return 3;
  }
  fail(ErrorKind::invalid_argument, "no restriction fixture W" + std::to_string(which));
}

Mat restriction(int which, const Vec& a) {
  need(a, restriction_params(which), "restriction");
  Mat m = Mat::Zero(3, 9);
  switch (which) {
    case 1:
      for (int c = 0; c < 3; ++c) {
        m(1, c) = a(c);
        m(2, c) = a(3 + c);
      }
      break;
    case 2:
      m.row(0).head(3) << a(0), a(1), a(2);
      m.row(1).head(3) << a(3), a(1) * a(3) / a(0), a(2) * a(3) / a(0);
      m.row(2).head(3) << a(4), a(1) * a(4) / a(0), a(2) * a(4) / a(0);
      break;
    case 3:
      m.row(0).head(3) << -2.0, -1.0, -1.0;
      m.row(1).head(4) << a(0), a(0) / 2, a(0) / 2, a(1);
      m.row(2).head(4) << a(2), a(2) / 2, a(2) / 2, a(3);
      break;
    case 7:
      m(0, 0) = 1.0;
      m(0, 1) = -1.0;
      m(1, 0) = a(0);
      m(1, 1) = -a(0);
      m(1, 4) = a(1);
      m(2, 0) = a(2);
      m(2, 1) = -a(2);
      m(2, 4) = a(3);
      break;
    case 10:
      m.col(2) = a;
      break;
  }
  return m;
}

Vec w11_map(const Vec& p, const Vec& w) {
  need(p, 14, "w11_map");
  need(w, 3, "w11_map coordinates");
  const double d1 = p(0), d2 = p(1), d3 = p(2), d4 = p(3), d5 = p(4), d6 = p(5), d7 = p(6), d8 = p(7),
               d9 = p(8), d10 = p(9), d11 = p(10), d12 = p(11), d13 = p(12), d14 = p(13);
  const double w1 = w(0), w2 = w(1), w3 = w(2);
  const double ex = std::exp((2 * d11 - 1) * w1);
  const double em = std::exp(-2 * d11 * w1);
  const double k = 2 * d11 - 1;
  Vec y(9);
  y(0) = -2 * d11 * w1;
  y(1) = 2 * d11 * w1;
  y(2) = -2 * (d11 - 1) * w1;
  y(3) = d1 / k + d12 * ex;
  y(4) = d13 * em - d9 / (2 * d11);
  y(5) = d10 / k + d14 * ex;
  y(6) = -d2 + d1 * d9 / (2 * d11) - d3 * w2 - d4 * w3 + d1 * d13 * em / k;
  y(7) = (-2 * d11 * d5 + d5 - d9 * d10) / k + (-2 * d11 * d7 + d7 - d3 * d10) * w2 / d1 +
         (-2 * d11 * d8 + d8 - d4 * d10) * w3 / d1 - d9 * d14 * ex / (2 * d11);
  y(8) = (-d1 * d9 * d10 + d2 * d11 * d10 - d1 * d5 * d11 + d6 * d11) / (2 * (d11 - 1) * d11) - d7 * w2 - d8 * w3 -
         d1 * d10 * d13 * em / (k * k) - d1 * d13 * d14 * std::exp(-w1) / k;
  return y;
}

Vec w3_phi(const Vec& a, const Vec& y) {
  need(a, 4, "W3 map");
  need(y, 9, "W3 map coordinates");
  Vec w(3);
  w(0) = y(0) + y(1) / 2 + y(2) / 2;
  w(1) = 0.5 * (-2 * a(1) * y(3) - a(0));
  w(2) = 0.5 * (-2 * a(3) * y(3) - a(2));
  return w;
}

Vec canonical_embedding(const Vec& w) {
  need(w, 3, "canonical embedding");
  Vec y = Vec::Zero(9);
  y(2) = 2 * w(0);
  y(3) = -w(1) * kS;
  y(5) = w(2) * kS;
  y(6) = -w(2) * kS;
  y(7) = w(1) * kS;
  y(8) = 0.25 * (w(2) * w(2) - w(1) * w(1));
  return y;
}

Vec sample_w11_map_params(std::mt19937_64& rng) {
  Vec p(14);
  for (int i = 0; i < 14; ++i) p(i) = uniform(rng, -1.0, 1.0);
  p(0) = away(rng);
  // d11 away from 0, 1/2 and 1.
  for (;;) {
    double d11 = uniform(rng, -1.0, 1.5);
    if (std::abs(d11) > 0.2 && std::abs(d11 - 0.5) > 0.2 && std::abs(d11 - 1.0) > 0.2) {
      p(10) = d11;
      break;
    }
  }
  return p;
}

std::vector<FamilyFixture> appendix_fixtures() {
  std::vector<FamilyFixture> out;
  out.push_back({"W_can", h3(), sl4(), 0, [](const Vec&) { return w_can(); }, [](std::mt19937_64&) { return Vec(); }});
  out.push_back({"W_11", h3(), sl4(), 11, w11, [](std::mt19937_64& rng) {
                   Vec p = uniform_vec(rng, 11, -1.0, 1.0);
                   p(0) = away(rng);
                   return p;
                 }});
  out.push_back({"W_12", h3(), sl4(), 12, w12, [](std::mt19937_64& rng) {
                   Vec p = uniform_vec(rng, 12, -1.0, 1.0);
                   p(7) = away(rng);
                   return p;
                 }});
  for (int id : kRestrictionIds) {
    out.push_back({"W_" + std::to_string(id) + "rest", sl4(), h3(), restriction_params(id),
                   [id](const Vec& a) { return restriction(id, a); },
                   [id](std::mt19937_64& rng) {
                     Vec a = uniform_vec(rng, restriction_params(id), -1.0, 1.0);
                     if (id == 2) a(0) = away(rng);
                     return a;
                   }});
  }
  return out;
}

}  // namespace cartan::appendix
