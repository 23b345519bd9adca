#include "cartan/classify.hpp"

#include "cartan/errors.hpp"
#include "cartan/symspace.hpp"

#include <algorithm>
#include <cmath>

namespace cartan {

namespace {

void check_point(const Separator& sep, const SolvCoords& p) {
  if (!p.space.is_r1()) fail(ErrorKind::unsupported, "separators are defined on r = 1 layers");
  if (sep.w.size() != p.space.subpaint_dim()) fail(ErrorKind::mismatch, "separator normal has the wrong length");
  if (std::abs(p.values(0)) > kCartanBound) fail(ErrorKind::range, "Cartan coordinate outside the bound |w| <= 300");
}

}  // namespace

double h_value(const Separator& sep, const SolvCoords& p) {
  check_point(sep, p);
  const double y1 = p.values(0);
  const auto y2 = p.values.tail(p.values.size() - 1);
  return sep.alpha * std::exp(-y1) + 0.5 * sep.w.dot(y2) + sep.beta * std::exp(y1) * (1.0 + 0.25 * y2.squaredNorm());
}

double separator_norm(const Separator& sep) {
  double n2 = sep.w.squaredNorm() - 4.0 * sep.alpha * sep.beta;
  if (!(n2 > 0.0)) fail(ErrorKind::degenerate_separator, "separator needs |w|^2 - 4 alpha beta > 0");
  return std::sqrt(n2);
}

double signed_distance(const Separator& sep, const SolvCoords& p) {
  const double n = separator_norm(sep);
  return std::asinh(h_value(sep, p) / n);
}

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

double sigma_tilde(double x) { return sigmoid(std::sinh(x)); }

double binary_prob(const Separator& sep, const SolvCoords& p) { return sigmoid(signed_distance(sep, p)); }

bool binary_predict(const Separator& sep, const SolvCoords& p) { return binary_prob(sep, p) > 0.5; }

double binary_nll(const std::vector<LabeledPoint>& data, const Separator& sep) {
  if (data.empty()) fail(ErrorKind::invalid_argument, "binary_nll needs data");
  double s = 0.0;
  for (const auto& d : data) {
    double pr = std::clamp(binary_prob(sep, d.p), kProbClamp, 1.0 - kProbClamp);
    s -= d.y == 1 ? std::log(pr) : std::log(1.0 - pr);
  }
  return s;
}

Vec softmax(const Vec& logits) {
  Vec e = (logits.array() - logits.maxCoeff()).exp().matrix();
  return e / e.sum();
}

Vec softmax_probs(const SeparatorBank& bank, const SolvCoords& p) {
  if (bank.size() < 2) fail(ErrorKind::invalid_argument, "softmax head needs K >= 2 separators");
  Vec delta(static_cast<int>(bank.size()));
  for (size_t k = 0; k < bank.size(); ++k) delta(static_cast<int>(k)) = signed_distance(bank[k], p);
  return softmax(delta);
}

double multiclass_nll(const std::vector<LabeledPoint>& data, const SeparatorBank& bank) {
  if (data.empty()) fail(ErrorKind::invalid_argument, "multiclass_nll needs data");
  const int K = static_cast<int>(bank.size());
  double s = 0.0;
  for (const auto& d : data) {
    if (d.y < 1 || d.y > K) fail(ErrorKind::invalid_argument, "label outside 1..K");
    Vec pr = softmax_probs(bank, d.p);
    s -= std::log(std::max(pr(d.y - 1), kProbClamp));
  }
  return s;
}

bool separator_point(const Separator& sep, const Vec& y2, double* y1) {
  // h = 0 is quadratic in z = e^{Y1}: beta (1 + |Y2|^2/4) z^2 + (<w,Y2>/2) z + alpha = 0.
  const double a = sep.beta * (1.0 + 0.25 * y2.squaredNorm());
  const double b = 0.5 * sep.w.dot(y2);
  const double c = sep.alpha;
  double z = -1.0;
  if (std::abs(a) < 1e-300) {
    if (b != 0.0) z = -c / b;
  } else {
    double disc = b * b - 4 * a * c;
    if (disc >= 0) {
      double sq = std::sqrt(disc);
      double q = -0.5 * (b + (b >= 0 ? sq : -sq));
      double r1 = q / a;
      double r2 = q != 0.0 ? c / q : -1.0;
      z = std::max(r1, r2);
    }
  }
  if (!(z > 0.0)) return false;
  *y1 = std::log(z);
  return std::abs(*y1) <= kCartanBound;
}

}  // namespace cartan
