#pragma once

#include "cartan/space.hpp"

#include <vector>

namespace cartan {

struct Separator {
  double alpha = 0.0;
  double beta = 0.0;
  Vec w;
};

using SeparatorBank = std::vector<Separator>;

inline constexpr double kProbClamp = 1e-12;

// alpha e^{-Y1} + <w, Y2>/2 + beta e^{Y1} (1 + |Y2|^2/4): the Minkowski pairing of the point with
// the normal (alpha + beta, w, alpha - beta), whose squared norm is |w|^2 - 4 alpha beta.
double h_value(const Separator& sep, const SolvCoords& p);
double separator_norm(const Separator& sep);
double signed_distance(const Separator& sep, const SolvCoords& p);

double sigmoid(double x);
double sigma_tilde(double x);

double binary_prob(const Separator& sep, const SolvCoords& p);
bool binary_predict(const Separator& sep, const SolvCoords& p);

struct LabeledPoint {
  SolvCoords p;
  int y = 0;
};

double binary_nll(const std::vector<LabeledPoint>& data, const Separator& sep);
Vec softmax(const Vec& logits);
Vec softmax_probs(const SeparatorBank& bank, const SolvCoords& p);
// Labels are 1..K.
double multiclass_nll(const std::vector<LabeledPoint>& data, const SeparatorBank& bank);

// Cartan coordinate on the separator for fixed Y2, if the surface crosses that fiber.
bool separator_point(const Separator& sep, const Vec& y2, double* y1);

}  // namespace cartan
