#pragma once

#include "cartan/homo.hpp"

#include <functional>
#include <random>
#include <string>
#include <vector>

namespace cartan::appendix {

SpaceId h3();
SpaceId sl4();

Mat w_can();
Mat w11(const Vec& delta);
Mat w12(const Vec& delta);
// Parameter values sending w12 onto w_can.
Vec w12_substitution();

inline const std::vector<int> kRestrictionIds{1, 2, 3, 7, 10};
int restriction_params(int which);
Mat restriction(int which, const Vec& a);

// Nonlinear coordinate maps, including their integration constants.
Vec w11_map(const Vec& delta, const Vec& w);
Vec w3_phi(const Vec& a, const Vec& y);
Vec canonical_embedding(const Vec& w);

struct FamilyFixture {
  std::string name;
  SpaceId source;
  SpaceId target;
  int params = 0;
  std::function<Mat(const Vec&)> build;
  // Draws parameters away from the poles of the rational entries.
  std::function<Vec(std::mt19937_64&)> sample;
};

std::vector<FamilyFixture> appendix_fixtures();
Vec sample_w11_map_params(std::mt19937_64& rng);

}  // namespace cartan::appendix
