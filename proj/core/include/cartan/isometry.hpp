#pragma once

#include "cartan/space.hpp"

#include <vector>

namespace cartan {

enum class ElementKind { solvable, paint, grassmannian, external };
const char* to_string(ElementKind k);

struct GroupElement {
  SpaceId space;
  Mat matrix;
  ElementKind kind = ElementKind::external;
};

struct PaintRotation {
  SpaceId space;
  Mat orthogonal;
};

struct FiberGenerator {
  SpaceId space;
  int index = 1;
  Mat matrix;
};

struct AdjointResult {
  CosetPoint point;
  // Set when g was not eta-orthogonal; the result is then not an isometric image.
  bool external = false;
};

AdjointResult adjoint_on_coset(const GroupElement& g, const CosetPoint& m);
SolvCoords isometry_action(const GroupElement& g, const SolvCoords& coords);

GroupElement paint_embed(const PaintRotation& rot);
SolvCoords paint_rotate(const PaintRotation& rot, const SolvCoords& coords);
SolvCoords bias_translate(const SolvCoords& u, const SolvCoords& coords);

// For H^{q+2} there are q generators; F_j rotates w1 into the fiber coordinate w_{j+2}.
std::vector<FiberGenerator> build_fiber_generators(const SpaceId& space);
GroupElement fiber_rotation(const FiberGenerator& f, double angle);

GroupElement classify_element(const Mat& g, const SpaceId& space);

// Value and derivatives of coords -> isometry_action(exp(angle * F), coords) on r = 1 spaces.
struct ActionJet {
  Vec value;
  Mat d_coords;
  Vec d_angle;
};
ActionJet r1_rotation_jet(const Mat& generator, double angle, const Vec& w);
// Value part of the jet; avoids the Cholesky round trip, which breaks down far from the origin.
Vec r1_rotate(const Mat& generator, double angle, const Vec& w);

}  // namespace cartan
