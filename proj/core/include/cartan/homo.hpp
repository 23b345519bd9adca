#pragma once

#include "cartan/space.hpp"

#include <string>
#include <vector>

namespace cartan {

struct RootLabel {
  int h = 0;
  int k = 1;
  friend bool operator==(const RootLabel&, const RootLabel&) = default;
};

struct Root {
  // Components in the epsilon basis of R^{l+1}.
  std::vector<int> coeffs;
  bool positive = false;
  // Set for positive roots only.
  RootLabel label;
};

std::vector<Root> aN_root_system(int l);

// Canonical form: dE^i + 1/2 f^i_jk E^j ^ E^k = 0.
struct MCStructure {
  std::string name;
  SpaceId space;
  int d = 0;
  StructureConstants f;
  std::vector<std::string> labels;
};

struct MCTerm {
  int i = 0;
  int j = 0;
  int k = 0;
  double coeff = 0.0;
};

// Combinatorial construction from root labels.
MCStructure borel_mc(int n);
// Same algebra read off numeric commutators of the matrix basis.
MCStructure borel_mc_from_matrices(int n);
// Layer tag q: one Cartan form and q+1 forms with dE^{1+i} + E^1 ^ E^{1+i} = 0.
MCStructure r1_mc(int q);
MCStructure mc_for_space(const SpaceId& space);

// Nonzero terms with j < k, sorted by (i, j, k).
std::vector<MCTerm> mc_terms(const MCStructure& mc);
std::string format_mc(const MCStructure& mc);
double jacobi_error(const StructureConstants& f);

struct HomoMatrix {
  Mat W;
  SpaceId source;
  SpaceId target;
  // Target translation of the r = 1 closed form; empty when unused.
  Vec b;
};

class ConstraintSystem {
 public:
  ConstraintSystem() = default;
  ConstraintSystem(MCStructure source, MCStructure target);

  const MCStructure& source() const { return source_; }
  const MCStructure& target() const { return target_; }
  int rows() const { return target_.d; }
  int cols() const { return source_.d; }
  int size() const { return target_.d * source_.d * (source_.d - 1) / 2; }

  // R^i_{bc} = W^i_a g^a_{bc} - f^i_jk W^j_b W^k_c for b < c, ordered by (i, b, c).
  Vec evaluate(const Mat& W) const;
  // Derivative with respect to the column-major entries of W.
  Mat jacobian(const Mat& W) const;

 private:
  MCStructure source_;
  MCStructure target_;
};

ConstraintSystem build_constraints(const MCStructure& source, const MCStructure& target);
double residual(const Mat& W, const ConstraintSystem& c);
double residual(const HomoMatrix& W, const ConstraintSystem& c);
double residual(const HomoMatrix& W);

// (Y1, Y2) -> (Y1, W Y2 + (1 - exp(-Y1)) b) between r = 1 spaces.
SolvCoords r1_homomorphism(const Mat& W, const Vec& b, const SolvCoords& coords);
// Algebra matrix [[1, 0], [b, W]] whose coordinate map is r1_homomorphism(W, b).
Mat r1_algebra_matrix(const Mat& W, const Vec& b);

struct IntegrationResult {
  SolvCoords coords;
  double richardson_gap = 0.0;
  bool reduced_accuracy = false;
  int steps = 0;
};

inline constexpr int kStepsPerUnitLength = 256;

// Integrates E(Y) dY = W eps(x) dx along the straight path from the origin, starting at Y = 0.
IntegrationResult integrate_coordinate_map(const HomoMatrix& W, const SolvCoords& source_coords);
// Polyline version with an explicit starting value in the target.
IntegrationResult integrate_path(const HomoMatrix& W, const std::vector<Vec>& path, const Vec& start);

}  // namespace cartan
