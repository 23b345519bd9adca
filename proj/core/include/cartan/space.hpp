#pragma once

#include <Eigen/Core>

#include <string>
#include <vector>

namespace cartan {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

enum class Family { so, sl };

// so family: the group SO(r, r+q) acting on R^{2r+q}.
// sl family: SL(n, R) with its Borel subgroup.
struct SpaceId {
  Family family = Family::so;
  int r = 1;
  int q = 0;
  int n = 0;

  static SpaceId so(int r, int q);
  static SpaceId sl(int n);
  // H^k = SO(1,k)/SO(k).
  static SpaceId hyperbolic(int k);
  // Layer tagged q carries w1 plus q+1 subPaint coordinates, i.e. H^{q+2}.
  static SpaceId layer(int q);

  int matrix_size() const;
  int dim() const;
  bool is_r1() const { return family == Family::so && r == 1; }
  // Length of the subPaint vector for r = 1.
  int subpaint_dim() const { return q; }
  // Layer tag for r = 1 spaces (number of fiber generators).
  int layer_q() const { return q - 1; }
  std::string name() const;

  friend bool operator==(const SpaceId&, const SpaceId&) = default;
};

void validate(const SpaceId& s);
// Parses "H3", "so(1,2)", "sl(4)", "r1(2)" (layer tag), "solv_so(1,2)", "borel_sl(4)".
SpaceId parse_space(const std::string& text);

struct SolvCoords {
  SpaceId space;
  Vec values;
};

struct TriangularElement {
  SpaceId space;
  Mat matrix;
};

struct CosetPoint {
  SpaceId space;
  Mat matrix;
};

// f(i, j, k) stores f^i_{jk} for [T_j, T_k] = f^i_{jk} T_i.
class StructureConstants {
 public:
  StructureConstants() = default;
  explicit StructureConstants(int d) : d_(d), data_(static_cast<size_t>(d) * d * d, 0.0) {}
  int dim() const { return d_; }
  double operator()(int i, int j, int k) const { return data_[idx(i, j, k)]; }
  double& operator()(int i, int j, int k) { return data_[idx(i, j, k)]; }

 private:
  size_t idx(int i, int j, int k) const { return (static_cast<size_t>(i) * d_ + j) * d_ + k; }
  int d_ = 0;
  std::vector<double> data_;
};

struct EtaForm {
  int n = 0;
  Mat eta_t;
  Mat eta_b;
  Mat omega;
};

struct SolvAlgebra {
  SpaceId space;
  int d = 0;
  int n_cartan = 0;
  std::vector<Mat> generators;
  // Sigma(Y) = prod_i exp(weight_i * Y_i * T_i).
  std::vector<double> weights;
  std::vector<std::string> labels;
  // Position read by the inverse map for each root generator, (-1,-1) for Cartans.
  std::vector<std::pair<int, int>> pivots;
  // Maps a vectorized matrix onto its coefficients in the generator basis.
  Mat projector;
  StructureConstants f;
};

}  // namespace cartan
