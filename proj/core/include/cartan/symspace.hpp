#pragma once

#include "cartan/space.hpp"

namespace cartan {

inline constexpr double kCartanBound = 300.0;

EtaForm build_eta(const SpaceId& space);

// Generators, weights and pivots only.
SolvAlgebra solvable_basis(const SpaceId& space);
// Same plus structure constants read from numeric commutators.
SolvAlgebra solvable_generators(const SpaceId& space);

Vec project_onto_basis(const SolvAlgebra& alg, const Mat& x);
Mat algebra_element(const SolvAlgebra& alg, const Vec& coeffs);

TriangularElement sigma(const SolvCoords& coords);
TriangularElement sigma(const SolvAlgebra& alg, const Vec& y);
SolvCoords sigma_inv(const TriangularElement& L);
Vec sigma_inv(const SolvAlgebra& alg, const Mat& L);

TriangularElement cholesky_crout(const CosetPoint& M);
CosetPoint to_coset(const TriangularElement& L);

SolvCoords group_product(const SolvCoords& u, const SolvCoords& w);
SolvCoords group_inverse(const SolvCoords& u);

// Columns are the left-invariant one-forms L^{-1} dL evaluated on d/dY_mu.
Mat coframe(const SolvAlgebra& alg, const Vec& y);

Mat metric_at(const SolvCoords& coords);
double distance_constant(const SpaceId& space);
double coset_distance(const CosetPoint& a, const CosetPoint& b);
SolvCoords ts_project(const SolvCoords& coords);

SolvCoords origin(const SpaceId& space);

// Invariant diagnostics, all returning max-abs deviations.
double eta_orthogonality_error(const SpaceId& space, const Mat& g);
double triangularity_error(const Mat& L);
double coset_eta_error(const CosetPoint& M);

// exp(A); exact finite series for nilpotent or diagonal A.
Mat matrix_exp(const Mat& a);

namespace r1 {
// Closed forms for so(1, 1+p): coordinates (w1, w_2..w_{p+1}).
Mat sigma(const Vec& w);
Vec sigma_inv(const Mat& L);
Vec product(const Vec& u, const Vec& w);
Vec inverse(const Vec& u);
}  // namespace r1

}  // namespace cartan
