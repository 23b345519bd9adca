#pragma once

#include "cartan/homo.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace cartan {

// A known solution shape: entries outside `free` are held at `pinned`.
struct BranchTemplate {
  std::string name;
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> free;
  Mat pinned;
  std::function<bool(const Mat&)> member;
};

struct SolveOptions {
  std::uint64_t seed = 0;
  std::vector<BranchTemplate> templates;
  int max_iterations = 300;
  double tolerance = 1e-10;
};

struct Solution {
  Mat W;
  double residual = 0.0;
  std::string branch_tag;
  std::uint64_t seed = 0;
  // Which start family produced it: "identity", "dense" or a template name.
  std::string start;
};

std::vector<BranchTemplate> branch_templates(const SpaceId& source, const SpaceId& target);
std::string tag_branch(const Mat& W, const std::vector<BranchTemplate>& templates);

// Levenberg-Marquardt from an identity-extension start, `seeds` dense uniform(-1,1) starts, and `seeds`
// starts inside each template. Returns verified solutions, deduplicated and sorted by entries.
std::vector<Solution> solve_numeric(const ConstraintSystem& c, int seeds, const SolveOptions& options = {});

}  // namespace cartan
