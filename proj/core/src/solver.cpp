#include "cartan/solver.hpp"

#include "cartan/errors.hpp"
#include "cartan/fixtures.hpp"
#include "cartan/random.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <optional>

namespace cartan {

namespace {

constexpr double kShapeTol = 1e-8;

using Mask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

bool near(double a, double b) { return std::abs(a - b) <= kShapeTol; }

bool zero_outside(const Mat& W, const Mask& keep) {
  for (int j = 0; j < W.cols(); ++j)
    for (int i = 0; i < W.rows(); ++i)
      if (!keep(i, j) && !near(W(i, j), 0.0)) return false;
  return true;
}

Mask full_ansatz_mask() {
  Mask m = Mask::Constant(9, 3, false);
  m.col(0).setConstant(true);
  m.block(3, 0, 6, 3).setConstant(true);
  return m;
}

std::vector<BranchTemplate> injection_templates() {
  std::vector<BranchTemplate> out;
  {
    BranchTemplate t;
    t.name = "W_11";
    t.free = full_ansatz_mask();
    t.free.block(3, 1, 3, 2).setConstant(false);
    t.pinned = Mat::Zero(9, 3);
    t.member = [](const Mat& W) {
      Mask keep = full_ansatz_mask();
      keep.block(3, 1, 3, 2).setConstant(false);
      if (!zero_outside(W, keep)) return false;
      return near(W(0, 0) + W(1, 0), 0.0) && near(W(2, 0), W(0, 0) - 1.0);
    };
    out.push_back(t);
  }
  {
    BranchTemplate t;
    t.name = "W_12";
    t.free = full_ansatz_mask();
    t.free.block(0, 0, 3, 1).setConstant(false);
    t.pinned = Mat::Zero(9, 3);
    t.pinned(2, 0) = -1.0;
    t.member = [](const Mat& W) {
      Mask keep = full_ansatz_mask();
      keep.block(0, 0, 3, 1).setConstant(false);
      keep.row(4).setConstant(false);
      keep(2, 0) = true;
      return zero_outside(W, keep) && near(W(2, 0), -1.0);
    };
    out.push_back(t);
  }
  return out;
}

std::vector<BranchTemplate> restriction_templates() {
  std::vector<BranchTemplate> out;
  auto mask = [](std::initializer_list<std::pair<int, int>> cells) {
    Mask m = Mask::Constant(3, 9, false);
    for (auto [i, j] : cells) m(i, j) = true;
    return m;
  };
  {
    BranchTemplate t;
    t.name = "W_10rest";
    t.free = mask({{0, 2}, {1, 2}, {2, 2}});
    t.pinned = Mat::Zero(3, 9);
    t.member = [m = t.free](const Mat& W) { return zero_outside(W, m) && !W.isZero(kShapeTol); };
    out.push_back(t);
  }
  {
    BranchTemplate t;
    t.name = "W_3rest";
    t.free = mask({{1, 0}, {1, 1}, {1, 2}, {1, 3}, {2, 0}, {2, 1}, {2, 2}, {2, 3}});
    t.pinned = Mat::Zero(3, 9);
    t.pinned.row(0).head(3) << -2.0, -1.0, -1.0;
    t.member = [m = t.free](const Mat& W) {
      Mask keep = m;
      keep.row(0).head(3).setConstant(true);
      if (!zero_outside(W, keep)) return false;
      if (!near(W(0, 0), -2.0) || !near(W(0, 1), -1.0) || !near(W(0, 2), -1.0)) return false;
      for (int r = 1; r < 3; ++r)
        if (!near(W(r, 1), W(r, 0) / 2) || !near(W(r, 2), W(r, 0) / 2)) return false;
      return true;
    };
    out.push_back(t);
  }
  {
    BranchTemplate t;
    t.name = "W_7rest";
    t.free = mask({{1, 0}, {1, 1}, {1, 4}, {2, 0}, {2, 1}, {2, 4}});
    t.pinned = Mat::Zero(3, 9);
    t.pinned(0, 0) = 1.0;
    t.pinned(0, 1) = -1.0;
    t.member = [m = t.free](const Mat& W) {
      Mask keep = m;
      keep(0, 0) = keep(0, 1) = true;
      if (!zero_outside(W, keep)) return false;
      if (!near(W(0, 0), 1.0) || !near(W(0, 1), -1.0)) return false;
      return near(W(1, 1), -W(1, 0)) && near(W(2, 1), -W(2, 0));
    };
    out.push_back(t);
  }
  {
    BranchTemplate t;
    t.name = "W_1rest";
    t.free = mask({{1, 0}, {1, 1}, {1, 2}, {2, 0}, {2, 1}, {2, 2}});
    t.pinned = Mat::Zero(3, 9);
    t.member = [m = t.free](const Mat& W) { return zero_outside(W, m) && !W.isZero(kShapeTol); };
    out.push_back(t);
  }
  {
    BranchTemplate t;
    t.name = "W_2rest";
    t.free = mask({{0, 0}, {0, 1}, {0, 2}, {1, 0}, {1, 1}, {1, 2}, {2, 0}, {2, 1}, {2, 2}});
    t.pinned = Mat::Zero(3, 9);
    t.member = [m = t.free](const Mat& W) {
      if (!zero_outside(W, m) || std::abs(W(0, 0)) <= kShapeTol) return false;
      // Rows two and three are multiples of the first one.
      for (int r = 1; r < 3; ++r)
        for (int c = 1; c < 3; ++c)
          if (!near(W(r, c) * W(0, 0), W(0, c) * W(r, 0))) return false;
      return true;
    };
    out.push_back(t);
  }
  return out;
}

struct Run {
  Mat W;
  double residual;
};

std::optional<Run> levenberg_marquardt(const ConstraintSystem& c, Mat W, const Mask& free, int max_iterations,
                                       double tolerance) {
  const int d2 = c.rows();
  std::vector<int> vars;
  for (int j = 0; j < W.cols(); ++j)
    for (int i = 0; i < W.rows(); ++i)
      if (free(i, j)) vars.push_back(i + j * d2);
  const int nv = static_cast<int>(vars.size());

  Vec r = c.evaluate(W);
  double cost = r.squaredNorm();
  if (nv == 0) {
    if (std::sqrt(cost) <= tolerance) return Run{W, std::sqrt(cost)};
    return std::nullopt;
  }
  double lambda = 1e-3;
  for (int it = 0; it < max_iterations && std::sqrt(cost) > 1e-15; ++it) {
    Mat full = c.jacobian(W);
    Mat J(full.rows(), nv);
    for (int v = 0; v < nv; ++v) J.col(v) = full.col(vars[v]);
    Mat A = J.transpose() * J;
    Vec g = J.transpose() * r;
    bool improved = false;
    for (int tries = 0; tries < 30; ++tries) {
      Mat damped = A;
      damped.diagonal().array() += lambda * (1.0 + A.diagonal().array());
      Vec step = damped.ldlt().solve(-g);
      Mat trial = W;
      for (int v = 0; v < nv; ++v) trial(vars[v] % d2, vars[v] / d2) += step(v);
      Vec rt = c.evaluate(trial);
      double ct = rt.squaredNorm();
      if (std::isfinite(ct) && ct < cost) {
        W = trial;
        r = rt;
        cost = ct;
        lambda = std::max(lambda / 5.0, 1e-15);
        improved = true;
        break;
      }
      lambda *= 4.0;
    }
    if (!improved) break;
    if (W.cwiseAbs().maxCoeff() > 1e3) return std::nullopt;
  }
  // Flush round-off entries so zero patterns read cleanly.
  for (int j = 0; j < W.cols(); ++j)
    for (int i = 0; i < W.rows(); ++i)
      if (std::abs(W(i, j)) < 1e-12) W(i, j) = 0.0;
  double res = c.evaluate(W).norm();
  if (res <= tolerance) return Run{W, res};
  return std::nullopt;
}

bool lex_less(const Mat& a, const Mat& b) {
  for (int k = 0; k < a.size(); ++k) {
    double x = a.reshaped()(k), y = b.reshaped()(k);
    if (x < y) return true;
    if (x > y) return false;
  }
  return false;
}

}  // namespace

std::vector<BranchTemplate> branch_templates(const SpaceId& source, const SpaceId& target) {
  if (source == appendix::h3() && target == appendix::sl4()) return injection_templates();
  if (source == appendix::sl4() && target == appendix::h3()) return restriction_templates();
  return {};
}

std::string tag_branch(const Mat& W, const std::vector<BranchTemplate>& templates) {
  if (W.isZero(kShapeTol)) return "zero";
  Mat id = Mat::Identity(W.rows(), W.cols());
  if ((W - id).cwiseAbs().maxCoeff() <= kShapeTol) return "identity-extension";
  for (const auto& t : templates)
    if (t.member && t.member(W)) return t.name;
  Eigen::FullPivLU<Mat> lu(W);
  lu.setThreshold(kShapeTol);
  if (lu.rank() < std::min(W.rows(), W.cols())) return "rank-deficient";
  return "unclassified";
}

std::vector<Solution> solve_numeric(const ConstraintSystem& c, int seeds, const SolveOptions& options) {
  if (seeds < 1) fail(ErrorKind::invalid_argument, "solve_numeric needs at least one seed");
  const int d2 = c.rows(), d1 = c.cols();
  std::vector<Solution> found;
  auto attempt = [&](const Mat& start, const Mask& free, const std::string& family) {
    auto run = levenberg_marquardt(c, start, free, options.max_iterations, options.tolerance);
    if (!run) return;
    found.push_back({run->W, run->residual, tag_branch(run->W, options.templates), options.seed, family});
  };

  const Mask all = Mask::Constant(d2, d1, true);
  attempt(Mat::Identity(d2, d1), all, "identity");

  std::uint64_t stream = 0;
  for (int s = 0; s < seeds; ++s) {
    auto rng = seeded(options.seed, stream++);
    attempt(uniform_mat(rng, d2, d1, -1.0, 1.0), all, "dense");
  }
  for (const auto& t : options.templates) {
    if (t.free.rows() != d2 || t.free.cols() != d1)
      fail(ErrorKind::mismatch, "branch template " + t.name + " has the wrong shape");
    for (int s = 0; s < seeds; ++s) {
      auto rng = seeded(options.seed, stream++);
      Mat start = t.pinned;
      for (int j = 0; j < d1; ++j)
        for (int i = 0; i < d2; ++i)
          if (t.free(i, j)) start(i, j) = uniform(rng, -1.0, 1.0);
      attempt(start, t.free, t.name);
    }
  }

  std::sort(found.begin(), found.end(), [](const Solution& a, const Solution& b) { return lex_less(a.W, b.W); });
  std::vector<Solution> unique;
  for (auto& s : found) {
    bool dup = false;
    for (const auto& u : unique)
      if ((u.W - s.W).norm() <= 1e-6) {
        dup = true;
        break;
      }
    if (!dup) unique.push_back(std::move(s));
  }
  return unique;
}

}  // namespace cartan
