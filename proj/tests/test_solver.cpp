#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cartan/errors.hpp"
#include "cartan/fixtures.hpp"
#include "cartan/solver.hpp"

#include <algorithm>
#include <set>

using namespace cartan;
namespace ap = cartan::appendix;

namespace {

std::vector<Solution> solve(const SpaceId& s, const SpaceId& t, int seeds, std::uint64_t seed = 0) {
  SolveOptions o;
  o.seed = seed;
  o.templates = branch_templates(s, t);
  return solve_numeric(build_constraints(mc_for_space(s), mc_for_space(t)), seeds, o);
}

std::set<std::string> tags(const std::vector<Solution>& sols) {
  std::set<std::string> out;
  for (const auto& s : sols) out.insert(s.branch_tag);
  return out;
}

}  // namespace

TEST_CASE("injection H3 -> sl(4) finds both reference branches") {
  auto sols = solve(ap::h3(), ap::sl4(), 16);
  auto t = tags(sols);
  CHECK(t.count("W_12"));
  CHECK(t.count("W_11"));
  for (const auto& s : sols) {
    CHECK(s.residual <= 1e-10);
    if (s.branch_tag == "W_12") CHECK(s.W(2, 0) == doctest::Approx(-1.0).epsilon(1e-8));
    if (s.branch_tag == "W_12") CHECK(std::abs(s.W(0, 0)) + std::abs(s.W(1, 0)) <= 1e-8);
  }
}

TEST_CASE("restriction sl(4) -> H3 finds a W_10 pattern") {
  auto sols = solve(ap::sl4(), ap::h3(), 4);
  CHECK(tags(sols).count("W_10rest"));
  CHECK(tags(sols).count("W_3rest"));
}

TEST_CASE("identity extension between layers") {
  auto sols = solve(SpaceId::layer(2), SpaceId::layer(4), 2);
  CHECK(tags(sols).count("identity-extension"));
}

TEST_CASE("solutions are sorted, distinct and reproducible") {
  auto a = solve(ap::h3(), ap::sl4(), 6, 3), b = solve(ap::h3(), ap::sl4(), 6, 3);
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].W == b[i].W);
    CHECK(a[i].branch_tag == b[i].branch_tag);
  }
  for (size_t i = 0; i + 1 < a.size(); ++i) {
    CHECK((a[i].W - a[i + 1].W).norm() > 1e-6);
    const auto x = a[i].W.reshaped(), y = a[i + 1].W.reshaped();
    CHECK(std::lexicographical_compare(x.begin(), x.end(), y.begin(), y.end()));
  }
}

TEST_CASE("branch tags") {
  auto tpl = branch_templates(ap::h3(), ap::sl4());
  CHECK(tag_branch(ap::w_can(), tpl) == "W_12");
  Vec d = Vec::LinSpaced(11, 0.3, 0.9);
  CHECK(tag_branch(ap::w11(d), tpl) == "W_11");
  CHECK(tag_branch(Mat::Zero(9, 3), tpl) == "zero");
  auto rtpl = branch_templates(ap::sl4(), ap::h3());
  for (int id : ap::kRestrictionIds) {
    Vec a = Vec::LinSpaced(ap::restriction_params(id), 0.4, 0.8);
    CHECK(tag_branch(ap::restriction(id, a), rtpl) == "W_" + std::to_string(id) + "rest");
  }
  CHECK(branch_templates(SpaceId::layer(1), SpaceId::layer(2)).empty());
  CHECK_THROWS_AS(solve(ap::h3(), ap::sl4(), 0), Error);
}
