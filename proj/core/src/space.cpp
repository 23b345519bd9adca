#include "cartan/space.hpp"

#include "cartan/errors.hpp"

#include <cctype>
#include <regex>

namespace cartan {

SpaceId SpaceId::so(int r, int q) {
  SpaceId s;
  s.family = Family::so;
  s.r = r;
  s.q = q;
  s.n = 2 * r + q;
  validate(s);
  return s;
}

SpaceId SpaceId::sl(int n) {
  SpaceId s;
  s.family = Family::sl;
  s.r = n - 1;
  s.q = 0;
  s.n = n;
  validate(s);
  return s;
}

SpaceId SpaceId::hyperbolic(int k) {
  if (k < 2) fail(ErrorKind::invalid_argument, "hyperbolic space needs dimension >= 2");
  return so(1, k - 1);
}

SpaceId SpaceId::layer(int q) {
  if (q < 0) fail(ErrorKind::invalid_argument, "layer tag must be non-negative");
  return so(1, q + 1);
}

int SpaceId::matrix_size() const { return family == Family::so ? 2 * r + q : n; }

int SpaceId::dim() const {
  if (family == Family::so) return r * (r + q);
  return n * (n + 1) / 2 - 1;
}

std::string SpaceId::name() const {
  if (family == Family::sl) return "sl(" + std::to_string(n) + ")";
  if (r == 1) return "H" + std::to_string(q + 1);
  return "so(" + std::to_string(r) + "," + std::to_string(r + q) + ")";
}

void validate(const SpaceId& s) {
  if (s.family == Family::so) {
    if (s.r < 1) fail(ErrorKind::invalid_argument, "so family needs r >= 1");
    if (s.q < 0) fail(ErrorKind::invalid_argument, "so family needs q >= 0");
    if (s.r == 1 && s.q < 1) fail(ErrorKind::invalid_argument, "so(1,1) has no curved coset");
  } else {
    if (s.n < 2) fail(ErrorKind::invalid_argument, "sl family needs N >= 2");
  }
}

SpaceId parse_space(const std::string& text) {
  std::string t;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) t += static_cast<char>(std::tolower(c));

  std::smatch m;
  static const std::regex hyp(R"(h(\d+))");
  static const std::regex layer(R"(r1\((\d+)\))");
  static const std::regex so(R"((?:solv_)?so\((\d+),(\d+)\))");
  static const std::regex sl(R"((?:borel_)?sl\((\d+)\))");
  if (std::regex_match(t, m, hyp)) return SpaceId::hyperbolic(std::stoi(m[1]));
  if (std::regex_match(t, m, layer)) return SpaceId::layer(std::stoi(m[1]));
  if (std::regex_match(t, m, so)) {
    int a = std::stoi(m[1]);
    int b = std::stoi(m[2]);
    if (b < a) fail(ErrorKind::invalid_argument, "so(a,b) needs a <= b: " + text);
    return SpaceId::so(a, b - a);
  }
  if (std::regex_match(t, m, sl)) return SpaceId::sl(std::stoi(m[1]));
  fail(ErrorKind::invalid_argument, "unsupported algebra name: " + text);
}

}  // namespace cartan
