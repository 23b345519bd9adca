#include "cartan/net.hpp"

#include "cartan/errors.hpp"
#include "cartan/homo.hpp"
#include "cartan/isometry.hpp"
#include "cartan/random.hpp"

#include <cmath>

namespace cartan {

const char* to_string(Task t) {
  switch (t) {
    case Task::binary: return "binary";
    case Task::multiclass: return "multiclass";
    case Task::regression: return "regression";
  }
  return "binary";
}

Task parse_task(const std::string& s) {
  if (s == "binary") return Task::binary;
  if (s == "multiclass") return Task::multiclass;
  if (s == "regression") return Task::regression;
  fail(ErrorKind::invalid_argument, "unknown task: " + s);
}

void validate(const NetworkConfig& c) {
  if (c.input_dim < 1) fail(ErrorKind::invalid_argument, "input_dim must be >= 1");
  if (c.layers.empty()) fail(ErrorKind::invalid_argument, "network needs at least one layer");
  for (const auto& l : c.layers)
    if (l.q < 0) fail(ErrorKind::invalid_argument, "layer tag must be >= 0");
  if (c.task == Task::multiclass && c.K < 2) fail(ErrorKind::invalid_argument, "multiclass needs K >= 2");
}

std::vector<Block> param_layout(const NetworkConfig& c) {
  validate(c);
  std::vector<Block> out;
  int off = 0;
  auto add = [&](std::string name, int rows, int cols) {
    out.push_back({std::move(name), off, rows, cols});
    off += rows * cols;
  };
  add("Q", c.layers[0].dim(), c.input_dim);
  add("Lambda", c.layers[0].q, 1);
  for (size_t i = 0; i + 1 < c.layers.size(); ++i) {
    const int p_in = c.layers[i].q + 1, p_out = c.layers[i + 1].q + 1;
    add("W" + std::to_string(i), p_out, p_in);
    add("b" + std::to_string(i), p_out, 1);
    add("Psi" + std::to_string(i), c.layers[i + 1].q, 1);
  }
  const LayerSpec& last = c.layers.back();
  if (c.task == Task::regression) {
    add("readout", last.dim(), 1);
    add("readout_bias", 1, 1);
  } else {
    const int K = c.separator_count();
    add("alpha", K, 1);
    add("beta", K, 1);
    add("w", K, last.q + 1);
  }
  return out;
}

int param_count(const NetworkConfig& c) {
  auto l = param_layout(c);
  return l.back().offset + l.back().size();
}

namespace {

void put(Vec& v, const Block& b, const Mat& m) {
  if (m.rows() != b.rows || m.cols() != b.cols) fail(ErrorKind::mismatch, "parameter block " + b.name + " has the wrong shape");
  for (int i = 0; i < b.rows; ++i)
    for (int j = 0; j < b.cols; ++j) v(b.offset + i * b.cols + j) = m(i, j);
}

Mat get(const Vec& v, const Block& b) {
  Mat m(b.rows, b.cols);
  for (int i = 0; i < b.rows; ++i)
    for (int j = 0; j < b.cols; ++j) m(i, j) = v(b.offset + i * b.cols + j);
  return m;
}

const Block& find(const std::vector<Block>& layout, const std::string& name) {
  for (const auto& b : layout)
    if (b.name == name) return b;
  fail(ErrorKind::mismatch, "layout has no block " + name);
}

}  // namespace

FlatParams flatten(const NetworkConfig& c, const ParamSet& p) {
  FlatParams f;
  f.layout = param_layout(c);
  f.values = Vec::Zero(param_count(c));
  put(f.values, find(f.layout, "Q"), p.Q);
  put(f.values, find(f.layout, "Lambda"), p.lambda);
  if (p.transitions.size() + 1 != c.layers.size()) fail(ErrorKind::mismatch, "transition count does not match layers");
  for (size_t i = 0; i < p.transitions.size(); ++i) {
    const auto s = std::to_string(i);
    put(f.values, find(f.layout, "W" + s), p.transitions[i].W);
    put(f.values, find(f.layout, "b" + s), p.transitions[i].b);
    put(f.values, find(f.layout, "Psi" + s), p.transitions[i].psi);
  }
  if (c.task == Task::regression) {
    put(f.values, find(f.layout, "readout"), p.readout);
    put(f.values, find(f.layout, "readout_bias"), Mat::Constant(1, 1, p.readout_bias));
  } else {
    const int K = c.separator_count();
    if (static_cast<int>(p.separators.size()) != K) fail(ErrorKind::mismatch, "separator count does not match the task");
    const int n = c.layers.back().q + 1;
    Vec a(K), bb(K);
    Mat w(K, n);
    for (int k = 0; k < K; ++k) {
      a(k) = p.separators[k].alpha;
      bb(k) = p.separators[k].beta;
      if (p.separators[k].w.size() != n) fail(ErrorKind::mismatch, "separator normal has the wrong length");
      w.row(k) = p.separators[k].w.transpose();
    }
    put(f.values, find(f.layout, "alpha"), a);
    put(f.values, find(f.layout, "beta"), bb);
    put(f.values, find(f.layout, "w"), w);
  }
  return f;
}

ParamSet unflatten(const NetworkConfig& c, const Vec& values) {
  auto layout = param_layout(c);
  if (values.size() != param_count(c)) fail(ErrorKind::mismatch, "flat parameter vector has the wrong length");
  ParamSet p;
  p.Q = get(values, find(layout, "Q"));
  p.lambda = get(values, find(layout, "Lambda")).reshaped();
  for (size_t i = 0; i + 1 < c.layers.size(); ++i) {
    const auto s = std::to_string(i);
    Transition t;
    t.W = get(values, find(layout, "W" + s));
    t.b = get(values, find(layout, "b" + s)).reshaped();
    t.psi = get(values, find(layout, "Psi" + s)).reshaped();
    p.transitions.push_back(std::move(t));
  }
  if (c.task == Task::regression) {
    p.readout = get(values, find(layout, "readout")).reshaped();
    p.readout_bias = get(values, find(layout, "readout_bias"))(0, 0);
  } else {
    Mat a = get(values, find(layout, "alpha"));
    Mat b = get(values, find(layout, "beta"));
    Mat w = get(values, find(layout, "w"));
    for (int k = 0; k < c.separator_count(); ++k) p.separators.push_back({a(k, 0), b(k, 0), w.row(k).transpose()});
  }
  return p;
}

ParamSet unflatten(const NetworkConfig& c, const FlatParams& f) {
  auto expected = param_layout(c);
  if (f.layout.size() != expected.size()) fail(ErrorKind::mismatch, "layout does not match the network config");
  for (size_t i = 0; i < expected.size(); ++i) {
    const auto& a = f.layout[i];
    const auto& b = expected[i];
    if (a.name != b.name || a.offset != b.offset || a.rows != b.rows || a.cols != b.cols)
      fail(ErrorKind::mismatch, "layout does not match the network config at block " + b.name);
  }
  return unflatten(c, f.values);
}

ParamSet zero_params(const NetworkConfig& c) { return unflatten(c, Vec::Zero(param_count(c))); }

ParamSet init_params(const NetworkConfig& c, std::uint64_t seed) {
  ParamSet p = zero_params(c);
  auto rng = seeded(seed, 0x1417);
  const double sq = 1.0 / std::sqrt(static_cast<double>(c.input_dim));
  p.Q = uniform_mat(rng, static_cast<int>(p.Q.rows()), static_cast<int>(p.Q.cols()), -sq, sq);
  for (size_t i = 0; i < p.transitions.size(); ++i) {
    auto& t = p.transitions[i];
    const double s = 1.0 / std::sqrt(static_cast<double>(c.layers[i].q + 1));
    t.W = uniform_mat(rng, static_cast<int>(t.W.rows()), static_cast<int>(t.W.cols()), -s, s);
  }
  if (c.task == Task::regression) {
    const double s = 1.0 / std::sqrt(static_cast<double>(c.layers.back().dim()));
    p.readout = uniform_vec(rng, static_cast<int>(p.readout.size()), -s, s);
  } else {
    for (auto& sep : p.separators) {
      do {
        sep.w = uniform_vec(rng, static_cast<int>(sep.w.size()), -1.0, 1.0);
      } while (sep.w.norm() < 0.1);
    }
  }
  return p;
}

namespace {

SolvCoords apply_rotations(SolvCoords y, const Vec& angles) {
  auto gens = build_fiber_generators(y.space);
  if (angles.size() != static_cast<int>(gens.size())) fail(ErrorKind::mismatch, "fiber angle count does not match the layer");
  for (size_t j = 0; j < gens.size(); ++j) {
    if (angles(static_cast<int>(j)) == 0.0) continue;
    y.values = r1_rotate(gens[j].matrix, angles(static_cast<int>(j)), y.values);
  }
  return y;
}

}  // namespace

SolvCoords inject(const Mat& Q, const Vec& lambda, const Vec& x) {
  if (x.size() != Q.cols()) fail(ErrorKind::mismatch, "input length does not match Q");
  if (!x.allFinite()) fail(ErrorKind::domain, "non-finite input");
  if (Q.rows() < 2) fail(ErrorKind::mismatch, "Q needs at least two rows");
  SolvCoords y{SpaceId::so(1, static_cast<int>(Q.rows()) - 1), Q * x};
  return apply_rotations(y, lambda);
}

SolvCoords layer_forward(const Mat& W, const Vec& b, const Vec& psi, const SolvCoords& coords) {
  return apply_rotations(r1_homomorphism(W, b, coords), psi);
}

SolvCoords forward(const NetworkConfig& c, const ParamSet& p, const Vec& x) {
  SolvCoords y = inject(p.Q, p.lambda, x);
  for (const auto& t : p.transitions) y = layer_forward(t.W, t.b, t.psi, y);
  if (!y.values.allFinite()) fail(ErrorKind::numeric, "forward produced non-finite coordinates");
  (void)c;
  return y;
}

}  // namespace cartan
