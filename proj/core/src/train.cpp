#include "cartan/train.hpp"

#include "cartan/errors.hpp"
#include "cartan/homo.hpp"
#include "cartan/isometry.hpp"
#include "cartan/random.hpp"
#include "cartan/symspace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace cartan {

void validate(const Dataset& d) {
  if (d.features.size() != d.labels.size()) fail(ErrorKind::mismatch, "features and labels differ in length");
  for (size_t i = 0; i < d.features.size(); ++i) {
    if (d.features[i].size() != d.features[0].size()) fail(ErrorKind::mismatch, "ragged feature rows");
    if (!d.features[i].allFinite() || !std::isfinite(d.labels[i])) fail(ErrorKind::domain, "non-finite dataset entry");
  }
}

std::pair<Dataset, Dataset> split_dataset(const Dataset& all, double test_fraction) {
  if (!(test_fraction >= 0.0 && test_fraction < 1.0)) fail(ErrorKind::invalid_argument, "test fraction must be in [0, 1)");
  const int n = all.size();
  const int n_test = static_cast<int>(std::lround(test_fraction * n));
  Dataset tr, te;
  tr.split = Split::train;
  te.split = Split::test;
  for (int i = 0; i < n; ++i) {
    Dataset& dst = i < n - n_test ? tr : te;
    dst.features.push_back(all.features[i]);
    dst.labels.push_back(all.labels[i]);
  }
  return {tr, te};
}

void validate(const TrainConfig& t, int dataset_size) {
  if (!(t.learning_rate > 0.0)) fail(ErrorKind::invalid_argument, "learning rate must be positive");
  if (t.epochs < 0) fail(ErrorKind::invalid_argument, "epochs must be >= 0");
  if (t.batch_size < 1 || t.batch_size > dataset_size) fail(ErrorKind::invalid_argument, "batch size must be in 1..dataset size");
  if (!(t.fd_step > 0.0)) fail(ErrorKind::invalid_argument, "fd_step must be positive");
}

namespace {

int class_label(const NetworkConfig& c, double label) {
  const int y = static_cast<int>(label);
  if (y != label) fail(ErrorKind::invalid_argument, "classification labels must be integers");
  const int K = c.task == Task::binary ? 2 : c.K;
  if (y < 0 || y >= K) fail(ErrorKind::invalid_argument, "label outside 0..K-1");
  return y;
}

double readout(const ParamSet& p, const SolvCoords& y) { return p.readout.dot(y.values) + p.readout_bias; }

struct Offsets {
  int Q, lambda, alpha, beta, w, readout, readout_bias;
  std::vector<int> W, b, psi;
};

Offsets offsets(const NetworkConfig& c) {
  Offsets o{};
  for (const auto& blk : param_layout(c)) {
    const auto& n = blk.name;
    if (n == "Q") o.Q = blk.offset;
    else if (n == "Lambda") o.lambda = blk.offset;
    else if (n == "alpha") o.alpha = blk.offset;
    else if (n == "beta") o.beta = blk.offset;
    else if (n == "w") o.w = blk.offset;
    else if (n == "readout") o.readout = blk.offset;
    else if (n == "readout_bias") o.readout_bias = blk.offset;
    else if (n[0] == 'W') o.W.push_back(blk.offset);
    else if (n[0] == 'b') o.b.push_back(blk.offset);
    else if (n[0] == 'P') o.psi.push_back(blk.offset);
  }
  return o;
}

struct RotationTape {
  std::vector<ActionJet> jets;
};

// Applies the fiber rotations of one layer, keeping the stage Jacobians. Zero angles leave the point
// untouched so the value matches forward() exactly.
Vec rotate_taped(const SpaceId& space, const Vec& angles, Vec y, RotationTape& tape) {
  auto gens = build_fiber_generators(space);
  for (size_t j = 0; j < gens.size(); ++j) {
    const double a = angles(static_cast<int>(j));
    ActionJet jet = r1_rotation_jet(gens[j].matrix, a, y);
    if (a != 0.0) y = jet.value;
    tape.jets.push_back(std::move(jet));
  }
  return y;
}

// Back through the rotations; writes angle gradients and returns the gradient at the stage input.
Vec rotate_back(const RotationTape& tape, Vec g, Vec& g_angles, int offset) {
  for (int j = static_cast<int>(tape.jets.size()) - 1; j >= 0; --j) {
    const auto& jet = tape.jets[j];
    g_angles(offset + j) += jet.d_angle.dot(g);
    g = jet.d_coords.transpose() * g;
  }
  return g;
}

void check_stage(const Vec& v, const char* stage) {
  if (!v.allFinite()) fail(ErrorKind::numeric, std::string("non-finite values in stage ") + stage);
  if (std::abs(v(0)) > kCartanBound) fail(ErrorKind::range, std::string("Cartan bound exceeded in stage ") + stage);
}

// Gradient of one sample's loss contribution, scaled by `scale`, accumulated into g.
void accumulate_sample(const NetworkConfig& c, const ParamSet& p, const Offsets& o, const Vec& x, double label,
                       double scale, Vec& g) {
  const int L = static_cast<int>(c.layers.size());
  std::vector<RotationTape> tapes(L);
  std::vector<Vec> hom_in(L);  // input to transition i-1 lives at index i

  Vec y = p.Q * x;
  check_stage(y, "inject");
  y = rotate_taped(c.layers[0].space(), p.lambda, y, tapes[0]);
  check_stage(y, "inject rotation");
  for (int i = 1; i < L; ++i) {
    const auto& t = p.transitions[i - 1];
    hom_in[i] = y;
    Vec z(t.W.rows() + 1);
    z(0) = y(0);
    z.tail(t.W.rows()) = t.W * y.tail(y.size() - 1) + (-std::expm1(-y(0))) * t.b;
    check_stage(z, "homomorphism");
    y = rotate_taped(c.layers[i].space(), t.psi, z, tapes[i]);
    check_stage(y, "fiber rotation");
  }

  const SolvCoords out{c.layers.back().space(), y};
  Vec gy = Vec::Zero(y.size());
  if (c.task == Task::regression) {
    const double r = 2.0 * (readout(p, out) - label) * scale;
    for (int a = 0; a < y.size(); ++a) g(o.readout + a) += r * y(a);
    g(o.readout_bias) += r;
    gy = r * p.readout;
  } else {
    const int K = c.separator_count();
    const int n = static_cast<int>(y.size()) - 1;
    const int label_k = class_label(c, label);
    Vec delta(K);
    for (int k = 0; k < K; ++k) delta(k) = signed_distance(p.separators[k], out);
    Vec dl(K);
    if (c.task == Task::binary) {
      const double pr = sigmoid(delta(0));
      const bool clamped = pr < kProbClamp || pr > 1.0 - kProbClamp;
      dl(0) = clamped ? 0.0 : pr - label_k;
    } else {
      Vec pr = softmax(delta);
      if (pr(label_k) < kProbClamp) {
        dl.setZero();
      } else {
        dl = pr;
        dl(label_k) -= 1.0;
      }
    }
    const double y1 = y(0);
    const Vec y2 = y.tail(n);
    const double em = std::exp(-y1), ep = std::exp(y1);
    const double quad = 1.0 + 0.25 * y2.squaredNorm();
    for (int k = 0; k < K; ++k) {
      if (dl(k) == 0.0) continue;
      const auto& s = p.separators[k];
      const double h = h_value(s, out);
      const double nn = separator_norm(s);
      const double root = std::sqrt(nn * nn + h * h);
      const double dh = dl(k) * scale / root;         // dl/dh
      const double dn = -dl(k) * scale * h / (nn * root);  // dl/dn
      g(o.alpha + k) += dh * em + dn * (-2.0 * s.beta / nn);
      g(o.beta + k) += dh * ep * quad + dn * (-2.0 * s.alpha / nn);
      for (int a = 0; a < n; ++a) g(o.w + k * n + a) += dh * 0.5 * y2(a) + dn * s.w(a) / nn;
      gy(0) += dh * (-s.alpha * em + s.beta * ep * quad);
      gy.tail(n) += dh * (0.5 * s.w + 0.5 * s.beta * ep * y2);
    }
  }

  for (int i = L - 1; i >= 1; --i) {
    const auto& t = p.transitions[i - 1];
    Vec gz = rotate_back(tapes[i], gy, g, o.psi[i - 1]);
    const Vec& yin = hom_in[i];
    const int p_out = static_cast<int>(t.W.rows()), p_in = static_cast<int>(t.W.cols());
    const Vec gz2 = gz.tail(p_out);
    const Vec y2 = yin.tail(p_in);
    for (int r = 0; r < p_out; ++r)
      for (int col = 0; col < p_in; ++col) g(o.W[i - 1] + r * p_in + col) += gz2(r) * y2(col);
    const double f = -std::expm1(-yin(0));
    for (int r = 0; r < p_out; ++r) g(o.b[i - 1] + r) += gz2(r) * f;
    Vec gin(yin.size());
    gin(0) = gz(0) + gz2.dot(t.b) * std::exp(-yin(0));
    gin.tail(p_in) = t.W.transpose() * gz2;
    gy = gin;
  }
  gy = rotate_back(tapes[0], gy, g, o.lambda);
  const int rows = static_cast<int>(p.Q.rows()), cols = static_cast<int>(p.Q.cols());
  for (int r = 0; r < rows; ++r)
    for (int col = 0; col < cols; ++col) g(o.Q + r * cols + col) += gy(r) * x(col);
}

}  // namespace

int predict_class(const NetworkConfig& c, const ParamSet& p, const Vec& x) {
  const SolvCoords y = forward(c, p, x);
  if (c.task == Task::binary) return binary_predict(p.separators[0], y) ? 1 : 0;
  if (c.task == Task::multiclass) {
    Vec pr = softmax_probs(p.separators, y);
    int k = 0;
    pr.maxCoeff(&k);
    return k;
  }
  fail(ErrorKind::invalid_argument, "predict_class needs a classification task");
}

double predict_value(const NetworkConfig& c, const ParamSet& p, const Vec& x) {
  if (c.task != Task::regression) fail(ErrorKind::invalid_argument, "predict_value needs a regression task");
  return readout(p, forward(c, p, x));
}

double loss(const NetworkConfig& c, const ParamSet& p, const Dataset& batch) {
  if (batch.size() == 0) fail(ErrorKind::invalid_argument, "loss needs a nonempty batch");
  if (c.task == Task::regression) {
    double s = 0.0;
    for (int i = 0; i < batch.size(); ++i) {
      const double r = predict_value(c, p, batch.features[i]) - batch.labels[i];
      s += r * r;
    }
    return s / batch.size();
  }
  std::vector<LabeledPoint> pts;
  pts.reserve(batch.size());
  for (int i = 0; i < batch.size(); ++i) {
    const int y = class_label(c, batch.labels[i]);
    pts.push_back({forward(c, p, batch.features[i]), c.task == Task::binary ? y : y + 1});
  }
  return c.task == Task::binary ? binary_nll(pts, p.separators[0]) : multiclass_nll(pts, p.separators);
}

Vec gradient(const NetworkConfig& c, const ParamSet& p, const Dataset& batch, GradientMode mode, double fd_step) {
  if (batch.size() == 0) fail(ErrorKind::invalid_argument, "gradient needs a nonempty batch");
  if (mode == GradientMode::finite_difference) {
    Vec theta = flatten(c, p).values;
    Vec g(theta.size());
    for (int i = 0; i < theta.size(); ++i) {
      const double h = fd_step * std::max(1.0, std::abs(theta(i)));
      Vec tp = theta, tm = theta;
      tp(i) += h;
      tm(i) -= h;
      g(i) = (loss(c, unflatten(c, tp), batch) - loss(c, unflatten(c, tm), batch)) / (2.0 * h);
    }
    return g;
  }
  const Offsets o = offsets(c);
  const double scale = c.task == Task::regression ? 1.0 / batch.size() : 1.0;
  Vec g = Vec::Zero(param_count(c));
  for (int i = 0; i < batch.size(); ++i) accumulate_sample(c, p, o, batch.features[i], batch.labels[i], scale, g);
  return g;
}

Vec sgd_step(const Vec& params, const Vec& grad, double eta) {
  if (params.size() != grad.size()) fail(ErrorKind::mismatch, "gradient and parameters differ in length");
  return params - eta * grad;
}

void project_admissible(ParamSet& p) {
  for (auto& s : p.separators) {
    const double ab = 4 * s.alpha * s.beta, cap = (1 - kAdmissibleMargin) * s.w.squaredNorm();
    if (ab <= cap) continue;
    const double f = std::sqrt(cap / ab);
    s.alpha *= f;
    s.beta *= f;
  }
}

Metrics evaluate(const NetworkConfig& c, const ParamSet& p, const Dataset& d) {
  Metrics m;
  if (d.size() == 0) {
    m.loss = m.accuracy = std::numeric_limits<double>::quiet_NaN();
    return m;
  }
  m.loss = loss(c, p, d);
  if (c.task == Task::regression) {
    m.accuracy = std::numeric_limits<double>::quiet_NaN();
    return m;
  }
  m.loss /= d.size();
  int hits = 0;
  for (int i = 0; i < d.size(); ++i) hits += predict_class(c, p, d.features[i]) == class_label(c, d.labels[i]);
  m.accuracy = static_cast<double>(hits) / d.size();
  return m;
}

TrainResult train_loop(const TrainConfig& t, const NetworkConfig& c, const Dataset& train, const Dataset& test) {
  return train_loop(t, c, train, test, init_params(c, t.seed));
}

TrainResult train_loop(const TrainConfig& t, const NetworkConfig& c, const Dataset& train, const Dataset& test,
                       const ParamSet& init) {
  validate(c);
  validate(train);
  validate(test);
  validate(t, train.size());
  if (train.dim() != c.input_dim) fail(ErrorKind::mismatch, "dataset dimension does not match input_dim");

  TrainResult res;
  res.params = init;
  Vec theta = flatten(c, init).values;
  auto rng = seeded(t.seed, 0x5eed);
  std::vector<int> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  const bool classify_task = c.task != Task::regression;

  for (int epoch = 1; epoch <= t.epochs; ++epoch) {
    // Fisher-Yates with the portable draw, so the order is the same on every platform.
    for (int i = train.size() - 1; i > 0; --i) {
      int j = static_cast<int>(uniform01(rng) * (i + 1));
      std::swap(order[i], order[std::min(j, i)]);
    }
    Vec next = theta;
    try {
      for (int start = 0; start < train.size(); start += t.batch_size) {
        const int end = std::min(train.size(), start + t.batch_size);
        std::vector<int> idx(order.begin() + start, order.begin() + end);
        std::sort(idx.begin(), idx.end());
        Dataset batch;
        for (int i : idx) {
          batch.features.push_back(train.features[i]);
          batch.labels.push_back(train.labels[i]);
        }
        Vec g = gradient(c, unflatten(c, next), batch, t.gradient_mode, t.fd_step);
        if (classify_task) g /= batch.size();
        next = sgd_step(next, g, t.learning_rate);
        if (!c.separator_count()) continue;
        ParamSet q = unflatten(c, next);
        project_admissible(q);
        next = flatten(c, q).values;
        if (!next.allFinite()) fail(ErrorKind::numeric, "parameters became non-finite");
      }
    } catch (const Error& e) {
      res.diverged = true;
      res.message = "epoch " + std::to_string(epoch) + ": " + e.what();
      break;
    }

    ParamSet cand = unflatten(c, next);
    Metrics tr, te;
    try {
      tr = evaluate(c, cand, train);
      te = test.size() ? evaluate(c, cand, test) : tr;
    } catch (const Error& e) {
      res.diverged = true;
      res.message = "epoch " + std::to_string(epoch) + ": " + e.what();
      break;
    }
    if (!std::isfinite(tr.loss) || tr.loss > 1e6) {
      res.diverged = true;
      res.message = "epoch " + std::to_string(epoch) + ": loss diverged";
      break;
    }
    theta = next;
    res.params = cand;
    res.history.push_back({epoch, tr.loss, te.loss, te.accuracy});
  }
  return res;
}

SyntheticKind parse_synthetic_kind(const std::string& s) {
  if (s == "blobs") return SyntheticKind::blobs;
  if (s == "arcs") return SyntheticKind::arcs;
  fail(ErrorKind::invalid_argument, "unknown dataset kind: " + s);
}

Dataset gen_synthetic(SyntheticKind kind, int n, int dim, std::uint64_t seed, int classes) {
  if (n < 2 || dim < 2) fail(ErrorKind::invalid_argument, "gen_synthetic needs n >= 2 and dim >= 2");
  if (classes < 2) fail(ErrorKind::invalid_argument, "gen_synthetic needs at least two classes");
  if (kind == SyntheticKind::arcs && classes != 2) fail(ErrorKind::invalid_argument, "arcs are two-class");
  auto rng = seeded(seed, 0xda7a);
  Dataset d;
  d.features.resize(n);
  d.labels.resize(n);

  if (kind == SyntheticKind::blobs) {
    constexpr double radius = 3.5;
    std::vector<Vec> means;
    Vec u(dim);
    for (int a = 0; a < dim; ++a) u(a) = normal(rng);
    if (classes == 2) {
      u.normalize();
      means = {radius * u, -radius * u};
    } else {
      // Orthogonal directions while they last, random ones afterwards.
      for (int k = 0; k < classes; ++k) {
        Vec m(dim);
        for (int a = 0; a < dim; ++a) m(a) = normal(rng);
        if (k < dim)
          for (const auto& prev : means) m -= m.dot(prev) / prev.squaredNorm() * prev;
        means.push_back(radius * m.normalized());
      }
    }
    for (int i = 0; i < n; ++i) {
      const int k = i % classes;
      Vec x(dim);
      for (int a = 0; a < dim; ++a) x(a) = means[k](a) + normal(rng);
      d.features[i] = x;
      d.labels[i] = k;
    }
  } else {
    constexpr double pi = 3.14159265358979323846;
    for (int i = 0; i < n; ++i) {
      const int k = i % 2;
      const double s = pi * uniform01(rng);
      Vec x(dim);
      for (int a = 0; a < dim; ++a) x(a) = 0.1 * normal(rng);
      if (k == 0) {
        x(0) += 2.0 * std::cos(s);
        x(1) += 2.0 * std::sin(s);
      } else {
        x(0) += 2.0 * (1.0 - std::cos(s));
        x(1) += 2.0 * (0.5 - std::sin(s));
      }
      d.features[i] = x;
      d.labels[i] = k;
    }
  }

  for (int i = n - 1; i > 0; --i) {
    int j = std::min(i, static_cast<int>(uniform01(rng) * (i + 1)));
    std::swap(d.features[i], d.features[j]);
    std::swap(d.labels[i], d.labels[j]);
  }
  return d;
}

}  // namespace cartan
