#pragma once

#include "cartan/classify.hpp"
#include "cartan/space.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace cartan {

enum class Task { binary, multiclass, regression };
const char* to_string(Task t);
Task parse_task(const std::string& s);

// Layer tagged q is H^{q+2}: w1 plus q+1 subPaint coordinates, q fiber rotations.
struct LayerSpec {
  int q = 0;
  SpaceId space() const { return SpaceId::layer(q); }
  int dim() const { return q + 2; }
};

struct NetworkConfig {
  int input_dim = 1;
  std::vector<LayerSpec> layers;
  Task task = Task::binary;
  int K = 2;

  int separator_count() const { return task == Task::binary ? 1 : K; }
};

void validate(const NetworkConfig& c);

struct Transition {
  Mat W;
  Vec b;
  Vec psi;
};

struct ParamSet {
  Mat Q;
  Vec lambda;
  std::vector<Transition> transitions;
  SeparatorBank separators;
  Vec readout;
  double readout_bias = 0.0;
};

struct Block {
  std::string name;
  int offset = 0;
  int rows = 0;
  int cols = 0;
  int size() const { return rows * cols; }
};

struct FlatParams {
  Vec values;
  std::vector<Block> layout;
};

std::vector<Block> param_layout(const NetworkConfig& c);
int param_count(const NetworkConfig& c);
FlatParams flatten(const NetworkConfig& c, const ParamSet& p);
ParamSet unflatten(const NetworkConfig& c, const FlatParams& f);
ParamSet unflatten(const NetworkConfig& c, const Vec& values);

ParamSet zero_params(const NetworkConfig& c);
ParamSet init_params(const NetworkConfig& c, std::uint64_t seed);

SolvCoords inject(const Mat& Q, const Vec& lambda, const Vec& x);
SolvCoords layer_forward(const Mat& W, const Vec& b, const Vec& psi, const SolvCoords& coords);
SolvCoords forward(const NetworkConfig& c, const ParamSet& p, const Vec& x);

}  // namespace cartan
