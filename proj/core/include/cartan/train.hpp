#pragma once

#include "cartan/net.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace cartan {

enum class Split { train, test };

struct Dataset {
  std::vector<Vec> features;
  // Class index 0..K-1 for classification, target value for regression.
  std::vector<double> labels;
  Split split = Split::train;

  int size() const { return static_cast<int>(features.size()); }
  int dim() const { return features.empty() ? 0 : static_cast<int>(features[0].size()); }
};

void validate(const Dataset& d);
// Leading rows train, trailing test_fraction rows test.
std::pair<Dataset, Dataset> split_dataset(const Dataset& all, double test_fraction = 0.2);

enum class GradientMode { analytic, finite_difference };

struct TrainConfig {
  double learning_rate = 0.1;
  int epochs = 30;
  int batch_size = 16;
  std::uint64_t seed = 0;
  GradientMode gradient_mode = GradientMode::analytic;
  double fd_step = 1e-5;
};

void validate(const TrainConfig& t, int dataset_size);

// Batch-summed NLL for classification, mean squared error for regression.
double loss(const NetworkConfig& c, const ParamSet& p, const Dataset& batch);
Vec gradient(const NetworkConfig& c, const ParamSet& p, const Dataset& batch,
             GradientMode mode = GradientMode::analytic, double fd_step = 1e-5);
Vec sgd_step(const Vec& params, const Vec& grad, double eta);

// SGD pushes separators toward |w|^2 = 4 alpha beta, where the distance blows up. After each step
// alpha and beta are shrunk until 4 alpha beta <= (1 - kAdmissibleMargin) |w|^2.
inline constexpr double kAdmissibleMargin = 0.5;
void project_admissible(ParamSet& p);

int predict_class(const NetworkConfig& c, const ParamSet& p, const Vec& x);
double predict_value(const NetworkConfig& c, const ParamSet& p, const Vec& x);

struct Metrics {
  double loss = 0.0;       // per-sample mean
  double accuracy = 0.0;   // NaN for regression
};
Metrics evaluate(const NetworkConfig& c, const ParamSet& p, const Dataset& d);

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double test_loss = 0.0;
  double accuracy = 0.0;
};

struct TrainResult {
  ParamSet params;
  std::vector<EpochRecord> history;
  bool diverged = false;
  std::string message;
};

TrainResult train_loop(const TrainConfig& t, const NetworkConfig& c, const Dataset& train, const Dataset& test);
TrainResult train_loop(const TrainConfig& t, const NetworkConfig& c, const Dataset& train, const Dataset& test,
                       const ParamSet& init);

enum class SyntheticKind { blobs, arcs };
SyntheticKind parse_synthetic_kind(const std::string& s);

// Rows are shuffled; classes balanced within one.
Dataset gen_synthetic(SyntheticKind kind, int n, int dim, std::uint64_t seed, int classes = 2);

}  // namespace cartan
