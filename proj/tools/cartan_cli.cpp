#include "cartan/errors.hpp"
#include "cartan/io.hpp"
#include "cartan/net.hpp"
#include "cartan/solver.hpp"
#include "cartan/train.hpp"
#include "cartan/verify.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

using nlohmann::ordered_json;

namespace {

constexpr int kOk = 0;
constexpr int kCheckFailed = 1;
constexpr int kUsage = 2;

struct Usage : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string scope;
};

ordered_json load_config(const Common& c) {
  if (c.config.empty()) return ordered_json::object();
  ordered_json j;
  try {
    j = ordered_json::parse(cartan::read_text(c.config));
  } catch (const nlohmann::json::exception& e) {
    throw Usage("config " + c.config + ": " + e.what());
  }
  if (!j.is_object()) throw Usage("config must be a JSON object");
  return j;
}

// Rejects unknown keys so typos surface instead of silently using defaults.
void allow_keys(const ordered_json& j, std::initializer_list<const char*> keys, const std::string& where) {
  for (const auto& [k, v] : j.items()) {
    bool known = false;
    for (const char* a : keys) known = known || k == a;
    if (!known) throw Usage("unknown key '" + k + "' in " + where);
  }
}

template <class T>
T get_or(const ordered_json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Usage(std::string("config key '") + key + "' has the wrong type");
  }
}

std::uint64_t seed_of(const Common& c, const ordered_json& cfg) {
  return c.seed ? *c.seed : get_or<std::uint64_t>(cfg, "seed", 0);
}

void emit(const Common& c, const std::string& text) {
  if (c.out.empty()) {
    std::cout << text;
    std::cout.flush();
  } else {
    cartan::write_text(c.out, text);
  }
}

std::string require_out(const Common& c, const char* what) {
  if (c.out.empty()) throw Usage(std::string(what) + " needs --out");
  return c.out;
}

int cmd_verify(const Common& c) {
  ordered_json cfg = load_config(c);
  allow_keys(cfg, {"seed", "samples", "fault", "scope"}, "verify config");
  cartan::VerifyOptions o;
  o.seed = seed_of(c, cfg);
  o.samples = get_or<int>(cfg, "samples", 200);
  o.fault = get_or<std::string>(cfg, "fault", "");
  if (o.samples < 1) throw Usage("samples must be >= 1");
  const std::string scope = c.scope.empty() ? get_or<std::string>(cfg, "scope", "all") : c.scope;
  if (scope != "core" && scope != "isometry" && scope != "appendix" && scope != "all")
    throw Usage("scope must be core, isometry, appendix or all");
  cartan::Report r = cartan::run_verify(scope, o);
  emit(c, cartan::report_json(r));
  for (const auto& ch : r.checks)
    if (!ch.pass) std::cerr << "FAIL " << ch.name << " residual " << ch.residual << " > " << ch.tolerance << "\n";
  return r.pass ? kOk : kCheckFailed;
}

int cmd_solve_homo(const Common& c, const std::string& source_flag, const std::string& target_flag, int seeds_flag) {
  ordered_json cfg = load_config(c);
  allow_keys(cfg, {"seed", "source", "target", "seeds", "max_iterations"}, "solve-homo config");
  const std::string src = !source_flag.empty() ? source_flag : get_or<std::string>(cfg, "source", "");
  const std::string tgt = !target_flag.empty() ? target_flag : get_or<std::string>(cfg, "target", "");
  if (src.empty() || tgt.empty()) throw Usage("solve-homo needs a source and a target algebra");
  const int seeds = seeds_flag > 0 ? seeds_flag : get_or<int>(cfg, "seeds", 8);
  if (seeds < 0) throw Usage("seeds must be >= 0");
  cartan::SpaceId s, t;
  try {
    s = cartan::parse_space(src);
    t = cartan::parse_space(tgt);
  } catch (const cartan::Error& e) {
    throw Usage(e.what());
  }
  cartan::SolveOptions o;
  o.seed = seed_of(c, cfg);
  o.max_iterations = get_or<int>(cfg, "max_iterations", o.max_iterations);
  o.templates = cartan::branch_templates(s, t);
  cartan::ConstraintSystem sys = cartan::build_constraints(cartan::mc_for_space(s), cartan::mc_for_space(t));
  auto sols = cartan::solve_numeric(sys, seeds, o);
  emit(c, cartan::solutions_json(s, t, sols));
  return sols.empty() ? kCheckFailed : kOk;
}

int cmd_gen_data(const Common& c) {
  ordered_json cfg = load_config(c);
  allow_keys(cfg, {"seed", "kind", "n", "dim", "classes"}, "gen-data config");
  const auto kind = cartan::parse_synthetic_kind(get_or<std::string>(cfg, "kind", "blobs"));
  const int n = get_or<int>(cfg, "n", 400), dim = get_or<int>(cfg, "dim", 4), k = get_or<int>(cfg, "classes", 2);
  auto d = cartan::gen_synthetic(kind, n, dim, seed_of(c, cfg), k);
  emit(c, cartan::dataset_csv(d));
  return kOk;
}

cartan::TrainConfig train_config(const ordered_json& j, std::uint64_t seed) {
  allow_keys(j, {"learning_rate", "epochs", "batch_size", "gradient_mode", "fd_step"}, "train section");
  cartan::TrainConfig t;
  t.learning_rate = get_or<double>(j, "learning_rate", t.learning_rate);
  t.epochs = get_or<int>(j, "epochs", t.epochs);
  t.batch_size = get_or<int>(j, "batch_size", t.batch_size);
  t.fd_step = get_or<double>(j, "fd_step", t.fd_step);
  const std::string mode = get_or<std::string>(j, "gradient_mode", "analytic");
  if (mode == "analytic") t.gradient_mode = cartan::GradientMode::analytic;
  else if (mode == "finite-difference") t.gradient_mode = cartan::GradientMode::finite_difference;
  else throw Usage("gradient_mode must be analytic or finite-difference");
  t.seed = seed;
  return t;
}

std::string metrics_path(const std::string& model_path) {
  const std::string ext = ".json";
  if (model_path.size() > ext.size() && model_path.compare(model_path.size() - ext.size(), ext.size(), ext) == 0)
    return model_path.substr(0, model_path.size() - ext.size()) + ".metrics.jsonl";
  return model_path + ".metrics.jsonl";
}

int cmd_train(const Common& c) {
  ordered_json cfg = load_config(c);
  allow_keys(cfg, {"seed", "data", "network", "train", "test_fraction", "metrics"}, "train config");
  const std::string data = get_or<std::string>(cfg, "data", "");
  if (data.empty()) throw Usage("train config needs 'data'");
  if (!cfg.contains("network")) throw Usage("train config needs 'network'");
  const std::string model_out = require_out(c, "train");
  const std::uint64_t seed = seed_of(c, cfg);

  cartan::NetworkConfig net = cartan::parse_network_config(cfg["network"].dump());
  cartan::TrainConfig tc = train_config(cfg.value("train", ordered_json::object()), seed);
  auto [tr, te] = cartan::split_dataset(cartan::read_csv(data), get_or<double>(cfg, "test_fraction", 0.2));
  auto res = cartan::train_loop(tc, net, tr, te);

  cartan::write_text(model_out, cartan::model_json(net, res.params));
  cartan::write_text(get_or<std::string>(cfg, "metrics", metrics_path(model_out)), cartan::metrics_jsonl(res.history));
  if (res.diverged) {
    std::cerr << "training stopped: " << res.message << "\n";
    return kCheckFailed;
  }
  return kOk;
}

int cmd_eval(const Common& c, const std::string& model_flag, const std::string& data_flag) {
  ordered_json cfg = load_config(c);
  allow_keys(cfg, {"seed", "data", "model", "split", "test_fraction", "network", "train", "metrics"}, "eval config");
  const std::string data = !data_flag.empty() ? data_flag : get_or<std::string>(cfg, "data", "");
  const std::string model = !model_flag.empty() ? model_flag : get_or<std::string>(cfg, "model", "");
  if (data.empty() || model.empty()) throw Usage("eval needs a model and a dataset");
  const std::string split = get_or<std::string>(cfg, "split", "test");
  if (split != "train" && split != "test" && split != "all") throw Usage("split must be train, test or all");

  cartan::NetworkConfig net;
  cartan::ParamSet p;
  cartan::parse_model(cartan::read_text(model), &net, &p);
  cartan::Dataset all = cartan::read_csv(data);
  auto [tr, te] = cartan::split_dataset(all, get_or<double>(cfg, "test_fraction", 0.2));
  const cartan::Dataset& d = split == "train" ? tr : split == "test" ? te : all;
  cartan::Metrics m = cartan::evaluate(net, p, d);

  ordered_json j;
  j["format_version"] = cartan::kFormatVersion;
  j["split"] = split;
  j["n"] = d.size();
  j[net.task == cartan::Task::regression ? "mse" : "nll"] = std::isfinite(m.loss) ? ordered_json(m.loss) : ordered_json(nullptr);
  j["accuracy"] = std::isfinite(m.accuracy) ? ordered_json(m.accuracy) : ordered_json(nullptr);
  emit(c, j.dump(2) + "\n");
  return kOk;
}

void add_common(CLI::App* sub, Common& c, bool scope) {
  sub->add_option("--config", c.config, "JSON parameter document");
  sub->add_option("--seed", c.seed, "seed (overrides the config)");
  sub->add_option("--out", c.out, "output path (stdout when omitted)");
  if (scope) sub->add_option("--scope", c.scope, "core, isometry, appendix or all");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cartan network toolkit"};
  app.require_subcommand(1);
  Common c;
  std::string source, target, model, data;
  int seeds = 0;

  auto* verify = app.add_subcommand("verify", "run property and fixture suites");
  add_common(verify, c, true);
  auto* solve = app.add_subcommand("solve-homo", "solve the homomorphism constraints numerically");
  add_common(solve, c, false);
  solve->add_option("--source", source, "source algebra, e.g. solv_so(1,3)");
  solve->add_option("--target", target, "target algebra, e.g. borel_sl(4)");
  solve->add_option("--seeds", seeds, "random starts per family");
  auto* gen = app.add_subcommand("gen-data", "write a synthetic CSV dataset");
  add_common(gen, c, false);
  auto* train = app.add_subcommand("train", "train a network; writes model JSON and metrics JSONL");
  add_common(train, c, false);
  auto* eval = app.add_subcommand("eval", "evaluate a saved model");
  add_common(eval, c, false);
  eval->add_option("--model", model, "model JSON");
  eval->add_option("--data", data, "dataset CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*verify) return cmd_verify(c);
    if (*solve) return cmd_solve_homo(c, source, target, seeds);
    if (*gen) return cmd_gen_data(c);
    if (*train) return cmd_train(c);
    if (*eval) return cmd_eval(c, model, data);
  } catch (const Usage& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const cartan::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.kind() == cartan::ErrorKind::invalid_argument ? kUsage : kCheckFailed;
  }
  return kUsage;
}
