#include "cartan/io.hpp"

#include "cartan/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace cartan {

using nlohmann::ordered_json;

namespace {

ordered_json number(double x) { return std::isfinite(x) ? ordered_json(x) : ordered_json(nullptr); }

ordered_json matrix_rows(const Mat& m) {
  ordered_json rows = ordered_json::array();
  for (int i = 0; i < m.rows(); ++i) {
    ordered_json r = ordered_json::array();
    for (int j = 0; j < m.cols(); ++j) r.push_back(number(m(i, j)));
    rows.push_back(r);
  }
  return rows;
}

ordered_json parse_json(const std::string& text) {
  try {
    return ordered_json::parse(text);
  } catch (const std::exception& e) {
    fail(ErrorKind::invalid_argument, std::string("malformed JSON: ") + e.what());
  }
}

void check_version(const ordered_json& j) {
  if (!j.contains("format_version") || j["format_version"] != kFormatVersion)
    fail(ErrorKind::invalid_argument, "unsupported or missing format_version");
}

ordered_json config_object(const NetworkConfig& c) {
  ordered_json layers = ordered_json::array();
  for (const auto& l : c.layers) layers.push_back(l.dim());
  ordered_json j;
  j["input_dim"] = c.input_dim;
  j["layers"] = layers;
  j["task"] = to_string(c.task);
  if (c.task == Task::multiclass) j["K"] = c.K;
  return j;
}

NetworkConfig config_from(const ordered_json& j) {
  try {
    NetworkConfig c;
    c.input_dim = j.at("input_dim").get<int>();
    for (const auto& l : j.at("layers")) {
      const int dim = l.get<int>();
      if (dim < 2) fail(ErrorKind::invalid_argument, "layer dimension must be >= 2");
      c.layers.push_back({dim - 2});
    }
    c.task = parse_task(j.value("task", std::string("multiclass")));
    c.K = c.task == Task::multiclass ? j.value("K", 2) : 2;
    validate(c);
    return c;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::invalid_argument, std::string("bad network config: ") + e.what());
  }
}

}  // namespace

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::invalid_argument, "cannot open " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::invalid_argument, "cannot write " + path);
  out << text;
  if (!out) fail(ErrorKind::invalid_argument, "write failed for " + path);
}

std::string dataset_csv(const Dataset& d) {
  validate(d);
  std::ostringstream s;
  s.precision(17);
  const int dim = d.dim();
  for (int a = 0; a < dim; ++a) s << 'f' << a << ',';
  s << "label\n";
  for (int i = 0; i < d.size(); ++i) {
    for (int a = 0; a < dim; ++a) s << d.features[i](a) << ',';
    s << d.labels[i] << '\n';
  }
  return s.str();
}

Dataset parse_dataset_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) fail(ErrorKind::invalid_argument, "empty CSV");
  std::vector<std::string> header;
  {
    std::stringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) header.push_back(cell);
  }
  if (header.size() < 2 || header.back() != "label") fail(ErrorKind::invalid_argument, "CSV header must end with label");
  const int dim = static_cast<int>(header.size()) - 1;
  for (int a = 0; a < dim; ++a)
    if (header[a] != "f" + std::to_string(a)) fail(ErrorKind::invalid_argument, "CSV header must be f0,...,label");
  Dataset d;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::stringstream ls(line);
    std::string cell;
    std::vector<double> vals;
    while (std::getline(ls, cell, ',')) {
      try {
        size_t used = 0;
        vals.push_back(std::stod(cell, &used));
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        fail(ErrorKind::invalid_argument, "bad number on CSV row " + std::to_string(row));
      }
    }
    if (static_cast<int>(vals.size()) != dim + 1)
      fail(ErrorKind::invalid_argument, "wrong column count on CSV row " + std::to_string(row));
    Vec x(dim);
    for (int a = 0; a < dim; ++a) x(a) = vals[a];
    d.features.push_back(x);
    d.labels.push_back(vals.back());
  }
  validate(d);
  return d;
}

void write_csv(const std::string& path, const Dataset& d) { write_text(path, dataset_csv(d)); }
Dataset read_csv(const std::string& path) { return parse_dataset_csv(read_text(path)); }

std::string network_config_json(const NetworkConfig& c) { return config_object(c).dump(); }

NetworkConfig parse_network_config(const std::string& json_text) { return config_from(parse_json(json_text)); }

std::string model_json(const NetworkConfig& c, const ParamSet& p) {
  FlatParams f = flatten(c, p);
  ordered_json j;
  j["format_version"] = kFormatVersion;
  j["config"] = config_object(c);
  ordered_json vals = ordered_json::array();
  for (int i = 0; i < f.values.size(); ++i) vals.push_back(number(f.values(i)));
  j["flat_params"] = vals;
  ordered_json layout = ordered_json::array();
  for (const auto& b : f.layout) {
    ordered_json e;
    e["name"] = b.name;
    e["offset"] = b.offset;
    e["rows"] = b.rows;
    e["cols"] = b.cols;
    layout.push_back(e);
  }
  j["layout"] = layout;
  return j.dump(2) + "\n";
}

void parse_model(const std::string& json_text, NetworkConfig* c, ParamSet* p) {
  ordered_json j = parse_json(json_text);
  check_version(j);
  try {
    NetworkConfig cfg = config_from(j.at("config"));
    FlatParams f;
    for (const auto& b : j.at("layout"))
      f.layout.push_back({b.at("name").get<std::string>(), b.at("offset").get<int>(), b.at("rows").get<int>(),
                          b.at("cols").get<int>()});
    const auto& vals = j.at("flat_params");
    f.values.resize(static_cast<int>(vals.size()));
    for (size_t i = 0; i < vals.size(); ++i) {
      if (vals[i].is_null()) fail(ErrorKind::invalid_argument, "model has non-finite parameters");
      f.values(static_cast<int>(i)) = vals[i].get<double>();
    }
    ParamSet ps = unflatten(cfg, f);
    if (c) *c = cfg;
    if (p) *p = std::move(ps);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::invalid_argument, std::string("bad model file: ") + e.what());
  }
}

std::string solutions_json(const SpaceId& source, const SpaceId& target, const std::vector<Solution>& sols) {
  ordered_json j;
  j["format_version"] = kFormatVersion;
  j["source"] = source.name();
  j["target"] = target.name();
  ordered_json arr = ordered_json::array();
  for (const auto& s : sols) {
    ordered_json e;
    e["W"] = matrix_rows(s.W);
    e["residual"] = number(s.residual);
    e["branch_tag"] = s.branch_tag;
    e["seed"] = s.seed;
    e["start"] = s.start;
    arr.push_back(e);
  }
  j["solutions"] = arr;
  return j.dump(2) + "\n";
}

std::string metrics_jsonl(const std::vector<EpochRecord>& history) {
  std::string out;
  for (const auto& h : history) {
    ordered_json e;
    e["epoch"] = h.epoch;
    e["train_loss"] = number(h.train_loss);
    e["test_loss"] = number(h.test_loss);
    e["accuracy"] = number(h.accuracy);
    out += e.dump() + "\n";
  }
  return out;
}

}  // namespace cartan
