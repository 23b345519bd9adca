#pragma once

#include "cartan/net.hpp"
#include "cartan/solver.hpp"
#include "cartan/train.hpp"

#include <string>
#include <vector>

namespace cartan {

inline constexpr const char* kFormatVersion = "v1";

std::string read_text(const std::string& path);
void write_text(const std::string& path, const std::string& text);

// Header f0,...,f{d-1},label.
std::string dataset_csv(const Dataset& d);
Dataset parse_dataset_csv(const std::string& text);
void write_csv(const std::string& path, const Dataset& d);
Dataset read_csv(const std::string& path);

std::string network_config_json(const NetworkConfig& c);
NetworkConfig parse_network_config(const std::string& json_text);

std::string model_json(const NetworkConfig& c, const ParamSet& p);
void parse_model(const std::string& json_text, NetworkConfig* c, ParamSet* p);

std::string solutions_json(const SpaceId& source, const SpaceId& target, const std::vector<Solution>& sols);

// One JSON object per line.
std::string metrics_jsonl(const std::vector<EpochRecord>& history);

}  // namespace cartan
