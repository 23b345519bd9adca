#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cartan/errors.hpp"
#include "cartan/io.hpp"
#include "cartan/random.hpp"

#include <json.hpp>

using namespace cartan;

TEST_CASE("csv roundtrip") {
  Dataset d = gen_synthetic(SyntheticKind::blobs, 30, 3, 4, 3);
  std::string text = dataset_csv(d);
  CHECK(text.rfind("f0,f1,f2,label\n", 0) == 0);
  Dataset back = parse_dataset_csv(text);
  REQUIRE(back.size() == 30);
  for (int i = 0; i < 30; ++i) {
    CHECK(back.features[i] == d.features[i]);
    CHECK(back.labels[i] == d.labels[i]);
  }
  CHECK(dataset_csv(back) == text);
  CHECK_THROWS_AS(parse_dataset_csv("a,b\n1,2\n"), Error);
  CHECK_THROWS_AS(parse_dataset_csv("f0,label\n1,2,3\n"), Error);
  CHECK_THROWS_AS(parse_dataset_csv("f0,label\n1,x\n"), Error);
  CHECK_THROWS_AS(parse_dataset_csv(""), Error);
}

TEST_CASE("model roundtrip") {
  NetworkConfig c;
  c.input_dim = 4;
  c.layers = {{3}, {1}};
  c.task = Task::multiclass;
  c.K = 3;
  auto rng = seeded(1);
  ParamSet p = unflatten(c, uniform_vec(rng, param_count(c), -1, 1));
  std::string text = model_json(c, p);
  auto j = nlohmann::json::parse(text);
  CHECK(j["format_version"] == "v1");
  CHECK(j["config"]["layers"] == nlohmann::json::array({5, 3}));
  CHECK(j["layout"].size() == param_layout(c).size());
  NetworkConfig c2;
  ParamSet p2;
  parse_model(text, &c2, &p2);
  CHECK(c2.K == 3);
  CHECK(flatten(c2, p2).values == flatten(c, p).values);
  CHECK(model_json(c2, p2) == text);

  j["format_version"] = "v0";
  CHECK_THROWS_AS(parse_model(j.dump(), nullptr, nullptr), Error);
  CHECK_THROWS_AS(parse_model("{", nullptr, nullptr), Error);
  auto k = nlohmann::json::parse(text);
  k["flat_params"].erase(0);
  CHECK_THROWS_AS(parse_model(k.dump(), nullptr, nullptr), Error);
}

TEST_CASE("network config parsing") {
  NetworkConfig c = parse_network_config(R"({"input_dim":4,"layers":[5,3],"task":"binary"})");
  CHECK(c.layers.size() == 2);
  CHECK(c.layers[0].q == 3);
  CHECK(c.task == Task::binary);
  CHECK_THROWS_AS(parse_network_config(R"({"input_dim":4,"layers":[1]})"), Error);
  CHECK_THROWS_AS(parse_network_config(R"({"layers":[3]})"), Error);
}

TEST_CASE("solutions and metrics") {
  Solution s{Mat::Identity(2, 2), 0.0, "identity-extension", 7, "identity"};
  auto j = nlohmann::json::parse(solutions_json(SpaceId::layer(0), SpaceId::layer(0), {s}));
  CHECK(j["format_version"] == "v1");
  CHECK(j["solutions"][0]["W"] == nlohmann::json::parse("[[1.0,0.0],[0.0,1.0]]"));
  CHECK(j["solutions"][0]["seed"] == 7);
  std::string m = metrics_jsonl({{1, 0.5, 0.25, 1.0}, {2, 0.4, 0.2, std::nan("")}});
  CHECK(m == "{\"epoch\":1,\"train_loss\":0.5,\"test_loss\":0.25,\"accuracy\":1.0}\n"
             "{\"epoch\":2,\"train_loss\":0.4,\"test_loss\":0.2,\"accuracy\":null}\n");
}
