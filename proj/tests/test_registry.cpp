#include <doctest.h>

#include <json.hpp>

#include "errors.hpp"
#include "registry.hpp"

using namespace corpuskit;

namespace {

nlohmann::json valid_registry() {
  return nlohmann::json::parse(R"({
    "datasets": [
      {"name": "b", "retention_rank": 2, "insertion_order": 3},
      {"name": "a", "retention_rank": 1, "insertion_order": 1, "filter_exempt": true},
      {"name": "c", "retention_rank": 3, "insertion_order": 2, "input_dir": "/data/c"}
    ]
  })");
}

StatusCode code_of(const nlohmann::json& j) {
  try {
    DatasetRegistry::from_json(j);
  } catch (const PipelineError& e) {
    return e.code();
  }
  return StatusCode::kOk;
}

}  // namespace

TEST_CASE("registry parses and orders datasets by insertion order") {
  const DatasetRegistry reg = DatasetRegistry::from_json(valid_registry());
  REQUIRE(reg.datasets().size() == 3);
  CHECK(reg.datasets()[0].name == "a");
  CHECK(reg.datasets()[1].name == "c");
  CHECK(reg.datasets()[2].name == "b");
  CHECK(reg.datasets()[0].filter_exempt);
  CHECK(!reg.datasets()[1].filter_exempt);
  CHECK(reg.datasets()[1].input_dir == "/data/c");
  CHECK(reg.at("b").retention_rank == 2);
  CHECK(reg.find("nope") == nullptr);
  CHECK(!reg.empty());
}

TEST_CASE("unknown dataset lookup is a configuration error") {
  const DatasetRegistry reg = DatasetRegistry::from_json(valid_registry());
  CHECK_THROWS_AS(reg.at("zzz"), PipelineError);
  try {
    reg.at("zzz");
  } catch (const PipelineError& e) {
    CHECK(e.code() == StatusCode::kConfigError);
  }
}

TEST_CASE("registry validation rejects malformed input") {
  CHECK(code_of(nlohmann::json::parse("[]")) == StatusCode::kConfigError);
  CHECK(code_of(nlohmann::json::parse("{}")) == StatusCode::kConfigError);

  nlohmann::json j = valid_registry();
  j["datasets"][0]["name"] = "a";  // duplicate name
  CHECK(code_of(j) == StatusCode::kConfigError);

  j = valid_registry();
  j["datasets"][0]["name"] = "has:colon";
  CHECK(code_of(j) == StatusCode::kConfigError);

  j = valid_registry();
  j["datasets"][0]["name"] = "has/slash";
  CHECK(code_of(j) == StatusCode::kConfigError);

  j = valid_registry();
  j["datasets"][0]["name"] = "";
  CHECK(code_of(j) == StatusCode::kConfigError);

  j = valid_registry();
  j["datasets"][0]["retention_rank"] = 1;  // duplicate rank
  CHECK(code_of(j) == StatusCode::kConfigError);

  j = valid_registry();
  j["datasets"][0]["insertion_order"] = 1;  // duplicate order
  CHECK(code_of(j) == StatusCode::kConfigError);

  j = valid_registry();
  j["datasets"][0]["retention_rank"] = 0;
  CHECK(code_of(j) == StatusCode::kConfigError);

  j = valid_registry();
  j["datasets"][0]["insertion_order"] = -1;
  CHECK(code_of(j) == StatusCode::kConfigError);

  j = valid_registry();
  j["datasets"][0].erase("retention_rank");
  CHECK(code_of(j) == StatusCode::kConfigError);

  j = valid_registry();
  j["datasets"][0]["filter_exempt"] = "yes";
  CHECK(code_of(j) == StatusCode::kConfigError);
}

TEST_CASE("the shipped example registry loads") {
  const DatasetRegistry reg =
      DatasetRegistry::load(std::string(CORPUSKIT_CONFIGS) +
                            "/registry.example.json");
  CHECK(reg.datasets().size() == 7);
  // Exactly one dataset is filter-exempt, and it is the highest-priority one.
  int exempt = 0;
  for (const DatasetDescriptor& d : reg.datasets()) {
    if (d.filter_exempt) {
      ++exempt;
      CHECK(d.retention_rank == 1);
    }
  }
  CHECK(exempt == 1);
}
