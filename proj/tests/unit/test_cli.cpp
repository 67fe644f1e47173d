#include <doctest.h>

#include <sstream>

#include <json.hpp>

#include "cogload/cli.hpp"
#include "helpers.hpp"

using namespace cogload;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

json read_json(const std::filesystem::path& p) { return json::parse(testutil::read_file(p)); }

}  // namespace

TEST_CASE("pipeline end to end") {
  const auto dir = testutil::temp_dir("cli_pipeline");
  const auto p = [&](const char* name) { return (dir / name).string(); };

  REQUIRE(cli({"synth-data", "--n", "60", "--separation", "5", "--seed", "3", "--out", p("d.csv")}).code == 0);
  REQUIRE(cli({"train", "--data", p("d.csv"), "--out-model", p("m.json"), "--set", "eval.k=3"})
              .code == 0);
  const auto metrics = read_json(p("m.json.metrics.json"));
  CHECK(metrics["kind"] == "train");
  CHECK(metrics.contains("config"));
  CHECK(metrics["summary"]["mean"]["accuracy"].get<double>() > 0.6);

  REQUIRE(cli({"quantize", "--model", p("m.json"), "--data", p("d.csv"), "--out", p("q.json")}).code == 0);
  const auto q = read_json(p("q.json"));
  CHECK(q["kind"] == "quantize");
  for (const auto& row : q["w_int"]) {
    for (const auto& v : row) CHECK(std::abs(v.get<int>()) <= 3);
  }

  REQUIRE(cli({"encode", "--in", p("d.csv"), "--normalization-from", p("m.json"), "--out", p("e.jsonl")}).code == 0);
  const auto emu = cli({"emulate", "--qmodel", p("q.json"), "--events", p("e.jsonl"), "--mismatch-cv",
                        "0", "--trials", "3", "--out", p("hw.json"), "--set", "hwemu.base_efficacy=6.3"});
  REQUIRE(emu.code == 0);
  const auto hw = read_json(p("hw.json"));
  CHECK(hw["kind"] == "emulate");
  const auto& per = hw["hw_eval"]["per_trial"];
  REQUIRE(per.size() == 3);
  CHECK(per[0] == per[1]);
  CHECK(per[1] == per[2]);
  CHECK(hw["software_agreement"].size() == 3);

  REQUIRE(cli({"baseline", "--data", p("d.csv"), "--out", p("b.json"), "--set", "eval.k=3"}).code == 0);
  REQUIRE(cli({"report", "--results", p("m.json.metrics.json"), p("b.json"), p("hw.json"), "--out",
               p("r.json")})
              .code == 0);
  CHECK(read_json(p("r.json"))["rows"].size() == 3);
}

TEST_CASE("quantize accepts a model with fixed weights") {
  const auto dir = testutil::temp_dir("cli_quant");
  REQUIRE(cli({"synth-data", "--n", "20", "--out", (dir / "d.csv").string()}).code == 0);
  REQUIRE(cli({"train", "--data", (dir / "d.csv").string(), "--out-model", (dir / "m.json").string(),
               "--set", "snn.epochs=1", "--set", "eval.k=2"})
              .code == 0);
  auto model = read_json(dir / "m.json");
  model["w"] = json::parse("[[0.1,-0.4,-0.35,1.2,-0.8],[-0.1,0.4,0.35,-1.2,0.8]]");
  testutil::write_file(dir / "m2.json", model.dump());
  REQUIRE(cli({"quantize", "--model", (dir / "m2.json").string(), "--out", (dir / "q.json").string()}).code == 0);
  CHECK(read_json(dir / "q.json")["w_int"] == json::parse("[[0,-1,-1,3,-2],[0,1,1,-3,2]]"));
}

TEST_CASE("exit codes") {
  const auto dir = testutil::temp_dir("cli_errors");
  CHECK(cli({}).code == kExitConfig);
  CHECK(cli({"train"}).code == kExitConfig);
  CHECK(cli({"synth-data", "--out", (dir / "x.csv").string(), "--set", "nope=1"}).code == kExitConfig);
  CHECK(cli({"synth-data", "--out", (dir / "x.csv").string(), "--set", "data.n=abc"}).code == kExitConfig);
  CHECK(cli({"train", "--data", (dir / "missing.csv").string(), "--out-model", (dir / "m.json").string()})
            .code == kExitData);
  testutil::write_file(dir / "bad.json", "{not json");
  CHECK(cli({"emulate", "--qmodel", (dir / "bad.json").string(), "--events", (dir / "e.jsonl").string(),
             "--out", (dir / "o.json").string()})
            .code == kExitData);
  testutil::write_file(dir / "zero.json", R"({"w": [[0,0,0,0,0],[0,0,0,0,0]]})");
  const auto z = cli({"quantize", "--model", (dir / "zero.json").string(), "--out", (dir / "q.json").string()});
  CHECK((z.code == kExitNumeric || z.code == kExitData));
  CHECK(cli({"--help"}).code == kExitOk);
}
