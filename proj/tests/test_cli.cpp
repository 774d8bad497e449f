// Integration tests that drive the installed CLI binary. argv[1] is the
// binary path, argv[2] the schema directory.
#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

using nlohmann::json;

namespace {

std::string g_cli;
std::string g_schema_dir;

struct RunResult {
  int exit_code = -1;
  std::string output;
};

RunResult run(const std::string& args, bool merge_stderr = false) {
  const std::string cmd =
      g_cli + " " + args + (merge_stderr ? " 2>&1" : " 2>/dev/null");
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  RunResult r;
  char buf[4096];
  std::size_t got;
  while ((got = fread(buf, 1, sizeof(buf), pipe)) > 0) {
    r.output.append(buf, got);
  }
  const int rc = pclose(pipe);
  r.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  return r;
}

json load_schema(const std::string& name) {
  std::ifstream in(g_schema_dir + "/" + name);
  REQUIRE(in.good());
  json j;
  in >> j;
  return j;
}

// Validator for the JSON-Schema subset the shipped schemas use:
// type (string or list), properties, required, items, enum,
// additionalProperties (boolean).
std::string validate(const json& schema, const json& value,
                     const std::string& path) {
  if (schema.contains("enum")) {
    bool found = false;
    for (const auto& v : schema["enum"]) {
      if (v == value) found = true;
    }
    if (!found) return path + ": value not in enum";
  }
  if (schema.contains("type")) {
    auto matches = [&](const std::string& t) {
      if (t == "object") return value.is_object();
      if (t == "array") return value.is_array();
      if (t == "string") return value.is_string();
      if (t == "number") return value.is_number();
      if (t == "integer") return value.is_number_integer();
      if (t == "boolean") return value.is_boolean();
      if (t == "null") return value.is_null();
      return false;
    };
    bool ok = false;
    if (schema["type"].is_string()) {
      ok = matches(schema["type"].get<std::string>());
    } else {
      for (const auto& t : schema["type"]) {
        if (matches(t.get<std::string>())) ok = true;
      }
    }
    if (!ok) return path + ": type mismatch";
  }
  if (value.is_object()) {
    if (schema.contains("required")) {
      for (const auto& key : schema["required"]) {
        if (!value.contains(key.get<std::string>())) {
          return path + ": missing required key " + key.get<std::string>();
        }
      }
    }
    if (schema.contains("properties")) {
      for (auto it = value.begin(); it != value.end(); ++it) {
        if (schema["properties"].contains(it.key())) {
          const std::string err = validate(schema["properties"][it.key()],
                                           it.value(), path + "." + it.key());
          if (!err.empty()) return err;
        } else if (schema.value("additionalProperties", true) == false) {
          return path + ": unexpected key " + it.key();
        }
      }
    }
  }
  if (value.is_array() && schema.contains("items")) {
    for (std::size_t i = 0; i < value.size(); ++i) {
      const std::string err =
          validate(schema["items"], value[i], path + "[" + std::to_string(i) + "]");
      if (!err.empty()) return err;
    }
  }
  return {};
}

void check_against_schema(const std::string& schema_file,
                          const std::string& text) {
  const json value = json::parse(text);
  const std::string err = validate(load_schema(schema_file), value, "$");
  INFO("schema ", schema_file, ": ", err);
  CHECK(err.empty());
}

}  // namespace

TEST_CASE("coeffs: unit weight and schema") {
  const auto r = run("coeffs --m 1 --h 0.5 --format json");
  REQUIRE(r.exit_code == 0);
  const json j = json::parse(r.output);
  CHECK(j["normalized"] == json::array({1.0}));
  check_against_schema("coefficients.schema.json", r.output);

  const auto csv = run("coeffs --m 3 --h 0.5 --format csv");
  CHECK(csv.exit_code == 0);
  CHECK(csv.output.find("j,raw,normalized") != std::string::npos);
}

TEST_CASE("estimate: sphere gradient by cfd") {
  const auto r =
      run("estimate --fn sphere --x 3,-4 --scheme cfd --sigma 0.1 --h 1");
  REQUIRE(r.exit_code == 0);
  const json j = json::parse(r.output);
  CHECK(j["estimate"][0].get<double>() == doctest::Approx(6.0).epsilon(1e-12));
  CHECK(j["estimate"][1].get<double>() == doctest::Approx(-8.0).epsilon(1e-12));
  CHECK(j["eta"].get<double>() <= 1e-12);
  CHECK(j["evals"] == 4);
  check_against_schema("gradient_estimate.schema.json", r.output);
}

TEST_CASE("estimate: malformed point list exits 2 with a diagnostic") {
  const auto r = run(
      "estimate --fn sphere --x 3,,4 --scheme cfd --sigma 0.1 --h 1", true);
  CHECK(r.exit_code == 2);
  CHECK(r.output.find("comma-separated") != std::string::npos);
}

TEST_CASE("usage errors exit 2, domain errors exit 1") {
  CHECK(run("frobnicate", true).exit_code == 2);
  CHECK(run("estimate --fn sphere --x 1,2 --scheme newton --sigma 0.1", true)
            .exit_code == 2);
  // valid flags, unknown objective: domain error
  const auto r =
      run("estimate --fn nosuchfn --x 1,2 --scheme cfd --sigma 0.1", true);
  CHECK(r.exit_code == 1);
  CHECK(r.output.find("valid names") != std::string::npos);
}

TEST_CASE("inconsistent S, m, h and unknown suite names are domain errors") {
  const auto r = run(
      "estimate --fn sphere --x 1,1 --scheme nmxfd --sigma 0.1 --m 4 "
      "--h 0.5 --S 3",
      true);
  CHECK(r.exit_code == 1);
  CHECK(r.output.find("S != m*h") != std::string::npos);

  const auto bench = run("bench --sigma 1e-2 --suite nosuchfn", true);
  CHECK(bench.exit_code == 1);
  CHECK(bench.output.find("valid names") != std::string::npos);
}

TEST_CASE("repeated runs are byte-identical") {
  const std::string cmd =
      "estimate --fn beale --x 0.7,0.4 --scheme gsg --sigma 0.01 --M 64 "
      "--seed 12345";
  const auto a = run(cmd);
  const auto b = run(cmd);
  CHECK(a.exit_code == 0);
  CHECK(a.output == b.output);

  const std::string bench_cmd =
      "bench --sigma 1e-2 --suite beale,himmelblau --schemes cfd,nmxfd "
      "--seed 7 --jobs 2";
  CHECK(run(bench_cmd).output == run(bench_cmd).output);
}

TEST_CASE("fns list names the registry and validates") {
  const auto r = run("fns list");
  REQUIRE(r.exit_code == 0);
  CHECK(r.output.find("rosenbrock2") != std::string::npos);
  CHECK(r.output.find("log_sum_exp") != std::string::npos);
  check_against_schema("objective_list.schema.json", r.output);
}

TEST_CASE("bounds output validates and every bound row holds") {
  const auto r = run(
      "bounds --fn cubic_valley --x 0.1,0.2,0.1 --sigma 0.01 --m 4 --S 2 "
      "--lambda 1e-3");
  REQUIRE(r.exit_code == 0);
  check_against_schema("bound_report.schema.json", r.output);
  const json j = json::parse(r.output);
  CHECK(j["H_source"] == "declared");
  for (const auto& row : j["rows"]) {
    INFO(row.dump());
    CHECK(row["satisfied"].get<bool>());
  }
}

TEST_CASE("buckets output validates; bucket 0 is the start") {
  const auto r = run("buckets --fn rosenbrock2");
  REQUIRE(r.exit_code == 0);
  check_against_schema("bucket_set.schema.json", r.output);
  const json j = json::parse(r.output);
  CHECK(j["buckets"][0]["present"].get<bool>());
  CHECK(j["buckets"][0]["iterate"] == 0);
  CHECK(j["buckets"][0]["grad_ratio"].get<double>() == 1.0);
}

TEST_CASE("variance output validates and sits near theory") {
  const auto r = run(
      "variance --scheme cfd --fn sphere --x 1 --sigma 1e-2 --h 1 --m 1 "
      "--lambda 1e-3 --trials 20000 --seed 3");
  REQUIRE(r.exit_code == 0);
  check_against_schema("variance_experiment.schema.json", r.output);
  const json j = json::parse(r.output);
  CHECK(j["theoretical"].get<double>() == doctest::Approx(5e-3).epsilon(1e-9));
  CHECK(j["ratio"].get<double>() == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("bench json validates against the report schema") {
  const auto r = run(
      "bench --sigma 1e-2 --suite beale,quad_scaled --schemes cfd,nmxfd "
      "--seed 11 --jobs 2 --format json");
  REQUIRE(r.exit_code == 0);
  check_against_schema("benchmark_report.schema.json", r.output);

  const auto md = run(
      "bench --sigma 1e-2 --suite beale --schemes cfd --seed 11 "
      "--format markdown");
  CHECK(md.exit_code == 0);
  CHECK(md.output.find("| Scheme | N |") == 0);
}

TEST_CASE("bench --strict flags estimator failures") {
  // the pure-sphere trajectory lands exactly on the minimizer, so the
  // higher buckets carry zero true gradients and must be reported
  const auto strict = run(
      "bench --sigma 1e-2 --suite sphere --schemes cfd --seed 1 --strict "
      "--out /dev/null",
      true);
  CHECK(strict.exit_code == 1);
  const auto lax = run(
      "bench --sigma 1e-2 --suite sphere --schemes cfd --seed 1 --out /dev/null");
  CHECK(lax.exit_code == 0);
}

TEST_CASE("config file overlay and environment seed fallback") {
  const std::string cfg_path = "/tmp/gradmix_test_config.txt";
  {
    std::ofstream out(cfg_path);
    out << "# overlay for the estimate subcommand\n";
    out << "sigma = 0.5\n";
    out << "M = 8\n";
    out << "seed = 41\n";
  }
  // config supplies sigma/M/seed
  const auto from_cfg = run(
      "estimate --fn sphere --x 1,1 --scheme gsg --config " + cfg_path);
  REQUIRE(from_cfg.exit_code == 0);
  const json a = json::parse(from_cfg.output);
  CHECK(a["config"]["sigma"].get<double>() == 0.5);
  CHECK(a["config"]["M"] == 8);
  CHECK(a["config"]["seed"] == 41);

  // command line wins over the config file
  const auto overridden = run(
      "estimate --fn sphere --x 1,1 --scheme gsg --sigma 0.25 --config " +
      cfg_path);
  const json b = json::parse(overridden.output);
  CHECK(b["config"]["sigma"].get<double>() == 0.25);
  CHECK(b["config"]["M"] == 8);

  // GRADMIX_SEED applies when no --seed is given anywhere
  const std::string env_cmd =
      "GRADMIX_SEED=4242 " + g_cli +
      " estimate --fn sphere --x 1,1 --scheme gsg --sigma 0.1 2>/dev/null";
  FILE* pipe = popen(env_cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[4096];
  std::size_t got;
  while ((got = fread(buf, 1, sizeof(buf), pipe)) > 0) out.append(buf, got);
  pclose(pipe);
  const json c = json::parse(out);
  CHECK(c["config"]["seed"] == 4242);

  std::remove(cfg_path.c_str());
}

int main(int argc, char** argv) {
  if (argc < 3) {
    std::fprintf(stderr, "usage: test_cli <cli-binary> <schema-dir>\n");
    return 1;
  }
  g_cli = argv[1];
  g_schema_dir = argv[2];
  doctest::Context context;
  context.applyCommandLine(1, argv);
  return context.run();
}
