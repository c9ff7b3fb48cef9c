#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "cli_support.hpp"
#include "json.hpp"

using namespace qoct::testing;

namespace {

std::string example(const char* name) { return (examples_dir() / name).string(); }
std::string data(const char* name) { return (test_data_dir() / "data" / name).string(); }

}  // namespace

TEST_CASE("validate accepts the shipped configs") {
  for (const char* name : {"rabi.json", "tls_optimize.json", "ladder3_penalty.json",
                           "tls_time_dependent.json"}) {
    const CliRun r = run({"validate", example(name)});
    CHECK_MESSAGE(r.code == 0, name << ": " << r.err);
    CHECK(r.out.rfind("ok:", 0) == 0);
  }
}

TEST_CASE("validate rejects a non-Hermitian drift and names the field") {
  const CliRun r = run({"validate", data("non_hermitian.json")});
  CHECK(r.code == 1);
  CHECK(r.err.find("system.h_static") != std::string::npos);
  // other subcommands report the same failure with the runtime exit code
  CHECK(run({"simulate", data("non_hermitian.json"), "--out", scratch_dir("nh").string()}).code ==
        2);
}

TEST_CASE("unknown fields and missing files are config errors") {
  const CliRun r = run({"validate", data("unknown_field.json")});
  CHECK(r.code == 1);
  CHECK(r.err.find("grid.substeps") != std::string::npos);
  CHECK(run({"validate", data("does_not_exist.json")}).code == 1);
}

TEST_CASE("argument errors") {
  CHECK(run({}).code == 1);
  CHECK(run({"gradient", example("rabi.json"), "--route", "magic"}).code == 1);
  CHECK(run({"simulate", example("rabi.json"), "--format", "xml"}).code == 1);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("contour route on a time-dependent target exits with 1") {
  const CliRun r = run({"gradient", example("tls_time_dependent.json"), "--route", "contour",
                        "--out", scratch_dir("td_contour").string()});
  CHECK(r.code == 1);
  CHECK_FALSE(r.err.empty());
}

TEST_CASE("Rabi gradient through the CLI") {
  const fs::path out = scratch_dir("rabi_gradient");
  for (const char* route : {"adjoint", "response", "contour", "fd"}) {
    REQUIRE(run({"gradient", example("rabi.json"), "--route", route, "--out", out.string()})
                .code == 0);
    const auto doc = nlohmann::json::parse(read_file(out / "gradient.json"));
    CHECK(doc["route"] == route);
    CHECK(std::abs(doc["merit"].get<double>() - 0.5) <= 1e-8);
    CHECK(std::abs(doc["values"][0].get<double>() - 1.0) <= 1e-6);
  }
}

TEST_CASE("simulate writes a trajectory and a pulse") {
  const fs::path out = scratch_dir("simulate");
  const CliRun r = run({"simulate", example("ladder3_penalty.json"), "--out", out.string()});
  REQUIRE(r.code == 0);
  const auto traj = read_csv(out / "trajectory.csv");
  CHECK(traj.size() == 601);
  for (const auto& row : traj) CHECK(std::abs(row[1] + row[2] + row[3] - 1.0) <= 1e-12);
  CHECK(read_csv(out / "pulse.csv").size() == 601);
  CHECK(read_file(out / "trajectory.csv").rfind("t,population_0,population_1,population_2,expectation\n", 0) == 0);
}

TEST_CASE("outputs are byte-identical across runs") {
  for (const char* cmd : {"optimize", "respond"}) {
    const fs::path a = scratch_dir(std::string("repro_a_") + cmd);
    const fs::path b = scratch_dir(std::string("repro_b_") + cmd);
    REQUIRE(run({cmd, example("tls_optimize.json"), "--out", a.string()}).code == 0);
    REQUIRE(run({cmd, example("tls_optimize.json"), "--out", b.string()}).code == 0);
    for (const auto& entry : fs::directory_iterator(a)) {
      CHECK(read_file(entry.path()) == read_file(b / entry.path().filename()));
    }
  }
}

TEST_CASE("golden files") {
  const auto problems = check_golden_files();
  for (const auto& p : problems) MESSAGE(p);
  CHECK(problems.empty());
}

TEST_CASE("contour-check difference column equals the respond kernel") {
  for (const char* name : {"rabi.json", "tls_optimize.json", "ladder3_penalty.json"}) {
    const double worst = contour_vs_respond(example(name), name);
    CHECK(worst >= 0.0);
    CHECK(worst <= 1e-12);
  }
}

TEST_CASE("optimize summary") {
  const fs::path out = scratch_dir("optimize_summary");
  REQUIRE(run({"optimize", example("tls_optimize.json"), "--out", out.string()}).code == 0);
  const auto doc = nlohmann::json::parse(read_file(out / "summary.json"));
  CHECK(doc["final_merit"].get<double>() > 0.999);
  CHECK(doc["seed"] == 42);
  CHECK(doc["params"].size() == 8);
}
