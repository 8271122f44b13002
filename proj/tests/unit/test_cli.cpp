#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "polysmooth/cli.hpp"
#include "polysmooth/serialization.hpp"

using namespace polysmooth;
using cli::JobSpec;

namespace {

const std::filesystem::path kData = POLYSMOOTH_TEST_DATA;

struct Outcome {
  int code;
  std::string out, err;
};

Outcome run(const JobSpec& job) {
  std::ostringstream out, err;
  int code = cli::run(job, out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "polysmooth_cli_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

JobSpec smooth_job() {
  JobSpec job;
  job.command = "smooth";
  job.complex_path = (kData / "segment.json").string();
  job.map_path = (kData / "tent.json").string();
  job.eta = "1/10";
  job.nu = 2;
  job.samples = 2000;
  return job;
}

}  // namespace

TEST_CASE("smooth reports passing certificates") {
  auto r = run(smooth_job());
  CHECK(r.code == 0);
  auto j = Json::parse(r.out);
  CHECK(j["ok"] == true);
  CHECK(j["command"] == "smooth");
  CHECK(j["certificates"]["map"]["max_error"].get<double>() < 0.1);
  CHECK(j["certificates"]["smoothness"]["min_order"].get<int>() >= 2);
  CHECK_FALSE(j.contains("timing"));
}

TEST_CASE("outputs are deterministic") {
  auto job = smooth_job();
  job.seed = 7;
  job.out_path = scratch("h1.json").string();
  auto a = run(job);
  job.out_path = scratch("h2.json").string();
  auto b = run(job);
  auto ja = Json::parse(a.out), jb = Json::parse(b.out);
  ja["job"].erase("out");
  jb["job"].erase("out");
  CHECK(ja == jb);
  std::ifstream f1(scratch("h1.json")), f2(scratch("h2.json"));
  std::stringstream s1, s2;
  s1 << f1.rdbuf();
  s2 << f2.rdbuf();
  CHECK(s1.str() == s2.str());
  CHECK_FALSE(s1.str().empty());
}

TEST_CASE("timing is opt-in") {
  auto job = smooth_job();
  job.timing = true;
  auto j = Json::parse(run(job).out);
  CHECK(j.contains("timing"));
}

TEST_CASE("iota displacement") {
  JobSpec job;
  job.command = "iota";
  job.complex_path = (kData / "segment.json").string();
  job.nu = 1;
  job.n = 5;
  job.samples = 2000;
  auto r = run(job);
  CHECK(r.code == 0);
  auto j = Json::parse(r.out);
  CHECK(j["certificates"]["map"]["max_error"].get<double>() < 1.0 / 32);
  CHECK(j["certificates"]["vertex_fixpoint_error"].get<double>() <= 1e-12);
}

TEST_CASE("input errors exit with 2") {
  auto job = smooth_job();
  job.eta = "zero";
  CHECK(run(job).code == 2);
  job = smooth_job();
  job.complex_path = (kData / "missing.json").string();
  auto r = run(job);
  CHECK(r.code == 2);
  CHECK_FALSE(r.err.empty());
  job = smooth_job();
  job.nu = 0;
  CHECK(run(job).code == 2);
  JobSpec unknown;
  unknown.command = "frobnicate";
  CHECK(run(unknown).code == 2);
}

TEST_CASE("a corrupted cover fails verification naming property ii") {
  JobSpec build;
  build.command = "verify";
  build.complex_path = (kData / "segment.json").string();
  build.delta = "1/5";
  build.out_path = scratch("cover.json").string();
  REQUIRE(run(build).code == 0);

  auto cover = read_json_file(build.out_path);
  cover["elements"][0]["radius"] = "1";
  cover["delta"] = "2";
  write_text_file(scratch("corrupt.json"), dump(cover));
  JobSpec verify;
  verify.command = "verify";
  verify.cover_path = scratch("corrupt.json").string();
  auto r = run(verify);
  CHECK(r.code == 1);
  auto j = Json::parse(r.out);
  CHECK(j["ok"] == false);
  bool names_ii = false;
  for (const auto& v : j["violations"]) names_ii = names_ii || v["kind"] == "property ii";
  CHECK(names_ii);
}

TEST_CASE("subdivide reports mesh decay") {
  JobSpec job;
  job.command = "subdivide";
  job.complex_path = (kData / "segment.json").string();
  job.k = 3;
  auto r = run(job);
  CHECK(r.code == 0);
  auto j = Json::parse(r.out);
  CHECK(j["ok"] == true);
}

TEST_CASE("approximate and retraction commands") {
  JobSpec a;
  a.command = "approximate";
  a.complex_path = (kData / "segment.json").string();
  a.map_path = (kData / "tent.json").string();
  a.eps = "1/5";
  a.samples = 1000;
  CHECK(run(a).code == 0);

  JobSpec r;
  r.command = "retraction";
  r.divisor_path = (kData / "crossing.json").string();
  r.csv_path = scratch("rho.csv").string();
  auto out = run(r);
  CHECK(out.code == 0);
  CHECK(std::filesystem::file_size(r.csv_path) > 0);
}
