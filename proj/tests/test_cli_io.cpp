#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>
#include <string>

#include "doctest.h"
#include "loewner/driving.hpp"
#include "loewner/io.hpp"

using namespace loewner;
using io::Json;

namespace {

const std::string kCli = LOEWNER_CLI;
const std::string kFixtures = LOEWNER_FIXTURES;

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args, const std::string& env = "") {
  Run r;
  FILE* pipe = ::popen((env + " " + kCli + " " + args).c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int status = ::pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string fixture(const std::string& name) { return kFixtures + "/" + name; }

std::string scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "loewner_cli_test";
  std::filesystem::create_directories(dir);
  return (dir / name).string();
}

std::vector<double> last_row(const std::string& csv) {
  std::istringstream in(csv);
  std::string line, last;
  while (std::getline(in, line)) {
    if (!line.empty()) last = line;
  }
  std::vector<double> row;
  std::istringstream fields(last);
  std::string f;
  while (std::getline(fields, f, ',')) row.push_back(std::stod(f));
  return row;
}

// Tip of the straight slit at angle phi at t = 1.
Point straight_tip(double phi) {
  return 2.0 * std::pow(kPi / phi - 1.0, 0.5 - phi / kPi) * std::polar(1.0, phi);
}

}  // namespace

TEST_CASE("json round trip is the identity") {
  const SampledDriving u({0.0, 0.1, 0.35, 1.0}, {0.0, -0.3, 1.0 / 3.0, 0.2}, Interp::PiecewiseSqrt);
  const Json ju = io::to_json(u);
  const SampledDriving u2 = io::driving_from_json(io::parse(io::dump(ju)));
  CHECK(u2.times() == u.times());
  CHECK(u2.values() == u.values());
  CHECK(u2.interp() == u.interp());
  CHECK(io::dump(io::to_json(u2)) == io::dump(ju));

  SlitPolyline s;
  s.vertices = {{0.1, 0.0}, {0.2, 0.7}, {-0.123456789012345678, 1.1}};
  const Json js = io::to_json(std::vector<SlitPolyline>{s, s.translated(3.0)});
  const auto back = io::slits_from_json(io::parse(io::dump(js)));
  REQUIRE(back.size() == 2);
  CHECK(back[0].vertices == s.vertices);
  CHECK(io::dump(io::to_json(back)) == io::dump(js));

  const MultiSlitSystem constant(std::vector<double>{0.25, 0.75}, {u, u.transformed(1.0, 2.0)});
  const Json jc = io::to_json(constant);
  CHECK(io::dump(io::to_json(io::system_from_json(io::parse(io::dump(jc))))) == io::dump(jc));

  const SampledDriving w({0.0, 1.0}, {0.4, 0.6}, Interp::Linear);
  const SampledDriving v({0.0, 1.0}, {0.6, 0.4}, Interp::Linear);
  const MultiSlitSystem varying(std::vector<SampledDriving>{w, v}, {u, u.transformed(1.0, 2.0)});
  const Json jv = io::to_json(varying);
  CHECK(io::dump(io::to_json(io::system_from_json(io::parse(io::dump(jv))))) == io::dump(jv));
}

TEST_CASE("numbers are printed with 17 significant digits") {
  CHECK(io::format_number(0.1) == "0.10000000000000001");
  CHECK(io::format_number(2.0) == "2");
  CHECK(io::dump(Json{{"x", 1.0 / 3.0}}, -1) == "{\"x\":0.33333333333333331}\n");
  CHECK(io::dump(Json{{"x", std::nan("")}}, -1) == "{\"x\":null}\n");
}

TEST_CASE("malformed documents raise InputError") {
  CHECK_THROWS_AS(io::parse("{\"samples\": [", "x"), InputError);
  CHECK_THROWS_AS(io::driving_from_json(io::parse("{\"interp\": \"Linear\"}")), InputError);
  CHECK_THROWS_AS(io::driving_from_json(io::parse("{\"samples\": [[0, 0], [0.5]]}")), InputError);
  CHECK_THROWS_AS(io::driving_from_json(io::parse("{\"samples\": [[0, 0], [1, \"a\"]]}")), InputError);
  CHECK_THROWS_AS(io::driving_from_json(io::parse("{\"samples\": [[0, 0], [1, 0]], \"interp\": \"Cubic\"}")),
                  InputError);
  CHECK_THROWS_AS(io::driving_from_json(io::parse("{\"samples\": [[0, 0], [1, 0], [0.5, 1]]}")), InputError);
  CHECK_THROWS_AS(io::slit_from_json(io::parse("{\"vertices\": [[0, 0.5], [0, 1]]}")), InputError);
  CHECK_THROWS_AS(io::slit_from_json(io::parse("{\"vertices\": [[0, 0], [1, -1]]}")), InputError);
  CHECK_THROWS_AS(io::system_from_json(io::parse("{\"lambdas\": [1]}")), InputError);
  CHECK_THROWS_AS(io::read_file("/nonexistent/loewner.json"), InputError);
}

TEST_CASE("atomic writes replace the file and leave no temporary behind") {
  const std::string path = scratch("atomic.txt");
  io::write_file_atomic(path, "first\n");
  io::write_file_atomic(path, "second\n");
  CHECK(io::read_file(path) == "second\n");
  int files = 0;
  for (const auto& e : std::filesystem::directory_iterator(std::filesystem::path(path).parent_path())) {
    if (e.path().filename().string().rfind("atomic.txt", 0) == 0) ++files;
  }
  CHECK(files == 1);
  CHECK_THROWS_AS(io::write_file_atomic("/nonexistent/dir/x.txt", "x"), InputError);
}

TEST_CASE("trace of the zero driving ends at 2i") {
  const Run r = run("trace --driving " + fixture("zero_driving.json") + " --steps 1000");
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("t,re,im\n", 0) == 0);
  const auto row = last_row(r.out);
  REQUIRE(row.size() == 3);
  CHECK(row[0] == doctest::Approx(1.0));
  CHECK(std::abs(row[1]) < 1e-9);
  CHECK(row[2] == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("trace of sqrt(2) sqrt(t) ends at the straight-slit tip") {
  const Run r = run("trace --driving " + fixture("sqrt2_driving.json"));
  REQUIRE(r.code == 0);
  const auto row = last_row(r.out);
  const Point tip = straight_tip(kPi / 3.0);
  CHECK(row[1] == doctest::Approx(tip.real()).epsilon(1e-4));
  CHECK(row[2] == doctest::Approx(tip.imag()).epsilon(1e-4));
}

TEST_CASE("doubling the steps never worsens the straight-slit tip") {
  const Point tip = straight_tip(kPi / 3.0);
  double previous = INFINITY;
  for (int steps : {50, 100, 200, 400}) {
    const Run r = run("trace --driving " + fixture("sqrt2_driving.json") + " --steps " + std::to_string(steps));
    REQUIRE(r.code == 0);
    const auto row = last_row(r.out);
    const double err = std::abs(Point(row[1], row[2]) - tip);
    CHECK(err <= previous + 1e-12);
    previous = err;
  }
}

TEST_CASE("trace writes csv and svg files") {
  const std::string csv = scratch("trace.csv");
  const std::string svg = scratch("trace.svg");
  const Run r = run("trace --system " + fixture("hitting3_system.json") + " --steps 200 --out " + csv + " --svg " + svg);
  REQUIRE(r.code == 0);
  CHECK(r.out.empty());
  CHECK(io::read_file(csv).rfind("t,re,im\n", 0) == 0);
  const std::string picture = io::read_file(svg);
  CHECK(picture.find("<svg") != std::string::npos);
  CHECK(picture.find("<polyline") != std::string::npos);
  CHECK(picture.find("<circle") != std::string::npos);
}

TEST_CASE("input errors exit with 2") {
  CHECK(run("trace --driving " + scratch("missing.json") + " 2>/dev/null").code == 2);
  const std::string bad = scratch("bad.json");
  io::write_file_atomic(bad, "{\"samples\": [[0, 0], [1,");
  CHECK(run("trace --driving " + bad + " 2>/dev/null").code == 2);
  CHECK(run("trace --steps 10 2>/dev/null").code == 2);
  CHECK(run("weld --system " + fixture("hitting3_system.json") + " --grid 64 2>/dev/null").code == 2);
  CHECK(run("hcap --slit " + fixture("segment.json") + " --method exact 2>/dev/null").code == 2);
  CHECK(run("steer --from 0 --to 1,2 2>/dev/null").code == 2);
  CHECK(run("nonsense 2>/dev/null").code == 2);
}

TEST_CASE("error json is machine readable") {
  const Run r = run("--error-json trace --driving " + scratch("missing.json") + " 2>&1 1>/dev/null");
  CHECK(r.code == 2);
  const Json j = io::parse(r.out);
  CHECK(j["kind"] == "InputError");
  CHECK(j["exit_code"] == 2);
  CHECK(j["message"].get<std::string>().find("missing.json") != std::string::npos);
}

TEST_CASE("coeffs on the mirror pair gives equal weights") {
  const Run r = run("coeffs --slits " + fixture("mirror_pair.json"));
  REQUIRE(r.code == 0);
  const Json j = io::parse(r.out);
  CHECK(j["schema_version"] == io::kSchemaVersion);
  REQUIRE(j["lambdas"].size() == 2);
  CHECK(j["lambdas"][0].get<double>() == doctest::Approx(0.5).epsilon(2e-4));
  CHECK(j["lambdas"][1].get<double>() == doctest::Approx(0.5).epsilon(2e-4));
  // The report is itself a system document.
  CHECK(io::system_from_json(j).size() == 2);
}

TEST_CASE("weld separates 3 sqrt(1 - t) from 5 sqrt(1 - t)") {
  const Json hitting = io::parse(run("weld --system " + fixture("hitting5_system.json")).out);
  CHECK(hitting["welded"] == false);
  const Json welded = io::parse(run("weld --system " + fixture("hitting3_system.json")).out);
  CHECK(welded["welded"] == true);
  CHECK(welded["pairs"].size() == 1);
}

TEST_CASE("monte carlo hcap is byte-identical for a fixed seed") {
  const std::string cmd = "hcap --slit " + fixture("segment.json") + " --method mc --seed 7 --walkers 20000";
  const Run a = run(cmd);
  const Run b = run(cmd);
  const Run single = run(cmd, "LOEWNER_THREADS=1");
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(single.out == a.out);
  CHECK(io::parse(a.out)["seed"] == 7);
  const Run other = run("hcap --slit " + fixture("segment.json") + " --method mc --seed 8 --walkers 20000");
  CHECK(other.out != a.out);
}

TEST_CASE("hcap methods agree on a polyline") {
  const auto value = [](const std::string& method) {
    return io::parse(run("hcap --slit " + fixture("segment.json") + " --method " + method).out)["hcap"].get<double>();
  };
  const double chain = value("chain");
  CHECK(value("moment") == doctest::Approx(chain).epsilon(1e-6));
  const Json mc = io::parse(run("hcap --slit " + fixture("segment.json") + " --method mc").out);
  CHECK(std::abs(mc["hcap"].get<double>() - chain) < 4.0 * mc["standard_error"].get<double>() + 1e-3);
  const Json h = io::parse(run("hcap --slit " + fixture("segment.json") + " --method hsiz").out);
  CHECK(h["hcap_lower"].get<double>() < chain);
  CHECK(chain <= h["hcap_upper"].get<double>());
}

TEST_CASE("saved configs replay to identical bytes") {
  const std::string config = scratch("hcap_config.json");
  const std::string first = scratch("hcap_first.json");
  const std::string second = scratch("hcap_second.json");
  REQUIRE(run("--save-config " + config + " hcap --slit " + fixture("segment.json") +
              " --method mc --seed 3 --walkers 5000 --out " + first)
              .code == 0);
  REQUIRE(run("run --config " + config + " --out " + second).code == 0);
  CHECK(io::read_file(first) == io::read_file(second));
  const Json saved = io::read_json(config);
  CHECK(saved["command"] == "hcap");
  CHECK(saved["params"]["seed"] == 3);
}

TEST_CASE("print-config records the defaults") {
  const Json all = io::parse(run("--print-config").out);
  CHECK(all["defaults"]["trace"]["steps"] == 4000);
  CHECK(all["defaults"]["drive"]["dcap"].get<double>() == 1e-3);
  CHECK(all["defaults"]["coeffs"]["tol"].get<double>() == 1e-4);
  CHECK(all["defaults"]["weld"]["grid"] == "64x64");
  const Json one = io::parse(run("--print-config drive --slit s.json").out);
  CHECK(one["command"] == "drive");
  CHECK(one["params"]["dcap"].get<double>() == 1e-3);
}

TEST_CASE("drive, diag and steer emit versioned reports") {
  const Json drive = io::parse(run("drive --slit " + fixture("segment.json")).out);
  CHECK(drive["schema_version"] == io::kSchemaVersion);
  CHECK(drive["hcap"].get<double>() == doctest::Approx(2.0 * drive["horizon"].get<double>()));
  CHECK(io::driving_from_json(drive["driving"]).horizon() == doctest::Approx(drive["horizon"].get<double>()));

  const Json diag = io::parse(run("diag --driving " + fixture("sqrt2_driving.json") + " --times 0.5,1").out);
  CHECK(diag["approach_angle"].get<double>() == doctest::Approx(kPi / 3.0).epsilon(1e-9));
  CHECK(diag["verdict"] == "regular");
  CHECK(diag["left"].size() == 2);

  // On the line Re z - U = -c Im z the backward flow gives
  // (Im z)^2 = 1 + 4t / (1 + c^2), so Im z = 2 at t = 1.5 for c = 1.
  const Json steer = io::parse(run("steer --from 0,1 --to 1,2").out);
  CHECK(steer["t_star"].get<double>() == doctest::Approx(1.5));
  CHECK(steer["slope"].get<double>() == doctest::Approx(1.0));
}
