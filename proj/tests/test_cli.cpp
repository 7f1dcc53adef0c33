#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "cdyn/cli.hpp"
#include "doctest.h"
#include "json.hpp"

using namespace cdyn;
using nlohmann::json;

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
  json report() const { return json::parse(out); }
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  Run r;
  r.code = run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "cdyn_test_cli";
  std::filesystem::create_directories(dir);
  return dir / name;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

std::vector<std::array<double, 3>> csv_rows(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  REQUIRE(line == "re,im,weight");
  std::vector<std::array<double, 3>> rows;
  while (std::getline(in, line)) {
    std::array<double, 3> r{};
    REQUIRE(std::sscanf(line.c_str(), "%lf,%lf,%lf", &r[0], &r[1], &r[2]) == 3);
    rows.push_back(r);
  }
  return rows;
}

std::complex<double> cx(const json& j) { return {j[0].get<double>(), j[1].get<double>()}; }

}  // namespace

TEST_CASE("classify reports orbits and the census") {
  SUBCASE("z^2 + 1/4 has a parabolic fixed point at 1/2") {
    const Run r = run({"classify", "-p", "0.25,0,1", "--period", "1"});
    REQUIRE(r.code == 0);
    const json j = r.report();
    REQUIRE(j["orbits"].size() == 1);
    CHECK(j["orbits"][0]["class"] == "RationallyNeutral(1)");
    CHECK(std::abs(cx(j["orbits"][0]["points"][0]) - 0.5) < 1e-6);
    CHECK(j["orbits"][0]["multiplicity"] == 2);
  }
  SUBCASE("z^2 - 1 has the superattracting cycle {0, -1}") {
    const json j = run({"classify", "-p", "-1,0,1", "--period", "2"}).report();
    int found = 0;
    for (const json& o : j["orbits"]) {
      if (o["period"] != 2) continue;
      ++found;
      CHECK(o["class"] == "Superattracting");
      double lo = 1e9, hi = -1e9;
      for (const json& z : o["points"]) {
        lo = std::min(lo, cx(z).real());
        hi = std::max(hi, cx(z).real());
      }
      CHECK(lo == doctest::Approx(-1.0).epsilon(1e-12));
      CHECK(std::abs(hi) < 1e-12);
    }
    CHECK(found == 1);
    CHECK(j["census"]["nonrepelling"].get<int>() <= j["census"]["bound"].get<int>());
  }
  SUBCASE("z^2: 0 superattracting, 1 repelling") {
    const Run r = run({"classify", "-p", "0,0,1", "--period", "1"});
    const json j = r.report();
    REQUIRE(j["orbits"].size() == 2);
    for (const json& o : j["orbits"]) {
      const auto z = cx(o["points"][0]);
      if (std::abs(z) < 1e-12)
        CHECK(o["class"] == "Superattracting");
      else
        CHECK(o["class"] == "Repelling");
    }
    CHECK(r.err.find("Superattracting") != std::string::npos);
  }
}

TEST_CASE("exit codes") {
  CHECK(run({"classify", "-p", "1,x"}).code == 2);
  CHECK(run({"classify", "--no-such-flag"}).code == 2);
  CHECK(run({}).code == 2);
  CHECK(run({"classify", "-p", "1,1"}).code == 2);
  CHECK(run({"julia", "-n", "30"}).code == 2);  // sampled without --seed
  CHECK(run({"measure", "lyubich", "-p", "-1,0,1", "--center", "3"}).code == 2);
  CHECK(run({"disc", "koebe", "--series", "0,2"}).code == 3);
  CHECK(run({"julia", "-p", "0,0,1", "-z", "0", "--samples", "5", "--seed", "1"}).code == 4);
  CHECK(run({"measure", "gap", "-x", "0", "-y", "2", "-n", "3"}).code == 4);
  CHECK(run({"linearize", "-p", "0,-1,1"}).code == 5);
  CHECK(run({"disc", "denjoy-wolff", "--map-poly", "0,0,2"}).code == 6);
  CHECK(run({"--help"}).code == 0);
  CHECK(run({"measure", "gap", "--help"}).code == 0);
}

TEST_CASE("julia point clouds") {
  SUBCASE("exact tree for z^2 lies on the unit circle") {
    const Run r = run({"julia", "-p", "0,0,1", "-n", "12", "--budget", "65536"});
    REQUIRE(r.code == 0);
    const auto rows = csv_rows(r.out);
    CHECK(rows.size() == 4096);
    double worst = 0.0, mass = 0.0;
    for (const auto& row : rows) {
      worst = std::max(worst, std::abs(std::hypot(row[0], row[1]) - 1.0));
      mass += row[2];
    }
    CHECK(worst < 1e-6);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("sampled cloud for z^2 - 2 lies on [-2, 2]") {
    const Run r = run({"julia", "-p", "-2,0,1", "-n", "14", "--samples", "10000", "--seed", "7"});
    REQUIRE(r.code == 0);
    const auto rows = csv_rows(r.out);
    CHECK(rows.size() == 10000);
    double worst = 0.0;
    for (const auto& row : rows) {
      const double off_axis = std::abs(row[1]);
      const double outside = std::max(0.0, std::abs(row[0]) - 2.0);
      worst = std::max(worst, std::max(off_axis, outside));
    }
    CHECK(worst < 1e-4);
  }
  SUBCASE("byte-identical reruns; exact mode ignores the task count") {
    const std::vector<std::string> sampled{"julia", "-p", "-2,0,1", "-n", "14", "--samples", "3000",
                                           "--seed", "7", "--tasks", "3"};
    CHECK(run(sampled).out == run(sampled).out);
    const Run a = run({"julia", "-p", "-1,0,1", "-n", "10", "--tasks", "1"});
    const Run b = run({"julia", "-p", "-1,0,1", "-n", "10", "--tasks", "4"});
    CHECK(a.out == b.out);
  }
  SUBCASE("report and raster files") {
    const auto csv = scratch("cloud.csv"), rep = scratch("cloud.json"), pgm = scratch("cloud.pgm");
    const Run r = run({"julia", "-p", "0,0,1", "-n", "8", "--out", csv.string(), "--report", rep.string(),
                       "--pgm", pgm.string(), "--width", "40", "--height", "30", "--bbox", "-1.5,1.5,-1.5,1.5"});
    REQUIRE(r.code == 0);
    CHECK(r.out.empty());
    CHECK(csv_rows(slurp(csv)).size() == 256);
    CHECK(json::parse(slurp(rep))["points"] == 256);
    const std::string img = slurp(pgm);
    const std::string header = "P5\n40 30\n255\n";
    REQUIRE(img.substr(0, header.size()) == header);
    CHECK(img.size() == header.size() + 40 * 30);
    // Circle |z| = 1 inside the box: the centre pixel is empty, some pixel is at full scale.
    CHECK(static_cast<unsigned char>(img[header.size() + 15 * 40 + 20]) == 0);
    CHECK(img.find(static_cast<char>(255), header.size()) != std::string::npos);
  }
}

TEST_CASE("measure subcommands") {
  SUBCASE("gap for z^2 at depth 12") {
    const Run r = run({"measure", "gap", "-p", "0,0,1", "-x", "2", "-y", "3", "-n", "12"});
    REQUIRE(r.code == 0);
    const json j = r.report();
    CHECK(j["per_n"].back()["value"].get<double>() < 0.02);
    CHECK(j["panel"].size() == 6);
  }
  SUBCASE("gap decays across depths") {
    const json j = run({"measure", "gap", "-n", "10", "--nmin", "4"}).report();
    REQUIRE(j["per_n"].size() == 7);
    CHECK(j["per_n"].back()["value"].get<double>() < j["per_n"].front()["value"].get<double>());
    CHECK(j["fitted"]["log_gap_slope"].get<double>() < 0.0);
  }
  SUBCASE("cesaro mass gap") {
    const Run r = run({"measure", "cesaro-massgap", "-n", "4"});
    REQUIRE(r.code == 0);
    const json j = r.report();
    CHECK(j["fitted"]["bound"].get<double>() == doctest::Approx(0.4));
    CHECK(j["fitted"]["observed"].get<double>() <= 0.4 + 1e-9);
  }
  SUBCASE("cesaro writes the averaged measure") {
    const auto csv = scratch("cesaro.csv");
    const Run r = run({"measure", "cesaro", "-p", "-1,0,1", "-n", "5", "--out", csv.string()});
    REQUIRE(r.code == 0);
    double mass = 0.0;
    for (const auto& row : csv_rows(slurp(csv))) mass += row[2];
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("mixing and duality") {
    const json m = run({"measure", "mixing", "-n", "12"}).report();
    CHECK(m["fitted"]["max_abs_correlation"].get<double>() < 0.02);
    const Run d = run({"measure", "duality", "-p", "1,2i,0.5,1", "--atoms", "0.3,1-i,5"});
    REQUIRE(d.code == 0);
    CHECK(d.report()["fitted"]["max_residual"].get<double>() < 1e-8);
  }
  SUBCASE("lyubich report is seeded and deterministic") {
    const std::vector<std::string> args{"measure", "lyubich", "-p", "-1,0,1", "--center", "3",
                                        "--nmax", "6", "--branches", "200", "--seed", "1"};
    const Run a = run(args);
    REQUIRE(a.code == 0);
    CHECK(a.out == run(args).out);
    CHECK(a.report()["per_n"].size() == 7);
  }
}

TEST_CASE("linearize") {
  SUBCASE("Koenigs series of 0.5 z + z^2") {
    const Run r = run({"linearize", "-p", "0,0.5,1"});
    REQUIRE(r.code == 0);
    const json j = r.report()["linearization"];
    CHECK(j["mode"] == "koenigs");
    CHECK(std::abs(cx(j["coefficients"][1]) - 1.0) < 1e-12);
    CHECK(std::abs(cx(j["coefficients"][2]) - 4.0) < 1e-10);
  }
  SUBCASE("series CSV via --out") {
    const auto csv = scratch("koenigs.csv");
    REQUIRE(run({"linearize", "-p", "0,0.5,1", "-N", "5", "--out", csv.string()}).code == 0);
    const std::string text = slurp(csv);
    CHECK(text.rfind("k,re,im\n", 0) == 0);
    CHECK(text.find("\n2,4,0\n") != std::string::npos);
  }
  SUBCASE("Boettcher and parabolic regimes") {
    CHECK(run({"linearize", "-p", "0,0,1", "--z0", "0"}).report()["linearization"]["mode"] == "boettcher");
    const json p = run({"linearize", "-p", "0,1,1"}).report()["linearization"];
    CHECK(p["mode"] == "parabolic");
    CHECK(p["boundary_inside"] == true);
  }
  SUBCASE("golden Siegel quadratic") {
    const json j = run({"linearize", "--siegel", "golden", "-p", "quad", "-N", "40"}).report()["linearization"];
    CHECK(j["mode"] == "siegel");
    CHECK(j["residual"].get<double>() < 1e-6);
    CHECK(j["residual_radius"].get<double>() == 0.01);
    CHECK(j["denominators"].size() == 39);
  }
  SUBCASE("Cremer and Diophantine subchecks") {
    const json c = run({"linearize", "--cremer", "2,4"}).report();
    CHECK(!c.contains("linearization"));
    CHECK(c["cremer"]["terms"][0]["distance"].get<double>() <= std::numbers::pi);
    CHECK(c["cremer"]["certified"] == true);
    const json d = run({"linearize", "--diophantine", "0.3,2,1000"}).report();
    CHECK(d["diophantine"]["pass"] == true);
  }
}

TEST_CASE("disc checks") {
  const json dw = run({"disc", "denjoy-wolff", "--mobius", "0.5"}).report();
  CHECK(dw["statistic"]["kind"] == "BoundaryPoint");
  CHECK(std::abs(cx(dw["statistic"]["alpha"]) - 1.0) < 1e-6);

  const json area = run({"disc", "area", "--tail", "0,1"}).report();
  CHECK(area["statistic"]["sum"].get<double>() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(area["pass"] == true);

  const json koebe = run({"disc", "koebe", "--series", "koebe-function", "-N", "30"}).report();
  CHECK(std::abs(cx(koebe["statistic"]["a2"]) - 2.0) < 1e-12);
  CHECK(koebe["pass"] == true);

  const Run sp = run({"disc", "schwarz-pick", "--blaschke", "0.3,0.5i", "--seed", "3"});
  REQUIRE(sp.code == 0);
  CHECK(sp.report()["statistic"]["max_ratio"].get<double>() <= 1.0 + 1e-10);
  CHECK(run({"disc", "schwarz-pick", "--mobius", "0.4"}).code == 2);
  CHECK(run({"disc", "area"}).code == 2);
}

TEST_CASE("config files") {
  const auto cfg = scratch("classify.cfg");
  {
    std::ofstream f(cfg);
    f << "# defaults\n\np = -1,0,1\nperiod=2\n";
  }
  const json base = run({"classify", "--config", cfg.string()}).report();
  CHECK(base["polynomial"] == "-1,0,1");
  CHECK(base["period"] == 2);
  const json over = run({"classify", "--config", cfg.string(), "--period", "1"}).report();
  CHECK(over["period"] == 1);
  CHECK(over["polynomial"] == "-1,0,1");

  const auto expanded = expand_config({"measure", "gap", "--config=" + cfg.string(), "-n", "3"});
  const std::vector<std::string> want{"measure", "gap", "-p-1,0,1", "--period=2", "-n", "3"};
  CHECK(expanded == want);
  CHECK(run({"classify", "--config", scratch("missing.cfg").string()}).code == 2);
}
