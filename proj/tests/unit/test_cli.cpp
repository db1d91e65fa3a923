#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "zonalstab/cli.hpp"
#include "zonalstab/operators.hpp"
#include "zonalstab/svg_plot.hpp"

namespace fs = std::filesystem;
using namespace zonal;

namespace {

int run(std::vector<std::string> args) {
  args.insert(args.begin(), "zonalstab");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return cli::run(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("zonalstab_cli_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("matrix export and manifest") {
  TempDir d;
  REQUIRE(run({"matrix", "--model", "p3", "--k", "1", "--n", "6", "--omega", "0.5", "-o", d / "m.txt"}) == 0);
  std::ostringstream want;
  ops::write_matrix_text(want, ops::sector_operator(ops::legendre_model(3, 0.5), 1, 6).entries);
  CHECK(slurp(d / "m.txt") == want.str());
  const auto man = nlohmann::json::parse(slurp(d / "m.txt.manifest.json"));
  CHECK(man["tool"] == "zonalstab");
  CHECK(man["version"] == ZONALSTAB_VERSION);
  CHECK(man["command"] == "matrix");
  CHECK(man["parameters"]["alpha"] == 1.0);
  CHECK(man["parameters"]["n"] == 6);
}

TEST_CASE("exit codes") {
  TempDir d;
  CHECK(run({"sweep", "--model", "p7", "--omega", "0:1:0.5", "-o", d / "x.csv"}) == cli::kConfigError);
  CHECK(run({"sweep", "--model", "p3"}) == cli::kConfigError);
  CHECK(run({"sweep", "--model", "p3", "--omega", "1:0:0.5", "-o", d / "x.csv"}) == cli::kConfigError);
  CHECK(run({"frobnicate"}) == cli::kConfigError);
  CHECK(run({"matrix", "--model", "zonal", "-o", d / "x.txt"}) == cli::kConfigError);
  CHECK(run({"geometry", "--profile", d / "missing.csv", "-o", d / "g.csv"}) == cli::kIoError);
  CHECK(run({"matrix", "--model", "p2", "-o", d / "no/such/dir/m.txt"}) == cli::kIoError);
  CHECK(run({"evolve", "--fixture", d / "missing.txt", "-o", d / "e.csv"}) == cli::kIoError);
}

TEST_CASE("sweep on the P2 model is identically real") {
  TempDir d;
  REQUIRE(run({"sweep", "--model", "p2", "--k", "1", "--n", "200", "--omega", "0:6:0.5", "-o", d / "s.csv", "--svg",
               d / "s.svg"}) == 0);
  std::istringstream csv(slurp(d / "s.csv"));
  std::string line;
  std::getline(csv, line);
  CHECK(line.rfind("Omega,max_imag,unstable_count", 0) == 0);
  int rows = 0;
  while (std::getline(csv, line)) {
    ++rows;
    const auto a = line.find(',');
    const auto b = line.find(',', a + 1);
    CHECK(line.substr(a + 1, b - a - 1) == "0");
  }
  CHECK(rows == 13);
  CHECK(slurp(d / "s.svg").rfind("<svg", 0) == 0);
}

TEST_CASE("criteria and geometry commands") {
  TempDir d;
  REQUIRE(run({"criteria", "--model", "p2", "--k", "1", "--omega", "7", "-o", d / "c.json"}) == 0);
  const auto c = nlohmann::json::parse(slurp(d / "c.json"));
  CHECK(c["rayleigh"] == false);
  CHECK(c["fjortoft"] == false);
  CHECK(c["arnold_stable"] == true);
  // B = 7 + 6 x3 keeps one sign, which the guard certifies
  CHECK(c["guard"]["clause"] == "no_sign_change");

  REQUIRE(run({"geometry", "--ellipsoid", "1", "--grid", "11", "-o", d / "g.csv"}) == 0);
  std::istringstream g(slurp(d / "g.csv"));
  std::string line;
  std::getline(g, line);
  CHECK(line == "x3,chi,xi,chi_prime,xi_prime");
  int rows = 0;
  while (std::getline(g, line)) {
    ++rows;
    double x = 0, chi = 0;
    char comma = 0;
    std::istringstream ls(line);
    ls >> x >> comma >> chi;
    CHECK(std::abs(chi - x) < 1e-12);
  }
  CHECK(rows == 11);
}

TEST_CASE("config file, flags win") {
  TempDir d;
  {
    std::ofstream cfg(d / "run.toml");
    cfg << "[matrix]\nmodel = \"p4\"\nk = 2\nn = 5\nomega = 1.5\n";
  }
  REQUIRE(run({"--config", d / "run.toml", "matrix", "--n", "4", "-o", d / "m.txt"}) == 0);
  std::ostringstream want;
  ops::write_matrix_text(want, ops::sector_operator(ops::legendre_model(4, 1.5), 2, 4).entries);
  CHECK(slurp(d / "m.txt") == want.str());
}

TEST_CASE("dynamics commands on a small fixture") {
  TempDir d;
  {
    std::ofstream fx(d / "fx.txt");
    fx << "L=8\ndt=1e-3\nT=0.05\nsample_every=5\nomegas=16,32\n2,1,0.5,0\n3,2,0.25,0\n";
  }
  REQUIRE(run({"evolve", "--fixture", d / "fx.txt", "--omega", "10", "-o", d / "e.csv"}) == 0);
  std::istringstream e(slurp(d / "e.csv"));
  std::string line;
  int rows = 0;
  while (std::getline(e, line)) ++rows;
  CHECK(rows == 12);
  REQUIRE(run({"timeavg", "--fixture", d / "fx.txt", "-o", d / "t.csv"}) == 0);
  CHECK(slurp(d / "t.csv").rfind("Omega,weak_norm\n16,", 0) == 0);
  const auto man = nlohmann::json::parse(slurp(d / "t.csv.manifest.json"));
  CHECK(man["results"]["slope"].is_number());
  CHECK(man["parameters"]["omegas"].size() == 2);
}

TEST_CASE("repeated runs are byte-identical") {
  TempDir d;
  for (const char* tag : {"a", "b"}) {
    REQUIRE(run({"sweep", "--model", "p4", "--k", "1", "--n", "60", "--omega", "0:1:0.25", "--threads", "3", "-o",
                 d / (std::string(tag) + ".csv")}) == 0);
  }
  CHECK(slurp(d / "a.csv") == slurp(d / "b.csv"));
}

TEST_CASE("svg rendering") {
  plot::PlotOptions po;
  po.title = "a < b";
  po.logy = true;
  const std::string s = plot::render_svg({{"curve", {1, 2, 3, 4}, {1.0, 0.0, 0.1, 0.01}}}, po);
  CHECK(s.rfind("<svg", 0) == 0);
  CHECK(s.find("a &lt; b") != std::string::npos);
  // the zero breaks the polyline on a log axis
  std::size_t count = 0;
  for (std::size_t p = s.find("<polyline"); p != std::string::npos; p = s.find("<polyline", p + 1)) ++count;
  CHECK(count == 2);
  CHECK(s.find("nan") == std::string::npos);
}
