#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fixtures.hpp"
#include "mmc/cli.hpp"

using mmc::io::json;

namespace {

struct Result {
  int status;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int status = mmc::cli::run(args, out, err);
  return {status, out.str(), err.str()};
}

std::string temp_file(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / ("mmcantor_test_" + name);
  std::ofstream(path) << text;
  return path.string();
}

const std::string mt = fixtures::path("middle_third");
const std::string fm = fixtures::path("figure_matrix");

}  // namespace

TEST_CASE("dim prints the dimension and bracket") {
  const auto r = run({"dim", mt});
  CHECK(r.status == 0);
  CHECK(r.out.find("d* = 0.6309297535") == 0);
  CHECK(r.out.find("bracket = [") != std::string::npos);
}

TEST_CASE("validation failure exits 1 with JSON on stderr") {
  const auto r = run({"validate", fixtures::path("bad_single_clone")});
  CHECK(r.status == 1);
  CHECK(r.out.find("model 2 has < 2 clones") != std::string::npos);
  const auto e = json::parse(r.err);
  CHECK(e["error"] == "validation");
}

TEST_CASE("parse errors carry positions") {
  const auto broken = temp_file("broken.json", "{\n  \"models\": [\n    {\"id\": 1,,}\n  ]\n}\n");
  const auto r = run({"validate", broken});
  CHECK(r.status == 1);
  const auto e = json::parse(r.err);
  CHECK(e["message"].get<std::string>().find(":3:") != std::string::npos);

  const auto schema = temp_file(
      "schema.json",
      R"({"models": [{"id": 1}], "clones": [{"id": 1, "container": 1, "target": 1, "inverse_scale": true}]})");
  const auto s = run({"dim", schema});
  CHECK(s.status == 1);
  CHECK(json::parse(s.err)["message"].get<std::string>().find("/clones/0/inverse_scale") != std::string::npos);
}

TEST_CASE("computational failures exit 2") {
  const auto r = run({"dim", fixtures::path("figure_reducible")});
  CHECK(r.status == 2);
  CHECK(json::parse(r.err)["error"] == "compute");
}

TEST_CASE("usage errors exit 1") {
  CHECK(run({}).status == 1);
  CHECK(run({"frobnicate"}).status == 1);
  CHECK(run({"dim", mt, "--tol", "-1"}).status == 1);
  CHECK(run({"invariant", mt, "--L", "9"}).status == 1);
  CHECK(run({"separation", mt, "--level", "30"}).status == 1);
  CHECK(run({"--help"}).status == 0);
}

TEST_CASE("outputs are deterministic") {
  const std::vector<std::vector<std::string>> commands{
      {"validate", fm},
      {"matrix", fm, "--json", "--exact"},
      {"dim", fm, "--curve", "0:1.2:12"},
      {"measure", fm, "--json"},
      {"subdivide", fm, "--k", "4"},
      {"subdivide", fm, "--k", "3", "--exact"},
      {"separation", fm, "--level", "8", "--json"},
      {"boxdim", mt, "--level", "9"},
      {"render", mt, "--levels", "2"},
      {"invariant", fm, "--L", "4", "--S", "2"},
      {"compare", mt, fixtures::path("moran_fifth")},
      {"massratio", mt, "--level", "2"},
      {"oracle", "enumerate", fm, "--k", "3"},
  };
  for (const auto& c : commands) {
    const auto a = run(c), b = run(c);
    CHECK(a.status == 0);
    CHECK(a.out == b.out);
    CHECK(!a.out.empty());
  }
}

TEST_CASE("matrix JSON round trip") {
  const auto first = run({"matrix", fm, "--d", "0.6", "--json"});
  REQUIRE(first.status == 0);
  const auto a = json::parse(first.out);
  const auto dump = temp_file("matrix.json", first.out);
  const auto second = run({"matrix", dump, "--json"});
  REQUIRE(second.status == 0);
  const auto b = json::parse(second.out);
  CHECK(std::abs(a["eigenvalue"].get<double>() - b["eigenvalue"].get<double>()) <= 1e-12);
  for (const char* key : {"right", "left"}) {
    for (std::size_t i = 0; i < 2; ++i) {
      CHECK(std::abs(a[key][i].get<double>() - b[key][i].get<double>()) <= 1e-12);
    }
  }
  CHECK(a["entries"] == b["entries"]);
}

TEST_CASE("compare prints a verdict line then JSON") {
  const auto r = run({"compare", mt, mt, "--L", "6", "--S", "3"});
  CHECK(r.status == 0);
  const auto nl = r.out.find('\n');
  CHECK(r.out.substr(0, nl) == "CONSISTENT_WITH_SIMILAR");
  CHECK(json::parse(r.out.substr(nl + 1))["verdict"] == "CONSISTENT_WITH_SIMILAR");
  CHECK(run({"compare", mt, fixtures::path("moran_fifth")}).out.find("INCOMPARABLE") == 0);
}

TEST_CASE("invariant emits a JSON array") {
  const auto r = run({"invariant", mt, "--L", "2", "--S", "1"});
  const auto values = json::parse(r.out);
  REQUIRE(values.size() == 3);
  CHECK(values[0].get<double>() == doctest::Approx(0.25));
}

TEST_CASE("render writes an SVG file") {
  const auto path = (std::filesystem::temp_directory_path() / "mmcantor_test_render.svg").string();
  const auto r = run({"render", fixtures::path("planar_multi"), "--levels", "3", "--out", path});
  CHECK(r.status == 0);
  std::ifstream f(path);
  std::stringstream buf;
  buf << f.rdbuf();
  CHECK(buf.str().find("<svg") != std::string::npos);
}

TEST_CASE("curve CSV") {
  const auto path = (std::filesystem::temp_directory_path() / "mmcantor_test_curve.csv").string();
  CHECK(run({"dim", mt, "--curve", "0:1:4", "--out", path}).status == 0);
  std::ifstream f(path);
  std::string header, first;
  std::getline(f, header);
  std::getline(f, first);
  CHECK(header == "d,lambda");
  CHECK(first == "0,2");
}

TEST_CASE("mass ratio pairs file") {
  const auto pairs = temp_file("pairs.json", "[[[1], [2, 1]], [[2], [2, 2]]]");
  const auto r = run({"massratio", mt, mt, "--pairs", pairs, "--json"});
  REQUIRE(r.status == 0);
  const auto j = json::parse(r.out);
  CHECK(j["pairs"][0]["mass_ratio"].get<double>() == doctest::Approx(0.5));
  CHECK(j["spectrum"].is_null());
}

TEST_CASE("oracle subcommand") {
  const auto r = run({"oracle", "moran", "1/3", "1/3", "--json"});
  CHECK(json::parse(r.out)["value"].get<double>() == doctest::Approx(0.6309297535714574).epsilon(1e-12));
  const auto e = run({"oracle", "enumerate", mt, "--k", "3", "--exact"});
  CHECK(e.out.find("8*(1/27)^d") != std::string::npos);
}
