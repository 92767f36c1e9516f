#include <doctest.h>

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli.hpp"

using namespace oscmirror;
namespace fs = std::filesystem;

namespace {

const fs::path kSource = OSCMIRROR_SOURCE_DIR;
const std::string kBaseline = (kSource / "configs" / "fig2.json").string();

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> v;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) v.push_back(l);
  return v;
}

struct Scratch {
  fs::path dir;
  Scratch() {
    dir = fs::temp_directory_path() / ("oscmirror_cli_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
  std::string operator/(const std::string& name) const { return (dir / name).string(); }
};

// First line on stderr that is an error, without its trailing newline.
std::string error_line(const std::string& err) {
  for (const auto& l : lines(err)) {
    if (l.starts_with("error:")) return l;
  }
  return "";
}

}  // namespace

TEST_CASE("rate command matches the golden file") {
  Scratch tmp;
  const auto r = invoke({"rate", "--config", kBaseline, "--t-end", "1e-6", "--n", "1000", "--out",
                         tmp / "rate.csv"});
  REQUIRE(r.code == cli::kOk);
  const std::string csv = slurp(tmp / "rate.csv");
  const auto rows = lines(csv);
  CHECK(rows.size() == 1001);
  CHECK(rows.front() == "t_s,gamma_over_a21");
  CHECK(csv == slurp(kSource / "tests" / "golden" / "rate_fig2.csv"));

  const auto meta = nlohmann::json::parse(slurp(tmp / "rate.csv.meta.json"));
  CHECK(meta["command"] == "rate");
  CHECK(meta["inputs_hash"].get<std::string>().size() == 16);
  CHECK_FALSE(meta.contains("timestamp"));
}

TEST_CASE("outputs are byte-deterministic") {
  Scratch tmp;
  const std::vector<std::string> a = {"spectrum", "--config", kBaseline, "--t", "1e-6", "--n", "2001",
                                      "--workers", "1", "--out", tmp / "a.csv"};
  const std::vector<std::string> b = {"spectrum", "--config", kBaseline, "--t", "1e-6", "--n", "2001",
                                      "--workers", "3", "--out", tmp / "b.csv"};
  REQUIRE(invoke(a).code == 0);
  REQUIRE(invoke(b).code == 0);
  CHECK(slurp(tmp / "a.csv") == slurp(tmp / "b.csv"));
  CHECK(slurp(tmp / "a.csv.meta.json") == slurp(tmp / "b.csv.meta.json"));
}

TEST_CASE("exit codes") {
  Scratch tmp;
  auto missing = invoke({"rate", "--config", "missing.json", "--t-end", "1e-6"});
  CHECK(missing.code == cli::kUsage);
  CHECK(error_line(missing.err).starts_with("error:config:"));

  CHECK(invoke({"--config", "missing.json"}).code == cli::kUsage);
  CHECK(invoke({}).code == cli::kUsage);
  CHECK(invoke({"bogus"}).code == cli::kUsage);
  CHECK(invoke({"rate", "--config", kBaseline}).code == cli::kUsage);  // no --t-end
  CHECK(invoke({"rate", "--config", kBaseline, "--t-end", "1e-6", "--order", "third"}).code ==
        cli::kUsage);
  CHECK(invoke({"spectrum", "--config", kBaseline}).code == cli::kUsage);  // no --t
  CHECK(invoke({"spectrum", "--config", kBaseline, "--t", "1e-6", "--linewidth", "0"}).code ==
        cli::kUsage);

  std::ofstream(tmp / "bad.json") << R"({"omega0_rad_per_s": 1e15, "omega_p_rad_per_s": 1.5e8,
                                          "amplitude_m": 2e-7, "z0_m": -1e-6})";
  const auto bad = invoke({"rate", "--config", tmp / "bad.json", "--t-end", "1e-6"});
  CHECK(bad.code == cli::kUsage);
  CHECK(error_line(bad.err).find("z0_m") != std::string::npos);

  const auto io = invoke({"rate", "--config", kBaseline, "--t-end", "1e-6", "--out",
                          tmp / "no/such/dir/rate.csv"});
  CHECK(io.code == cli::kIo);
  CHECK(error_line(io.err).starts_with("error:io:"));

  const auto failing = invoke({"validate", "--config", kBaseline, "--nodes", "1"});
  CHECK(failing.code == cli::kValidationFailed);
  CHECK(error_line(failing.err).starts_with("error:validation:"));

  CHECK(invoke({"--help"}).code == cli::kOk);
}

TEST_CASE("every error is a single machine-readable line") {
  const auto r = invoke({"rate", "--config", "missing.json", "--t-end", "1e-6"});
  std::size_t errors = 0;
  for (const auto& l : lines(r.err)) errors += l.starts_with("error:") ? 1 : 0;
  CHECK(errors == 1);
}

TEST_CASE("validate passes at baseline parameters") {
  Scratch tmp;
  const auto r = invoke({"validate", "--config", kBaseline, "--out", tmp / "v.json"});
  CHECK(r.code == cli::kOk);
  const auto report = nlohmann::json::parse(slurp(tmp / "v.json"));
  REQUIRE(report.is_array());
  CHECK(report.size() >= 50);
  for (const auto& item : report) {
    CAPTURE(item["name"].get<std::string>());
    CHECK(item["pass"].get<bool>());
    for (const char* key : {"closed_form", "quadrature", "abs_error", "rel_error", "tolerance", "nodes"}) {
      CHECK(item.contains(key));
    }
  }
}

TEST_CASE("spectrum csv shape") {
  Scratch tmp;
  const auto r = invoke({"spectrum", "--config", kBaseline, "--t", "1e-6", "--n", "3",
                         "--delta-min", "-1e8", "--delta-max", "1e8", "--out", tmp / "s.csv"});
  REQUIRE(r.code == 0);
  const auto rows = lines(slurp(tmp / "s.csv"));
  REQUIRE(rows.size() == 4);
  CHECK(rows[0] == "delta_rad_per_s,p_static,p_dynamic,p_total");
  CHECK(rows[2].starts_with("0.00000000e+00,"));
  // Resolvability goes to stdout when the data goes to a file.
  const auto rep = nlohmann::json::parse(r.out);
  CHECK(rep["resolvable"].get<bool>());
  CHECK(rep["linewidth"].get<double>() == 1.0);
}

TEST_CASE("peak rows appear in the envelope csv") {
  Scratch tmp;
  REQUIRE(invoke({"spectrum", "--config", kBaseline, "--t", "1e-6", "--envelope", "--out",
                  tmp / "env.csv"}).code == 0);
  REQUIRE(invoke({"peaks", "--config", kBaseline, "--t", "1e-6", "--out", tmp / "p.json"}).code == 0);
  const auto peaks = nlohmann::json::parse(slurp(tmp / "p.json"));
  REQUIRE(peaks.size() >= 3);
  const std::string csv = slurp(tmp / "env.csv");
  for (const auto& pk : peaks) {
    const std::string row_prefix = cli::format_value(pk["offset"].get<double>()) + ",";
    const std::string height = "," + cli::format_value(pk["height"].get<double>()) + "\n";
    bool found = false;
    for (const auto& l : lines(csv)) {
      if (l.starts_with(row_prefix) && (l + "\n").ends_with(height)) found = true;
    }
    CAPTURE(row_prefix);
    CHECK(found);
  }
  std::vector<std::string> classes;
  for (const auto& pk : peaks) classes.push_back(pk["class"]);
  CHECK(std::find(classes.begin(), classes.end(), "central") != classes.end());
  CHECK(std::find(classes.begin(), classes.end(), "plus_wp") != classes.end());
  CHECK(std::find(classes.begin(), classes.end(), "minus_wp") != classes.end());
}

TEST_CASE("surface and sweep") {
  Scratch tmp;
  REQUIRE(invoke({"surface", "--config", kBaseline, "--t-start", "1e-7", "--t-end", "1e-6", "--n",
                  "4", "--n-delta", "11", "--out", tmp / "surf.csv"}).code == 0);
  const auto rows = lines(slurp(tmp / "surf.csv"));
  CHECK(rows.size() == 45);
  CHECK(rows[0] == "t_s,delta_rad_per_s,p_total");

  const auto r = invoke({"sweep", "--config", kBaseline, "--param", "omega_p", "--from", "1.5e8",
                         "--to", "1.5e9", "--steps", "3", "--scale", "geom", "--quantity",
                         "peaks", "--t", "1e-6", "--out-dir", tmp / "sw"});
  REQUIRE(r.code == 0);
  const auto index = nlohmann::json::parse(slurp(fs::path(tmp / "sw") / "index.json"));
  REQUIRE(index["points"].size() == 3);
  CHECK(index["points"][0]["value"].get<double>() == 1.5e8);
  CHECK(index["points"][2]["value"].get<double>() == 1.5e9);
  CHECK(index["points"][1]["value"].get<double>() == doctest::Approx(std::sqrt(1.5e8 * 1.5e9)));
  for (const auto& pt : index["points"]) {
    CHECK(fs::exists(fs::path(tmp / "sw") / pt["file"].get<std::string>()));
  }

  CHECK(invoke({"sweep", "--config", kBaseline, "--param", "colour", "--from", "1", "--to", "2",
                "--steps", "2", "--out-dir", tmp / "x"}).code == cli::kUsage);
  CHECK(invoke({"sweep", "--config", kBaseline, "--param", "amplitude", "--from", "1e-7", "--to",
                "2e-6", "--steps", "2", "--quantity", "rate", "--t-end", "1e-6", "--out-dir",
                tmp / "y"}).code == cli::kUsage);  // amplitude reaches z0
}

TEST_CASE("resolvability") {
  PhysicalParams p;
  p.omega_p = 2 * std::numbers::pi * 1e9;
  const auto r = cli::resolvability(p, 1e8);
  CHECK(r.resolvable);
  CHECK(r.margin == doctest::Approx(62.83).epsilon(1e-3));
  p.omega_p = 1e8;
  const auto edge = cli::resolvability(p, 1e8);
  CHECK_FALSE(edge.resolvable);
  CHECK(edge.margin == 1.0);
  CHECK_THROWS(cli::resolvability(p, 0.0));
}

TEST_CASE("emit_spectrum") {
  Scratch tmp;
  SpectrumSeries s;
  s.detunings = {-1.0, 0.0, 1.0};
  s.p_static = {1.0, 2.0, 1.0};
  s.p_dynamic = {0.0, 0.5, 0.0};
  s.p_total = {1.0, 2.5, 1.0};
  cli::emit_spectrum(s, tmp / "e.csv");
  CHECK(lines(slurp(tmp / "e.csv")).size() == 4);
  CHECK_THROWS_AS(cli::emit_spectrum(s, tmp / "missing/e.csv"), cli::IoError);
  CHECK(cli::format_value(1.0 / 3.0) == "3.33333333e-01");
  CHECK(cli::fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(cli::fnv1a("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("validate passes for every preset") {
  for (const char* name : {"fig2.json", "fig3.json", "rydberg.json"}) {
    CAPTURE(name);
    const auto r = invoke({"validate", "--config", (kSource / "configs" / name).string()});
    CHECK(r.code == cli::kOk);
    CHECK(error_line(r.err).empty());
  }
}
