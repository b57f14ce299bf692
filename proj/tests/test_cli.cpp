#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "surfgrow/cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

/* unique scratch directory, removed on scope exit */
struct TempDir {
  fs::path path;
  TempDir() {
    static std::atomic<int> counter{0};
    path = fs::temp_directory_path() /
           ("surfgrow_cli_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter.fetch_add(1)));
    fs::remove_all(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string str() const { return path.string(); }
  fs::path operator/(const char* name) const { return path / name; }
};

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json LoadJson(const fs::path& p) { return json::parse(Slurp(p)); }

int Run(std::vector<std::string> args) { return surfgrow::cli::run(args); }

}  // namespace

TEST_CASE("cli: verify suite passes end to end") {
  TempDir d;
  CHECK(Run({"verify", "--out", d.str()}) == 0);
  const json rep = LoadJson(d / "verify.json");
  CHECK(rep["failures"].get<int>() == 0);
  CHECK(rep["checks"].size() >= 15);
  for (const json& c : rep["checks"]) CHECK(c["pass"].get<bool>());
  CHECK_FALSE(fs::exists(d / "failure.txt"));
  CHECK(fs::exists(d / "config_resolved.txt"));

  CHECK(Run({"verify", "--suite", "nonsense", "--out", d.str()}) == 1);
}

TEST_CASE("cli: simulate writes the full artifact set") {
  TempDir d;
  CHECK(Run({"simulate", "--preset", "cos1", "--K", "16", "--T", "0.01",
             "--dt", "1e-4", "--fixed-dt", "--out", d.str()}) == 0);
  for (const char* name : {"trajectory.csv", "summary.json",
                           "initial_state.snap", "final_state.snap",
                           "config_resolved.txt"})
    CHECK(fs::exists(d / name));

  const json s = LoadJson(d / "summary.json");
  CHECK(s["command"] == "simulate");
  CHECK(s["K"].get<int>() == 16);
  CHECK(s["termination"] == "completed");
  CHECK(s["accepted_steps"].get<int>() == 100);
  CHECK(s["final"]["t"].get<double>() == doctest::Approx(0.01));
  CHECK(std::abs(s["energy_residual"].get<double>()) < 1e-6);
  // the final norm must have decayed from |cos|_2 = sqrt(1/2)
  CHECK(s["final"]["h2"].get<double>() < std::sqrt(0.5));

  const std::string csv = Slurp(d / "trajectory.csv");
  CHECK(csv.rfind("t,", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 102);  // header + 101 rows
}

TEST_CASE("cli: identical arguments give byte-identical artifacts") {
  TempDir d1, d2;
  const std::vector<std::string> base = {"simulate", "--preset", "cos12",
                                         "--K",      "16",       "--T",
                                         "0.005",    "--dt",     "1e-4"};
  auto with_out = [&](const TempDir& d) {
    std::vector<std::string> a = base;
    a.push_back("--out");
    a.push_back(d.str());
    return a;
  };
  CHECK(Run(with_out(d1)) == 0);
  CHECK(Run(with_out(d2)) == 0);
  CHECK(Slurp(d1 / "trajectory.csv") == Slurp(d2 / "trajectory.csv"));
  CHECK(Slurp(d1 / "final_state.snap") == Slurp(d2 / "final_state.snap"));
  CHECK(Slurp(d1 / "summary.json") == Slurp(d2 / "summary.json"));
}

TEST_CASE("cli: usage and validation errors exit with code 1") {
  TempDir d;
  CHECK(Run({"frobnicate"}) == 1);
  CHECK(Run({}) == 1);
  // no initial data source
  CHECK(Run({"simulate", "--out", d.str()}) == 1);
  // two sources at once
  CHECK(Run({"simulate", "--preset", "cos1", "--coeff", "1:1:0", "--out",
             d.str()}) == 1);
  CHECK(Run({"simulate", "--preset", "unheard-of", "--out", d.str()}) == 1);
  CHECK(Run({"simulate", "--preset", "cos1", "--scheme", "euler", "--out",
             d.str()}) == 1);
  // blowup-scan guards
  CHECK(Run({"blowup-scan", "--out", d.str()}) == 1);
  CHECK(Run({"blowup-scan", "--complex", "--A-range", "abc", "--out",
             d.str()}) == 1);
  CHECK(Run({"blowup-scan", "--complex", "--rho-range", "1.5:1.5:1", "--out",
             d.str()}) == 1);
  CHECK(Run({"selfsimilar", "--boundary", "quux", "--out", d.str()}) == 1);
}

TEST_CASE("cli: early termination leaves a diagnostic and exit code 2") {
  TempDir d;
  CHECK(Run({"simulate", "--preset", "cos1", "--K", "16", "--T", "0.01",
             "--dt", "1e-4", "--norm-cap", "0.5", "--out", d.str()}) == 2);
  CHECK(fs::exists(d / "failure.txt"));
  const json s = LoadJson(d / "summary.json");
  CHECK(s["termination"] == "norm_cap");
}

TEST_CASE("cli: SURFGROW_OUT selects the output directory") {
  TempDir d;
  REQUIRE(::setenv("SURFGROW_OUT", d.str().c_str(), 1) == 0);
  const int rc = Run({"profiles", "--case", "3", "--b", "1"});
  ::unsetenv("SURFGROW_OUT");
  CHECK(rc == 0);
  CHECK(fs::exists(d / "report.json"));
  CHECK(fs::exists(d / "profile.txt"));
  const json rep = LoadJson(d / "report.json");
  CHECK(rep["case"].get<int>() == 3);
  CHECK(rep["residual"].get<double>() < 1e-9);
  CHECK(rep["singular_points"].size() == 2);
}

TEST_CASE("cli: config file supplies values and flags override it") {
  TempDir d1, d2, dcfg;
  fs::create_directories(dcfg.path);
  const fs::path cfg = dcfg / "run.cfg";
  {
    std::ofstream out(cfg);
    out << "[simulate]\n"
        << "preset = cos1\n"
        << "K = 12\n"
        << "T = 0.005\n"
        << "dt = 2e-4\n";
  }
  CHECK(Run({"simulate", "--config", cfg.string(), "--fixed-dt", "--out",
             d1.str()}) == 0);
  const json s1 = LoadJson(d1 / "summary.json");
  CHECK(s1["K"].get<int>() == 12);
  CHECK(s1["dt"].get<double>() == doctest::Approx(2e-4));
  CHECK(s1["T_requested"].get<double>() == doctest::Approx(0.005));

  // an explicit flag beats the config value
  CHECK(Run({"simulate", "--config", cfg.string(), "--dt", "1e-4",
             "--fixed-dt", "--out", d2.str()}) == 0);
  const json s2 = LoadJson(d2 / "summary.json");
  CHECK(s2["dt"].get<double>() == doctest::Approx(1e-4));
}

TEST_CASE("cli: picard reports contraction data") {
  TempDir d;
  CHECK(Run({"picard", "--preset", "cos1", "--amplitude", "0.05", "--K", "16",
             "--iters", "8", "--out", d.str()}) == 0);
  const json rep = LoadJson(d / "picard.json");
  CHECK(rep["diff_k_norms"].size() == 8);
  CHECK(rep["contraction_ratios"].size() == 7);
  for (const json& r : rep["contraction_ratios"])
    CHECK(r.get<double>() < 1.0);
  CHECK_FALSE(rep["diverged"].get<bool>());
  CHECK(rep["beta_constant"].get<double>() > 0.0);
}

TEST_CASE("cli: blowup-scan writes a per-cell report") {
  TempDir d;
  CHECK(Run({"blowup-scan", "--complex", "--A-range", "0.5:0.5:1",
             "--rho-range", "0.5:0.5:1", "--K", "16", "--T", "0.02", "--dt",
             "1e-4", "--out", d.str()}) == 0);
  const json rep = LoadJson(d / "report.json");
  CHECK(rep["cells"].size() == 1);
  CHECK(rep["amplitudes"].size() == 1);
  const json& cell = rep["cells"][0];
  CHECK(cell["amplitude"].get<double>() == doctest::Approx(0.5));
  CHECK(cell["termination"] == "completed");
  CHECK_FALSE(cell["leray_consistent"].get<bool>());
  CHECK(rep["norm_cap_count"].get<int>() == 0);
  CHECK(rep["leray_consistent_count"].get<int>() == 0);
}

TEST_CASE("cli: selfsimilar classifies every run") {
  TempDir d;
  CHECK(Run({"selfsimilar", "--Y", "5", "--n-points", "101", "--guesses", "3",
             "--jobs", "2", "--out", d.str()}) == 0);
  const json rep = LoadJson(d / "outcomes.json");
  CHECK(rep["guesses"].get<int>() == 3);
  const int total = rep["collapsed"].get<int>() + rep["stalled"].get<int>() +
                    rep["other"].get<int>();
  CHECK(total == 3);
  CHECK(rep["runs"].size() == 3);
  for (const json& r : rep["runs"]) {
    CHECK(r["iterations"].get<int>() >= 1);
    CHECK(r["residual"].get<double>() >= 0.0);
  }
}

TEST_CASE("cli: inequality-sweep covers each requested resolution") {
  TempDir d;
  CHECK(Run({"inequality-sweep", "--K", "8,16", "--samples", "50", "--out",
             d.str()}) == 0);
  const json rep = LoadJson(d / "report.json");
  CHECK(rep["admissible"].get<bool>());
  CHECK(rep["results"].size() == 2);
  CHECK(rep["results"][0]["K"].get<int>() == 8);
  CHECK(rep["results"][1]["K"].get<int>() == 16);
  for (const json& r : rep["results"]) {
    CHECK(r["max_ratio"].get<double>() > 0.0);
    CHECK(r["stability"].get<double>() > 0.0);
  }
}
