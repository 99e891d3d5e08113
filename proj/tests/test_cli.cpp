#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "catch_amalgamated.hpp"
#include "cli.hpp"

using Catch::Approx;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result lfo_run(std::vector<std::string> args) {
  args.insert(args.begin(), "lfo");
  std::ostringstream out, err;
  const int code = lfo::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

// Fresh scratch directory per test case.
fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("lfo_test_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::vector<std::vector<double>> numeric_rows(const fs::path& csv) {
  std::vector<std::vector<double>> rows;
  const auto lines = lines_of(slurp(csv));
  for (std::size_t i = 1; i < lines.size(); ++i) {
    std::vector<double> row;
    std::istringstream in(lines[i]);
    for (std::string cell; std::getline(in, cell, ',');) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

TEST_CASE("synth", "[cli]") {
  const auto dir = scratch("synth");
  const auto a = (dir / "a.csv").string();
  const auto b = (dir / "b.csv").string();

  SECTION("25 s at 40 ms is 625 rows plus a header") {
    const auto r = lfo_run({"synth", "--tone", "0.1,0.52,0.05,0.3", "--seconds", "25", "-o", a});
    REQUIRE(r.code == lfo::cli::kExitOk);
    const auto lines = lines_of(slurp(a));
    REQUIRE(lines.size() == 626);
    REQUIRE(lines[0] == "timestamp_ms,station_id,channel,value");
    REQUIRE(lines[1].rfind("0,SYNTH,Frequency_Hz,", 0) == 0);
    REQUIRE(lines[2].rfind("40,SYNTH,Frequency_Hz,", 0) == 0);
  }

  SECTION("a tone is required") { REQUIRE(lfo_run({"synth", "-o", a}).code == lfo::cli::kExitUsage); }

  SECTION("malformed tone") {
    const auto r = lfo_run({"synth", "--tone", "0.1,0.52", "-o", a});
    REQUIRE(r.code == lfo::cli::kExitUsage);
    REQUIRE(r.err.find("--tone") != std::string::npos);
  }

  SECTION("same seed gives identical files") {
    for (const auto& path : {a, b}) {
      REQUIRE(lfo_run({"synth", "--tone", "0.1,0.52,0.05,0.3", "--snr-db", "30", "--seed", "7", "-o", path}).code == 0);
    }
    REQUIRE(slurp(a) == slurp(b));
    REQUIRE(lfo_run({"synth", "--tone", "0.1,0.52,0.05,0.3", "--snr-db", "30", "--seed", "8", "-o", b}).code == 0);
    REQUIRE(slurp(a) != slurp(b));
  }

  SECTION("stdout when no output path") {
    const auto r = lfo_run({"synth", "--tone", "1,1,0,0", "--count", "10"});
    REQUIRE(r.code == 0);
    REQUIRE(lines_of(r.out).size() == 11);
  }
  fs::remove_all(dir);
}

TEST_CASE("analyze", "[cli]") {
  const auto dir = scratch("analyze");
  const auto archive = (dir / "in.csv").string();
  const auto out_dir = dir / "out";

  SECTION("single decaying mode") {
    REQUIRE(lfo_run({"synth", "--tone", "0.05,0.84,-0.2,0", "-o", archive}).code == 0);
    const auto r =
        lfo_run({"analyze", archive, "--window-seconds", "24.96", "--order", "2", "--out-dir", out_dir.string()});
    REQUIRE(r.code == lfo::cli::kExitOk);
    REQUIRE(r.out.find("Window SYNTH") != std::string::npos);

    const auto table = out_dir / "SYNTH_Frequency_Hz_0.modes.csv";
    REQUIRE(fs::exists(table));
    const auto rows = numeric_rows(table);
    REQUIRE(rows.size() == 1);
    REQUIRE(rows[0][0] == Approx(0.05).epsilon(1e-6));
    REQUIRE(rows[0][1] == Approx(-0.2).margin(1e-6));
    REQUIRE(rows[0][2] == Approx(0.84).margin(1e-6));
    REQUIRE(rows[0][5] >= 0.999);

    const auto manifest = json::parse(slurp(out_dir / "manifest.json"));
    REQUIRE(manifest["command"] == "analyze");
    REQUIRE(manifest["windows"].size() == 1);
    REQUIRE(manifest["windows"][0]["modes"] == 1);
  }

  SECTION("archive shorter than a window") {
    REQUIRE(lfo_run({"synth", "--tone", "0.05,0.84,-0.2,0", "--seconds", "10", "-o", archive}).code == 0);
    const auto r = lfo_run({"analyze", archive, "--out-dir", out_dir.string()});
    REQUIRE(r.code == lfo::cli::kExitOk);
    REQUIRE(r.out.find("no windows") != std::string::npos);
    REQUIRE(fs::exists(out_dir / "manifest.json"));
  }

  SECTION("reporting rate mismatch") {
    REQUIRE(lfo_run({"synth", "--tone", "0.05,0.84,-0.2,0", "--dt", "0.02", "-o", archive}).code == 0);
    const auto r = lfo_run({"analyze", archive, "--out-dir", out_dir.string()});
    REQUIRE(r.code != lfo::cli::kExitOk);
    REQUIRE(r.err.find("DtMismatch") != std::string::npos);
  }

  SECTION("EMD prefilter and IMF dump") {
    REQUIRE(lfo_run({"synth", "--tone", "0.1,0.52,0,0.3", "-o", archive}).code == 0);
    const auto r = lfo_run({"analyze", archive, "--window-seconds", "24.96", "--emd-prefilter", "--dump-imfs",
                            "--out-dir", out_dir.string()});
    REQUIRE(r.code == 0);
    REQUIRE(fs::exists(out_dir / "SYNTH_Frequency_Hz_0.imfs.csv"));
    const auto rows = numeric_rows(out_dir / "SYNTH_Frequency_Hz_0.modes.csv");
    REQUIRE(!rows.empty());
    REQUIRE(rows[0][2] == Approx(0.52).margin(0.01));
  }
  fs::remove_all(dir);
}

TEST_CASE("detect", "[cli]") {
  const auto dir = scratch("detect");
  const auto archive = (dir / "in.csv").string();

  SECTION("growing inter-area mode is Critical") {
    REQUIRE(lfo_run({"synth", "--tone", "0.1,0.52,0.05,0.3", "--snr-db", "40", "--seed", "7", "-o", archive}).code ==
            0);
    const auto r = lfo_run({"detect", archive, "--window-seconds", "24.96", "--out-dir", (dir / "out").string()});
    REQUIRE(r.code == lfo::cli::kExitCritical);
    const auto lines = lines_of(r.out);
    REQUIRE(lines.size() == 1);
    const auto alarm = json::parse(lines[0]);
    REQUIRE(alarm["severity"] == "Critical");
    REQUIRE(alarm["growing"] == true);
    REQUIRE(alarm["classes"] == json::array({"InterArea"}));
    REQUIRE(alarm["station_id"] == "SYNTH");
    REQUIRE(alarm["t0"] == 0);
    REQUIRE(alarm["matched_frequency_hz"].get<double>() == Approx(0.52).margin(0.01));
    REQUIRE(slurp(dir / "out" / "alarms.jsonl") == r.out);
    REQUIRE(fs::exists(dir / "out" / "manifest.json"));
  }

  SECTION("decaying mode is Info") {
    REQUIRE(lfo_run({"synth", "--tone", "0.05,0.84,-0.2,0", "-o", archive}).code == 0);
    const auto r = lfo_run({"detect", archive, "--window-seconds", "24.96"});
    REQUIRE(r.code == lfo::cli::kExitOk);
    const auto lines = lines_of(r.out);
    REQUIRE(lines.size() == 1);
    REQUIRE(json::parse(lines[0])["severity"] == "Info");
  }

  SECTION("noise alone is silent") {
    REQUIRE(lfo_run({"synth", "--tone", "0,0.5,0,0", "--noise-rms", "1", "--seed", "3", "-o", archive}).code == 0);
    const auto r = lfo_run({"detect", archive, "--window-seconds", "24.96"});
    REQUIRE(r.code == lfo::cli::kExitOk);
    REQUIRE(r.out.empty());
  }

  SECTION("bad option values") {
    REQUIRE(lfo_run({"synth", "--tone", "0.05,0.84,-0.2,0", "-o", archive}).code == 0);
    REQUIRE(lfo_run({"detect", archive, "--order", "zero"}).code == lfo::cli::kExitUsage);
    REQUIRE(lfo_run({"detect", archive, "--band", "2,1"}).code == lfo::cli::kExitUsage);
  }
  fs::remove_all(dir);
}

TEST_CASE("spectrum", "[cli]") {
  const auto dir = scratch("spectrum");
  const auto archive = (dir / "in.csv").string();
  const auto out_dir = dir / "out";
  // 0.52 Hz with 625 samples at 40 ms sits exactly on bin 13.
  REQUIRE(lfo_run({"synth", "--tone", "0.3,0.52,0,1.0", "-o", archive}).code == 0);
  const auto table = out_dir / "SYNTH_Frequency_Hz_0.spectrum.csv";

  SECTION("rectangular in-bin magnitude is A/2") {
    const auto r = lfo_run(
        {"spectrum", archive, "--window-seconds", "24.96", "--window", "rect", "--out-dir", out_dir.string()});
    REQUIRE(r.code == 0);
    const auto rows = numeric_rows(table);
    REQUIRE(rows.size() == 313);
    REQUIRE(rows[13][0] == Approx(0.52));
    REQUIRE(rows[13][1] == Approx(0.15).margin(1e-12));
  }

  SECTION("band restricts rows") {
    const auto r =
        lfo_run({"spectrum", archive, "--window-seconds", "24.96", "--band", "0.1,2", "--out-dir", out_dir.string()});
    REQUIRE(r.code == 0);
    const auto rows = numeric_rows(table);
    REQUIRE(!rows.empty());
    for (const auto& row : rows) {
      REQUIRE(row[0] >= 0.1 - 1e-12);
      REQUIRE(row[0] <= 2.0 + 1e-12);
    }
    const auto manifest = json::parse(slurp(out_dir / "manifest.json"));
    REQUIRE(manifest["window_function"] == "hann");
  }

  SECTION("missing archive") {
    const auto r = lfo_run({"spectrum", (dir / "absent.csv").string(), "--out-dir", out_dir.string()});
    REQUIRE(r.code == lfo::cli::kExitUsage);
    REQUIRE(!r.err.empty());
  }

  SECTION("unknown taper") {
    REQUIRE(lfo_run({"spectrum", archive, "--window", "blackman", "--out-dir", out_dir.string()}).code ==
            lfo::cli::kExitUsage);
  }
  fs::remove_all(dir);
}

TEST_CASE("usage", "[cli]") {
  REQUIRE(lfo_run({}).code == lfo::cli::kExitUsage);
  REQUIRE(lfo_run({"frobnicate"}).code == lfo::cli::kExitUsage);
  const auto v = lfo_run({"--version"});
  REQUIRE(v.code == lfo::cli::kExitOk);
  REQUIRE(v.out.find(lfo::cli::kToolVersion) != std::string::npos);
}
