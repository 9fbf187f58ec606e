#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <sys/wait.h>

#include <json.hpp>

#include "csv_io.hpp"
#include "mcvmd/errors.hpp"
#include "support.hpp"

using namespace testsupport;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Workdir {
  fs::path path;
  explicit Workdir(const std::string& name) : path(fs::temp_directory_path() / ("mcvmd-cli-" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~Workdir() { fs::remove_all(path); }
  std::string operator/(const std::string& leaf) const { return (path / leaf).string(); }
};

int run(const std::string& args) {
  const std::string cmd = std::string(MCVMD_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json(const std::string& path) { return json::parse(slurp(path)); }

}  // namespace

TEST_CASE("csv parse errors name the row and column") {
  using mcvmd::InputError;
  CHECK_THROWS_WITH_AS(mcvmd::io::parse_csv("t,x1,y1\n0,1,2\n0.1,abc,3\n", "in.csv"),
                       "in.csv: row 3, column 2: cannot parse 'abc' as a number", InputError);
  CHECK_THROWS_WITH_AS(mcvmd::io::parse_csv("t,x1,y1\n0,1\n", "in.csv"), "in.csv: row 2: expected 3 fields, found 2",
                       InputError);
  CHECK_THROWS_AS(mcvmd::io::parse_csv("t,x1,x1\n0,1,2\n"), InputError);
  CHECK_THROWS_AS(mcvmd::io::parse_csv("t,x1,y1\n"), InputError);
}

TEST_CASE("csv ingestion infers the sample rate and pairs section columns") {
  const auto t = mcvmd::io::parse_csv("\xEF\xBB\xBFt,x1,y1,x2,y2\n0,1,2,3,4\n0.5,5,6,7,8\n1,9,10,11,12\n");
  const auto rec = mcvmd::io::record_from_table(t, std::nullopt);
  CHECK(rec.sample_rate() == 2.0);
  CHECK(rec.section_count() == 2);
  CHECK(rec.section(1).y[2] == 12.0);

  const auto swapped = mcvmd::io::record_from_table(t, 10.0, mcvmd::io::parse_section_map("y2:x1"));
  CHECK(swapped.section_count() == 1);
  CHECK(swapped.sample_rate() == 10.0);
  CHECK(swapped.section(0).x[0] == 4.0);

  CHECK_THROWS_AS(mcvmd::io::record_from_table(t, std::nullopt, mcvmd::io::parse_section_map("x1:z9")),
                  mcvmd::InputError);
  const auto uneven = mcvmd::io::parse_csv("t,x1,y1\n0,1,2\n0.5,1,2\n1.2,1,2\n");
  CHECK_THROWS_AS(mcvmd::io::record_from_table(uneven, std::nullopt), mcvmd::InputError);
  const auto gap = mcvmd::io::parse_csv("t,x1,y1\n0,1,2\n0.5,nan,2\n");
  CHECK_THROWS_AS(mcvmd::io::record_from_table(gap, std::nullopt), mcvmd::InputError);
}

TEST_CASE("numeric exports round-trip exactly") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> mantissa(-1.0, 1.0);
  std::uniform_int_distribution<int> exponent(-300, 300);
  for (int trial = 0; trial < 2000; ++trial) {
    const double v = std::ldexp(mantissa(rng), exponent(rng));
    const auto s = mcvmd::io::format_double(v);
    CHECK(std::strtod(s.c_str(), nullptr) == v);
  }
  CHECK(mcvmd::io::format_double(0.1) == "0.1");
  CHECK(mcvmd::io::format_double(std::nan("")) == "nan");
}

TEST_CASE("simulate writes the two-section record deterministically") {
  Workdir w("simulate");
  REQUIRE(run("simulate --scenario paper-4-1 --snr-db 8.78 --seed 7 --out " + (w / "a.csv")) == 0);
  const auto t = mcvmd::io::read_csv(w / "a.csv");
  CHECK(t.rows() == 1024);
  CHECK(t.header == std::vector<std::string>{"t", "x1", "y1", "x2", "y2"});

  REQUIRE(run("simulate --scenario paper-4-1 --no-noise --out " + (w / "b.csv")) == 0);
  REQUIRE(run("simulate --scenario paper-4-1 --no-noise --out " + (w / "c.csv")) == 0);
  CHECK(slurp(w / "b.csv") == slurp(w / "c.csv"));
  CHECK(slurp(w / "a.csv") != slurp(w / "b.csv"));

  // Noiseless samples match the clean terms.
  const auto clean = mcvmd::io::read_csv(w / "b.csv");
  const VectorXcd p1 = two_section_clean(1, 0, 1024, 1024.0);
  double worst = 0;
  for (Index k = 0; k < 1024; ++k) {
    worst = std::max(worst, std::abs(cplx(clean.columns[1][k], clean.columns[2][k]) - p1[k]));
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("decompose recovers the two-section modes and exports consistent files") {
  Workdir w("decompose");
  REQUIRE(run("simulate --scenario paper-4-1 --seed 7 --out " + (w / "in.csv")) == 0);
  REQUIRE(run("decompose --input " + (w / "in.csv") + " --modes 2 --out " + (w / "out")) == 0);
  const auto bundle = read_json(w / "out/bundle.json");
  CHECK(bundle["meta"]["format"] == "mcvmd-bundle");
  CHECK(bundle["meta"]["sample_rate_hz"] == 1024.0);
  const auto cf = bundle["center_freqs_hz"].get<std::vector<double>>();
  REQUIRE(cf.size() == 2);
  CHECK(std::abs(cf[0] - 16.0) < 0.5);
  CHECK(std::abs(cf[1] - 32.0) < 1.0);
  CHECK(bundle["config"]["n_modes"] == 2);
  CHECK(bundle["config"]["init_scheme"] == "spectral-peaks");
  CHECK(bundle["modes"][1]["sections"][0]["zb_im"].size() == 1024);

  // Mode series summed across modes equal the exported reconstruction.
  const auto m1 = mcvmd::io::read_csv(w / "out/modes/mode1.csv");
  const auto m2 = mcvmd::io::read_csv(w / "out/modes/mode2.csv");
  const auto rec = mcvmd::io::read_csv(w / "out/reconstruction.csv");
  double worst = 0;
  for (std::size_t i = 0; i < 2; ++i) {
    const std::string s = "section" + std::to_string(i + 1);
    const auto col = [&](const mcvmd::io::CsvTable& t, const std::string& name) { return t.columns[*t.find(name)]; };
    for (const char* part : {"re", "im"}) {
      const auto f1 = col(m1, s + "_zf_" + part), b1 = col(m1, s + "_zb_" + part);
      const auto f2 = col(m2, s + "_zf_" + part), b2 = col(m2, s + "_zb_" + part);
      const auto r = col(rec, s + "_" + part);
      for (std::size_t k = 0; k < r.size(); ++k) worst = std::max(worst, std::abs(f1[k] + b1[k] + f2[k] + b2[k] - r[k]));
    }
  }
  CHECK(worst < 1e-9);

  // Exports are byte-identical across reruns and thread counts.
  REQUIRE(run("decompose --input " + (w / "in.csv") + " --modes 2 --threads 3 --out " + (w / "again")) == 0);
  CHECK(slurp(w / "out/modes/mode1.csv") == slurp(w / "again/modes/mode1.csv"));
  CHECK(slurp(w / "again/bundle.json") == slurp(w / "out/bundle.json"));
}

TEST_CASE("single mode on a pure tone leaves a small residual") {
  Workdir w("tone");
  std::ostringstream csv;
  csv << "t,x1,y1\n";
  for (int k = 0; k < 1000; ++k) {
    const double t = k / 1000.0;
    csv << mcvmd::io::format_double(t) << "," << mcvmd::io::format_double(1.5 * std::cos(2 * pi * 40 * t)) << ","
        << mcvmd::io::format_double(0.7 * std::sin(2 * pi * 40 * t + 0.4)) << "\n";
  }
  mcvmd::io::write_file_atomic(w / "tone.csv", csv.str());

  // A whole-cycle tone is periodic, so without the mirror the mode is exact.
  REQUIRE(run("decompose --input " + (w / "tone.csv") + " --modes 1 --no-mirror --out " + (w / "plain")) == 0);
  const auto plain = read_json(w / "plain/bundle.json");
  CHECK(plain["residual"].get<double>() < 1e-2);
  CHECK(std::abs(plain["center_freqs_hz"][0].get<double>() - 40.0) < 0.1);

  // With the mirror the reflection kinks leave an edge error; the interior stays tight.
  REQUIRE(run("decompose --input " + (w / "tone.csv") + " --modes 1 --out " + (w / "mirror")) == 0);
  const auto mirrored = read_json(w / "mirror/bundle.json");
  CHECK(std::abs(mirrored["center_freqs_hz"][0].get<double>() - 40.0) < 0.1);
  const auto in = mcvmd::io::read_csv(w / "tone.csv");
  const auto rec = mcvmd::io::read_csv(w / "mirror/reconstruction.csv");
  const auto core = interior(1000);
  double err = 0, ref = 0;
  for (Index k = core.begin; k < core.end; ++k) {
    const cplx p(in.columns[1][k], in.columns[2][k]), z(rec.columns[1][k], rec.columns[2][k]);
    err += std::norm(z - p), ref += std::norm(p);
  }
  CHECK(std::sqrt(err / ref) < 1e-2);
  CHECK(mirrored["residual"].get<double>() < 5e-2);
}

TEST_CASE("feature, Time-FS, IOM and plot exports") {
  Workdir w("views");
  REQUIRE(run("decompose --scenario paper-4-1 --no-noise --modes 2 --out " + (w / "out")) == 0);
  REQUIRE(run("features --bundle " + (w / "out")) == 0);

  SUBCASE("section-1 mode-1 major axis follows the clean 16 Hz term") {
    const auto f = mcvmd::io::read_csv(w / "out/features/mode1_section1.csv");
    CHECK(f.header == std::vector<std::string>{"t", "r_plus", "r_minus", "r_a", "r_b", "phi_f", "phi_b", "theta",
                                               "sdi", "if_hz"});
    const auto truth = naive_split(two_section_clean(1, 1, 1024, 1024.0));
    const auto in = interior(1024);
    const auto& r_a = f.columns[3];
    double worst = 0;
    for (Index k = in.begin; k < in.end; ++k) {
      const double expected = std::abs(truth.forward[k]) + std::abs(truth.backward[k]);
      worst = std::max(worst, std::abs(r_a[k] - expected) / expected);
    }
    CHECK(worst < 0.10);

    const auto summary = read_json(w / "out/features/summary.json");
    REQUIRE(summary.size() == 4);
    CHECK(summary[0]["section"] == "section1");
    CHECK(summary[0]["forward_fraction"].get<double>() > 0.9);
    CHECK(summary[1]["backward_fraction"].get<double>() > 0.9);
  }

  SUBCASE("Time-FS grid and signed frequency axis") {
    REQUIRE(run("timefs --bundle " + (w / "out") + " --out " + (w / "views")) == 0);
    const auto g = mcvmd::io::read_csv(w / "views/timefs/section1.csv");
    CHECK(g.rows() == 1024);
    CHECK(g.header.size() == 1026);
    CHECK(g.header[1] == "-512");
    CHECK(g.header.back() == "512");
    const auto svg = slurp(w / "views/timefs/section1.svg");
    CHECK(svg.find("<g id=\"freq-axis\" data-min=\"-512\" data-max=\"512\">") != std::string::npos);
    CHECK(svg.find(">-512</text>") != std::string::npos);
    CHECK(svg.find(">512</text>") != std::string::npos);
  }

  SUBCASE("IOM frame count equals the requested timestamps") {
    REQUIRE(run("iom --bundle " + (w / "out") + " --times 0.1,0.25,0.5,0.75 --mode 2 --anchors 6") == 0);
    const auto doc = read_json(w / "out/iom.json");
    REQUIRE(doc["frames"].size() == 4);
    CHECK(doc["frames"][2]["time"] == 0.5);
    CHECK(doc["frames"][2]["mode"] == 2);
    CHECK(doc["frames"][0]["posture_lines"].size() == 6);
    CHECK(doc["frames"][0]["sections"][0]["precession"] == "backward");
    CHECK(doc["frames"][0]["sections"][1]["precession"] == "forward");
    CHECK(slurp(w / "out/iom.svg").find("<polygon") != std::string::npos);
  }

  SUBCASE("plots") {
    REQUIRE(run("plot --bundle " + (w / "out/bundle.json")) == 0);
    CHECK(slurp(w / "out/modes.svg").starts_with("<svg"));
    CHECK(slurp(w / "out/orbits.svg").starts_with("<svg"));
  }
}

TEST_CASE("bistable scenario reverses precession near the jump") {
  Workdir w("bistable");
  REQUIRE(run("simulate --scenario bistable --jump-time 0.2 --out " + (w / "b.csv")) == 0);
  REQUIRE(run("decompose --input " + (w / "b.csv") + " --modes 1 --out " + (w / "out")) == 0);
  REQUIRE(run("features --bundle " + (w / "out")) == 0);
  const auto summary = read_json(w / "out/features/summary.json");
  REQUIRE(summary.size() == 2);
  for (const auto& entry : summary) {
    // The crossing nearest the jump is within 20 ms of it.
    double nearest = 1e9;
    for (double c : entry["sdi_crossings_s"].get<std::vector<double>>()) {
      if (std::abs(c - 0.2) < std::abs(nearest - 0.2)) nearest = c;
    }
    CHECK(std::abs(nearest - 0.2) < 0.02);
  }
}

TEST_CASE("exit codes") {
  Workdir w("exit");
  CHECK(run("--help") == 0);
  CHECK(run("") == 2);
  CHECK(run("nonsense") == 2);
  CHECK(run("simulate --scenario nowhere --out " + (w / "x.csv")) == 2);
  CHECK(run("features --bundle " + (w / "missing")) == 2);
  CHECK(run("decompose --scenario paper-4-1 --modes 0 --out " + (w / "o")) == 2);
  CHECK(run("decompose --out " + (w / "o")) == 2);

  mcvmd::io::write_file_atomic(w / "bad.csv", "t,x1,y1\n0,1,2\n0.001,oops,2\n");
  CHECK(run("decompose --input " + (w / "bad.csv") + " --out " + (w / "o")) == 2);

  REQUIRE(run("decompose --scenario paper-4-1 --out " + (w / "o")) == 0);
  CHECK(run("iom --bundle " + (w / "o") + " --times 5.0") == 2);
  CHECK(run("iom --bundle " + (w / "o") + " --times 0.5 --mode 3") == 2);
}
