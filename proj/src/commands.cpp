#include "commands.hpp"

#include <cmath>
#include <filesystem>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "bundle.hpp"
#include "csv_io.hpp"
#include "mcvmd/mcvmd.hpp"
#include "svg.hpp"

namespace mcvmd::io {

namespace {

namespace fs = std::filesystem;
using Eigen::VectorXd;

struct SourceOptions {
  std::string input;
  std::string scenario;
  std::optional<double> sample_rate;
  std::string sections;
  std::optional<double> duration;
  std::optional<double> snr_db;
  std::uint64_t seed = 7;
  bool no_noise = false;
  double jump_time = 0.2;
  double tone_hz = 96.0;
  std::size_t n_sections = 3;
};

void add_generator_options(CLI::App* cmd, SourceOptions& o) {
  cmd->add_option("--duration", o.duration, "Record length in seconds");
  cmd->add_option("--snr-db", o.snr_db, "Per-probe SNR in dB (paper-4-1: 8.78, bistable: 10, multitone: none)");
  cmd->add_option("--seed", o.seed, "Noise and generator seed")->capture_default_str();
  cmd->add_flag("--no-noise", o.no_noise, "Disable additive noise");
  cmd->add_option("--jump-time", o.jump_time, "bistable: precession reversal time (s)")->capture_default_str();
  cmd->add_option("--tone-hz", o.tone_hz, "bistable: tone frequency (Hz)")->capture_default_str();
  cmd->add_option("--n-sections", o.n_sections, "multitone: number of sections")->capture_default_str();
}

const std::vector<std::string> kScenarios{"paper-4-1", "bistable", "multitone"};

MultiSectionRecordd generate(const SourceOptions& o) {
  NoiseSpec noise;
  noise.seed = o.seed;
  auto with_snr = [&](std::optional<double> fallback) {
    if (o.no_noise) return;
    if (o.snr_db) noise.snr_db = *o.snr_db;
    else if (fallback) noise.snr_db = *fallback;
  };
  if (o.scenario == "paper-4-1") {
    with_snr(8.78);
    return simulate_two_section(o.duration.value_or(1.0), o.sample_rate.value_or(1024.0), noise);
  }
  if (o.scenario == "bistable") {
    with_snr(10.0);
    return simulate_bistable(o.duration.value_or(0.512), o.sample_rate.value_or(2000.0), o.jump_time, noise, o.tone_hz);
  }
  if (o.scenario == "multitone") {
    with_snr(std::nullopt);
    return simulate_multitone(o.n_sections, o.duration.value_or(1.28), o.sample_rate.value_or(800.0),
                              default_multitone_set(), o.seed, noise);
  }
  throw InputError("unknown scenario '" + o.scenario + "' (expected paper-4-1, bistable or multitone)");
}

json source_json(const SourceOptions& o) {
  if (!o.input.empty()) return {{"input", o.input}};
  json j{{"scenario", o.scenario}, {"seed", o.seed}, {"no_noise", o.no_noise}};
  if (o.duration) j["duration_s"] = *o.duration;
  if (o.snr_db) j["snr_db"] = *o.snr_db;
  if (o.scenario == "bistable") j["jump_time_s"] = o.jump_time, j["tone_hz"] = o.tone_hz;
  if (o.scenario == "multitone") j["sections"] = o.n_sections;
  return j;
}

MultiSectionRecordd load_record(const SourceOptions& o) {
  if (o.input.empty() == o.scenario.empty()) throw InputError("select exactly one of --input or --scenario");
  if (!o.scenario.empty()) return generate(o);
  return record_from_table(read_csv(o.input), o.sample_rate, parse_section_map(o.sections));
}

fs::path bundle_path(const std::string& arg) {
  fs::path p(arg);
  if (fs::is_directory(p)) p /= "bundle.json";
  return p;
}

fs::path output_dir(const std::string& out, const fs::path& bundle) {
  return out.empty() ? (bundle.has_parent_path() ? bundle.parent_path() : fs::path(".")) : fs::path(out);
}

VectorXd time_axis(Index n, double fs) {
  VectorXd t(n);
  for (Index k = 0; k < n; ++k) t[k] = double(k) / fs;
  return t;
}

std::vector<double> parse_list(const std::string& s, const char* what) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw InputError(std::string(what) + ": cannot parse '" + item + "' as a number");
    }
  }
  if (out.empty()) throw InputError(std::string(what) + ": empty list");
  return out;
}

void write_json(const fs::path& path, const json& j) { write_file_atomic(path, j.dump(1) + "\n"); }

// --- simulate ---------------------------------------------------------------

void cmd_simulate(const SourceOptions& o, const std::string& out_path, std::ostream& out) {
  const auto record = generate(o);
  write_file_atomic(out_path, record_to_csv(record));
  out << "wrote " << out_path << " (" << record.length() << " samples, " << record.section_count()
      << " sections, " << record.sample_rate() << " Hz)\n";
}

// --- decompose --------------------------------------------------------------

void cmd_decompose(const SourceOptions& o, SolverConfig config, const std::string& init, bool no_mirror,
                   const std::string& out_dir, std::ostream& out) {
  config.init_scheme = parse_init_scheme(init);
  config.mirror = !no_mirror;
  const auto record = load_record(o);
  const auto r = mcvmd::mcvmd(record, config);
  const fs::path dir(out_dir);
  const double fs = r.sample_rate();
  const VectorXd t = time_axis(r.length(), fs);

  const json bundle = bundle_to_json(r, record, source_json(o));
  write_json(dir / "bundle.json", bundle);

  for (int n = 0; n < r.mode_count(); ++n) {
    std::vector<std::string> header{"t"};
    std::vector<VectorXd> data;
    data.reserve(4 * r.section_count());
    for (std::size_t i = 0; i < r.section_count(); ++i) {
      const auto& p = r.pair(n, i);
      const auto& label = r.section_labels[i];
      for (const char* part : {"zf_re", "zf_im", "zb_re", "zb_im"}) header.push_back(label + "_" + part);
      data.push_back(p.forward.samples().real());
      data.push_back(p.forward.samples().imag());
      data.push_back(p.backward.samples().real());
      data.push_back(p.backward.samples().imag());
    }
    std::vector<const VectorXd*> cols{&t};
    for (const auto& d : data) cols.push_back(&d);
    write_file_atomic(dir / "modes" / ("mode" + std::to_string(n + 1) + ".csv"), table_to_csv(header, cols));
  }

  std::vector<std::string> header{"t"};
  std::vector<VectorXd> data;
  for (std::size_t i = 0; i < r.section_count(); ++i) {
    const auto z = reconstruct_section(r, i);
    header.push_back(r.section_labels[i] + "_re");
    header.push_back(r.section_labels[i] + "_im");
    data.push_back(z.samples().real());
    data.push_back(z.samples().imag());
  }
  std::vector<const VectorXd*> cols{&t};
  for (const auto& d : data) cols.push_back(&d);
  write_file_atomic(dir / "reconstruction.csv", table_to_csv(header, cols));

  out << "modes:";
  for (double f : r.center_freqs) out << ' ' << format_double(f) << " Hz";
  out << "\niterations: " << r.bank.iterations_used << (r.bank.converged ? " (converged)" : " (max_iters reached)")
      << "\nresidual: " << format_double(bundle["residual"].get<double>()) << "\nwrote " << (dir / "bundle.json").string()
      << "\n";
}

// --- features ---------------------------------------------------------------

void cmd_features(const std::string& bundle_arg, const std::string& out_arg, std::ostream& out) {
  const auto bpath = bundle_path(bundle_arg);
  const auto r = load_bundle(bpath);
  const fs::path dir = output_dir(out_arg, bpath) / "features";
  const double fs = r.sample_rate();
  const VectorXd t = time_axis(r.length(), fs);
  json summary = json::array();
  for (int n = 0; n < r.mode_count(); ++n) {
    const VectorXd hz = mode_if(r, n);
    for (std::size_t i = 0; i < r.section_count(); ++i) {
      const auto f = orbit_features(r, n, i);
      const auto& label = r.section_labels[i];
      const std::string name = "mode" + std::to_string(n + 1) + "_" + label + ".csv";
      write_file_atomic(dir / name,
                        table_to_csv({"t", "r_plus", "r_minus", "r_a", "r_b", "phi_f", "phi_b", "theta", "sdi", "if_hz"},
                                     {&t, &f.r_plus, &f.r_minus, &f.r_a, &f.r_b, &f.phi_f, &f.phi_b, &f.theta, &f.sdi,
                                      &hz}));
      const auto track = precession_direction(f.sdi, fs);
      Index fwd = 0, bwd = 0;
      for (int d : track.direction) fwd += d > 0, bwd += d < 0;
      summary.push_back({{"mode", n + 1},
                         {"section", label},
                         {"file", name},
                         {"forward_fraction", double(fwd) / double(r.length())},
                         {"backward_fraction", double(bwd) / double(r.length())},
                         {"sdi_crossings_s", track.crossings},
                         {"sdi_clamped", f.sdi_clamped}});
    }
  }
  write_json(dir / "summary.json", summary);
  out << "wrote " << summary.size() << " feature tables to " << dir.string() << "\n";
}

// --- timefs -----------------------------------------------------------------

void cmd_timefs(const std::string& bundle_arg, const std::string& out_arg, double resolution, std::ostream& out) {
  const auto bpath = bundle_path(bundle_arg);
  const auto r = load_bundle(bpath);
  const fs::path dir = output_dir(out_arg, bpath) / "timefs";
  const auto g = time_fs(r, resolution);
  std::vector<std::string> header{"t"};
  for (Index j = 0; j < g.freqs.size(); ++j) header.push_back(format_double(g.freqs[j]));
  for (std::size_t i = 0; i < r.section_count(); ++i) {
    const auto& label = r.section_labels[i];
    std::vector<VectorXd> data;
    data.reserve(std::size_t(g.freqs.size()));
    for (Index j = 0; j < g.freqs.size(); ++j) data.push_back(g.energy[i].col(j));
    std::vector<const VectorXd*> cols{&g.times};
    for (const auto& d : data) cols.push_back(&d);
    write_file_atomic(dir / (label + ".csv"), table_to_csv(header, cols));
    write_file_atomic(dir / (label + ".svg"), timefs_svg(g, i, "Time-FS, " + label));
  }
  out << "wrote Time-FS grids (" << g.times.size() << " x " << g.freqs.size() << ", "
      << format_double(g.resolution_hz) << " Hz bins) to " << dir.string() << "\n";
}

// --- iom --------------------------------------------------------------------

json frame_json(const IOMFrame& f, const std::vector<std::string>& labels) {
  json sections = json::array();
  for (std::size_t i = 0; i < f.sections.size(); ++i) {
    const auto& s = f.sections[i];
    json anchors = json::array();
    for (const auto& a : s.anchors) anchors.push_back({a.real(), a.imag()});
    sections.push_back({{"label", labels[i]},
                        {"axial_position", s.axial_position},
                        {"r_a", s.r_a},
                        {"r_b", s.r_b},
                        {"theta", s.theta},
                        {"degenerate", s.degenerate},
                        {"precession", std::string(to_string(s.precession))},
                        {"orbit_point", {s.orbit_point.real(), s.orbit_point.imag()}},
                        {"initial_phase", s.initial_phase},
                        {"initial_phase_time", s.initial_phase_time},
                        {"anchor_phases", s.anchor_phases},
                        {"anchors", std::move(anchors)}});
  }
  json lines = json::array();
  for (const auto& line : f.posture_lines) {
    json pts = json::array();
    for (const auto& q : line) pts.push_back({q.x(), q.y(), q.z()});
    lines.push_back(std::move(pts));
  }
  return {{"time", f.time},          {"sample", f.sample},
          {"mode", f.mode + 1},      {"anchor_step", f.anchor_step},
          {"sections", std::move(sections)}, {"posture_lines", std::move(lines)}};
}

void cmd_iom(const std::string& bundle_arg, const std::string& out_arg, const std::string& times_arg, int mode,
             int anchors, const std::string& axial_arg, std::ostream& out) {
  const auto bpath = bundle_path(bundle_arg);
  const auto r = load_bundle(bpath);
  const fs::path dir = output_dir(out_arg, bpath);
  const auto times = parse_list(times_arg, "--times");
  std::vector<double> axial;
  if (!axial_arg.empty()) axial = parse_list(axial_arg, "--axial");
  if (mode < 1 || mode > r.mode_count()) {
    throw InputError("--mode must lie in 1.." + std::to_string(r.mode_count()) + " (got " + std::to_string(mode) + ")");
  }
  std::vector<OrbitFeatureSeries<double>> features;
  for (std::size_t i = 0; i < r.section_count(); ++i) features.push_back(orbit_features(r, mode - 1, i));
  std::vector<IOMFrame> frames;
  json doc{{"frames", json::array()}};
  for (double time : times) {
    frames.push_back(build_iom_frame(r, mode - 1, time, features, anchors, axial));
    doc["frames"].push_back(frame_json(frames.back(), r.section_labels));
  }
  write_json(dir / "iom.json", doc);
  write_file_atomic(dir / "iom.svg", iom_svg(frames, r.section_labels));
  out << "wrote " << frames.size() << " IOM frames to " << (dir / "iom.json").string() << "\n";
}

// --- plot -------------------------------------------------------------------

void cmd_plot(const std::string& bundle_arg, const std::string& out_arg, std::ostream& out) {
  const auto bpath = bundle_path(bundle_arg);
  const auto r = load_bundle(bpath);
  const fs::path dir = output_dir(out_arg, bpath);
  write_file_atomic(dir / "modes.svg", modes_svg(r));
  write_file_atomic(dir / "orbits.svg", orbits_svg(r));
  out << "wrote " << (dir / "modes.svg").string() << " and " << (dir / "orbits.svg").string() << "\n";
}

}  // namespace

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-section complex variational mode decomposition of rotor orbit signals", "mcvmd"};
  app.require_subcommand(1);

  SourceOptions sim;
  std::string sim_out;
  auto* simulate = app.add_subcommand("simulate", "Write a synthetic multi-section record as CSV");
  simulate->add_option("--scenario", sim.scenario, "Generator")->required()->check(CLI::IsMember(kScenarios));
  simulate->add_option("--out", sim_out, "Output CSV path")->required();
  simulate->add_option("--sample-rate", sim.sample_rate, "Sample rate in Hz");
  add_generator_options(simulate, sim);

  SourceOptions src;
  SolverConfig config;
  std::string init(to_string(config.init_scheme)), dec_out = "mcvmd-out";
  bool no_mirror = false;
  auto* decompose = app.add_subcommand("decompose", "Run the decomposition and write a result bundle");
  decompose->add_option("--input", src.input, "Input CSV (t, x1, y1, x2, y2, ...)");
  decompose->add_option("--scenario", src.scenario, "Generator instead of an input file")
      ->check(CLI::IsMember(kScenarios));
  decompose->add_option("--sample-rate", src.sample_rate, "Sample rate in Hz (default: inferred from t)");
  decompose->add_option("--sections", src.sections, "Column pairs, e.g. x1:y1,x2:y2");
  add_generator_options(decompose, src);
  decompose->add_option("--modes", config.n_modes, "Number of modes")->capture_default_str();
  decompose->add_option("--alpha", config.alpha, "Bandwidth penalty (rad/s units)")->capture_default_str();
  decompose->add_option("--tau", config.tau, "Dual ascent step")->capture_default_str();
  decompose->add_option("--tol", config.tol, "Relative convergence tolerance")->capture_default_str();
  decompose->add_option("--max-iters", config.max_iters, "Iteration cap")->capture_default_str();
  decompose->add_option("--init", init, "Center frequency init (uniform-spread, zero, octave, spectral-peaks)")
      ->capture_default_str();
  decompose->add_option("--threads", config.threads, "Worker threads")->capture_default_str();
  decompose->add_flag("--no-mirror", no_mirror, "Disable mirror extension");
  decompose->add_option("--out", dec_out, "Output directory")->capture_default_str();

  std::string bundle = "mcvmd-out", view_out;
  auto add_bundle = [&](CLI::App* cmd) {
    cmd->add_option("--bundle", bundle, "Bundle file or decompose output directory")->capture_default_str();
    cmd->add_option("--out", view_out, "Output directory (default: the bundle's directory)");
  };

  auto* features = app.add_subcommand("features", "Export per-mode, per-section orbit features");
  add_bundle(features);

  double resolution = 0;
  auto* timefs = app.add_subcommand("timefs", "Export Time-FS grids and heat maps");
  add_bundle(timefs);
  timefs->add_option("--resolution", resolution, "Bin width in Hz (default: fs / length)");

  std::string times, axial;
  int iom_mode = 1, anchors = 8;
  auto* iom = app.add_subcommand("iom", "Export instantaneous orbit maps at given times");
  add_bundle(iom);
  iom->add_option("--times", times, "Comma-separated frame times in seconds")->required();
  iom->add_option("--mode", iom_mode, "Mode index, 1-based")->capture_default_str();
  iom->add_option("--anchors", anchors, "Posture line anchors per orbit")->capture_default_str();
  iom->add_option("--axial", axial, "Comma-separated axial section positions");

  auto* plot = app.add_subcommand("plot", "Plot mode waveforms and orbits as SVG");
  add_bundle(plot);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }

  try {
    if (simulate->parsed()) cmd_simulate(sim, sim_out, out);
    else if (decompose->parsed()) cmd_decompose(src, config, init, no_mirror, dec_out, out);
    else if (features->parsed()) cmd_features(bundle, view_out, out);
    else if (timefs->parsed()) cmd_timefs(bundle, view_out, resolution, out);
    else if (iom->parsed()) cmd_iom(bundle, view_out, times, iom_mode, anchors, axial, out);
    else if (plot->parsed()) cmd_plot(bundle, view_out, out);
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "numerical error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}

}  // namespace mcvmd::io
