#include "bundle.hpp"

#include <fstream>

#include "mcvmd/errors.hpp"

namespace mcvmd::io {

namespace {

constexpr const char* kFormat = "mcvmd-bundle";
constexpr int kVersion = 1;

json to_array(const Eigen::VectorXd& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

Eigen::VectorXd from_array(const json& j, Index expected, const std::string& where) {
  if (!j.is_array() || Index(j.size()) != expected) {
    throw InputError("bundle: '" + where + "' must be an array of " + std::to_string(expected) + " numbers");
  }
  Eigen::VectorXd v(expected);
  for (Index k = 0; k < expected; ++k) {
    if (!j[k].is_number()) throw InputError("bundle: '" + where + "' holds a non-number at index " + std::to_string(k));
    v[k] = j[k].get<double>();
  }
  return v;
}

const json& member(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw InputError("bundle: missing '" + where + key + "'");
  return j.at(key);
}

}  // namespace

json config_to_json(const SolverConfig& c) {
  return {{"n_modes", c.n_modes},     {"alpha", c.alpha},
          {"tau", c.tau},             {"tol", c.tol},
          {"max_iters", c.max_iters}, {"init_scheme", std::string(to_string(c.init_scheme))},
          {"mirror", c.mirror}};
}

SolverConfig config_from_json(const json& j) {
  SolverConfig c;
  c.n_modes = member(j, "n_modes", "config.").get<int>();
  c.alpha = member(j, "alpha", "config.").get<double>();
  c.tau = member(j, "tau", "config.").get<double>();
  c.tol = member(j, "tol", "config.").get<double>();
  c.max_iters = member(j, "max_iters", "config.").get<int>();
  c.init_scheme = parse_init_scheme(member(j, "init_scheme", "config.").get<std::string>());
  c.mirror = member(j, "mirror", "config.").get<bool>();
  return c;
}

json bundle_to_json(const MCVMDResult<double>& r, const MultiSectionRecordd& record, const json& source) {
  json modes = json::array();
  for (int n = 0; n < r.mode_count(); ++n) {
    json sections = json::array();
    for (std::size_t i = 0; i < r.section_count(); ++i) {
      const auto& p = r.pair(n, i);
      sections.push_back({{"label", r.section_labels[i]},
                          {"zf_re", to_array(p.forward.samples().real())},
                          {"zf_im", to_array(p.forward.samples().imag())},
                          {"zb_re", to_array(p.backward.samples().real())},
                          {"zb_im", to_array(p.backward.samples().imag())}});
    }
    modes.push_back({{"index", n + 1}, {"center_freq_hz", r.center_freqs[n]}, {"sections", std::move(sections)}});
  }

  json recon = json::array();
  double err = 0, ref = 0;
  for (std::size_t i = 0; i < r.section_count(); ++i) {
    const auto z = reconstruct_section(r, i);
    const auto p = make_complex(record.section(i).x, record.section(i).y);
    err += (z.samples() - p.samples()).squaredNorm();
    ref += p.samples().squaredNorm();
    recon.push_back({{"label", r.section_labels[i]},
                     {"re", to_array(z.samples().real())},
                     {"im", to_array(z.samples().imag())}});
  }

  json j;
  j["meta"] = {{"format", kFormat},
               {"version", kVersion},
               {"sample_rate_hz", r.sample_rate()},
               {"length", r.length()},
               {"section_labels", r.section_labels},
               {"n_modes", r.mode_count()},
               {"source", source}};
  j["config"] = config_to_json(r.config_used);
  j["solver"] = {{"iterations", r.bank.iterations_used},
                 {"converged", r.bank.converged},
                 {"final_residual", r.bank.final_residual},
                 {"imag_residue", r.bank.imag_residue}};
  j["residual"] = ref > 0 ? std::sqrt(err / ref) : std::sqrt(err);
  j["center_freqs_hz"] = r.center_freqs;
  j["modes"] = std::move(modes);
  j["reconstruction"] = std::move(recon);
  return j;
}

MCVMDResult<double> bundle_from_json(const json& j) {
  const auto& meta = member(j, "meta", "");
  if (!meta.contains("format") || meta["format"] != kFormat) throw InputError("bundle: not an mcvmd result bundle");
  const double fs = member(meta, "sample_rate_hz", "meta.").get<double>();
  const Index T = member(meta, "length", "meta.").get<Index>();

  MCVMDResult<double> r;
  r.section_labels = member(meta, "section_labels", "meta.").get<std::vector<std::string>>();
  r.config_used = config_from_json(member(j, "config", ""));
  r.center_freqs = member(j, "center_freqs_hz", "").get<std::vector<double>>();
  const auto& modes = member(j, "modes", "");
  if (!modes.is_array() || modes.size() != r.center_freqs.size() || modes.empty()) {
    throw InputError("bundle: 'modes' must hold one entry per center frequency");
  }
  for (std::size_t n = 0; n < modes.size(); ++n) {
    const auto& sections = member(modes[n], "sections", "modes[].");
    if (!sections.is_array() || sections.size() != r.section_labels.size()) {
      throw InputError("bundle: mode " + std::to_string(n + 1) + " has the wrong number of sections");
    }
    std::vector<ComplexIMFPair<double>> row;
    for (std::size_t i = 0; i < sections.size(); ++i) {
      const std::string where = "modes[" + std::to_string(n) + "].sections[" + std::to_string(i) + "].";
      const auto& s = sections[i];
      Eigen::VectorXcd zf(T), zb(T);
      zf.real() = from_array(member(s, "zf_re", where), T, where + "zf_re");
      zf.imag() = from_array(member(s, "zf_im", where), T, where + "zf_im");
      zb.real() = from_array(member(s, "zb_re", where), T, where + "zb_re");
      zb.imag() = from_array(member(s, "zb_im", where), T, where + "zb_im");
      row.push_back({ComplexSeriesd(std::move(zf), fs), ComplexSeriesd(std::move(zb), fs)});
    }
    r.pairs.push_back(std::move(row));
  }
  if (const auto* solver = j.contains("solver") ? &j["solver"] : nullptr) {
    r.bank.iterations_used = solver->value("iterations", 0);
    r.bank.converged = solver->value("converged", false);
    r.bank.final_residual = solver->value("final_residual", 0.0);
    r.bank.center_freqs = r.center_freqs;
  }
  return r;
}

MCVMDResult<double> load_bundle(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw InputError("cannot open bundle '" + path.string() + "'; run 'mcvmd decompose --out <dir>' first");
  }
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InputError("bundle '" + path.string() + "' is not valid JSON: " + e.what());
  }
  try {
    return bundle_from_json(j);
  } catch (const json::exception& e) {
    throw InputError("bundle '" + path.string() + "': " + e.what());
  }
}

}  // namespace mcvmd::io
