#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "mcvmd/pipeline.hpp"

namespace mcvmd::io {

using nlohmann::json;

json config_to_json(const SolverConfig& c);
SolverConfig config_from_json(const json& j);

/// Result bundle: meta, config echo, solver report, center frequencies, the
/// complex IMFs of every mode and section, and the per-section reconstruction.
/// `residual` is the relative L2 error of the reconstruction against `record`.
json bundle_to_json(const MCVMDResult<double>& r, const MultiSectionRecordd& record, const json& source);

/// Rebuilds the complex IMFs and config from a bundle. The solver's real
/// channel modes are not stored, so `bank` stays empty.
MCVMDResult<double> bundle_from_json(const json& j);

MCVMDResult<double> load_bundle(const std::filesystem::path& path);

}  // namespace mcvmd::io
