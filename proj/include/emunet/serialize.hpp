#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "emunet/basis.hpp"
#include "emunet/domain.hpp"
#include "emunet/gp.hpp"
#include "emunet/linked.hpp"
#include "emunet/mvem.hpp"
#include "emunet/sim.hpp"

namespace emunet {

using Json = nlohmann::json;

Json vector_to_json(const Vector& v);
Vector vector_from_json(const Json& j);
// Matrices stored column-major with explicit shape.
Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j);

Json domain_to_json(const Domain& d);
Domain domain_from_json(const Json& j);

Json series_to_json(const ScenarioSeries& s);
ScenarioSeries series_from_json(const Json& j);

Json shares_to_json(const SeasonShares& s);
SeasonShares shares_from_json(const Json& j);

std::string trend_to_string(TrendKind kind);
TrendKind trend_from_string(const std::string& s);

// GP models persist domain, trend, fitted coefficients, kernel, variance and
// the training data; factorizations are recomputed on load and the
// recomputed weights are validated against the stored alpha checksum.
Json gp_to_json(const GpModel& model);
GpModel gp_from_json(const Json& j);

Json basis_to_json(const PcBasis& basis);
PcBasis basis_from_json(const Json& j);

Json mv_to_json(const MvEmulator& em);
MvEmulator mv_from_json(const Json& j);

Json network_to_json(const LinkedNetwork& net);
LinkedNetwork network_from_json(const Json& j);

void save_json(const std::filesystem::path& path, const Json& j);
Json load_json(const std::filesystem::path& path);

// FNV-1a 64-bit, hex encoded; used for artifact checksums and basis
// fingerprints.
std::string fnv1a_hex(std::string_view bytes);
std::string file_checksum(const std::filesystem::path& path);
std::string basis_fingerprint(const PcBasis& basis);

}  // namespace emunet
