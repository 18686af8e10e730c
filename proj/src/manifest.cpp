#include "emunet/manifest.hpp"

#include "emunet/errors.hpp"

namespace emunet {

namespace {
constexpr const char* kVersion = "0.1.0";
}

RunManifest::RunManifest(std::string config_checksum)
    : config_checksum_(std::move(config_checksum)), version_(kVersion) {}

RunManifest RunManifest::load(const std::filesystem::path& file) {
  const Json j = load_json(file);
  RunManifest m;
  m.config_checksum_ = j.at("config_checksum").get<std::string>();
  m.version_ = j.value("version", std::string(kVersion));
  for (const auto& entry : j.at("files")) {
    const auto relpath = entry.at("path").get<std::string>();
    m.checksums_[relpath] = entry.at("checksum").get<std::string>();
    m.stages_[relpath] = entry.value("stage", std::string());
  }
  if (j.contains("timings"))
    for (const auto& [stage, seconds] : j.at("timings").items())
      m.timings_[stage] = seconds.get<double>();
  return m;
}

void RunManifest::save(const std::filesystem::path& file) const {
  Json files = Json::array();
  for (const auto& [relpath, checksum] : checksums_) {
    Json entry{{"path", relpath}, {"checksum", checksum}};
    const auto stage = stages_.find(relpath);
    if (stage != stages_.end()) entry["stage"] = stage->second;
    files.push_back(std::move(entry));
  }
  Json timings = Json::object();
  for (const auto& [stage, seconds] : timings_) timings[stage] = seconds;
  save_json(file, Json{{"config_checksum", config_checksum_},
                       {"version", version_},
                       {"files", files},
                       {"timings", timings}});
}

void RunManifest::record_file(const std::filesystem::path& outdir, const std::string& relpath,
                              const std::string& stage) {
  checksums_[relpath] = file_checksum(outdir / relpath);
  stages_[relpath] = stage;
}

void RunManifest::record_timing(const std::string& stage, double seconds) {
  timings_[stage] = seconds;
}

void RunManifest::require(const std::filesystem::path& outdir,
                          const std::vector<std::string>& relpaths) const {
  for (const auto& relpath : relpaths) {
    const auto it = checksums_.find(relpath);
    if (it == checksums_.end())
      throw MissingArtifactError("artifact not in manifest: " + relpath +
                                 " (run the producing stage first)");
    const auto file = outdir / relpath;
    if (!std::filesystem::exists(file))
      throw MissingArtifactError("missing artifact: " + file.string());
    if (file_checksum(file) != it->second)
      throw MissingArtifactError("artifact checksum mismatch: " + relpath);
  }
}

}  // namespace emunet
