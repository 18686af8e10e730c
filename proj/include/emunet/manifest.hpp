#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "emunet/serialize.hpp"

namespace emunet {

// Ledger of everything a pipeline run emitted: config checksum, per-file
// content checksums and producing stage, and per-stage wall time. Stage
// commands verify their prerequisites against it before running.
class RunManifest {
 public:
  RunManifest() = default;
  explicit RunManifest(std::string config_checksum);

  static RunManifest load(const std::filesystem::path& file);
  void save(const std::filesystem::path& file) const;

  const std::string& config_checksum() const { return config_checksum_; }

  // Checksums the file on disk and records it under the producing stage.
  void record_file(const std::filesystem::path& outdir, const std::string& relpath,
                   const std::string& stage);
  void record_timing(const std::string& stage, double seconds);

  bool lists(const std::string& relpath) const { return checksums_.count(relpath) > 0; }
  const std::map<std::string, std::string>& files() const { return checksums_; }

  // Throws MissingArtifactError when a prerequisite is absent, unlisted, or
  // fails its checksum.
  void require(const std::filesystem::path& outdir,
               const std::vector<std::string>& relpaths) const;

 private:
  std::string config_checksum_;
  std::string version_;
  std::map<std::string, std::string> checksums_;  // relpath -> fnv1a
  std::map<std::string, std::string> stages_;     // relpath -> stage
  std::map<std::string, double> timings_;         // stage -> seconds
};

inline constexpr const char* kManifestFile = "manifest.json";

}  // namespace emunet
