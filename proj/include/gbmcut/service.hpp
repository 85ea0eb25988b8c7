#pragma once

// HTTP facade over the segmentation engine, versioned under /api/v1.
//
//   POST /api/v1/volumes                                   multipart {header, data} or .mha body
//   GET  /api/v1/volumes/{id}/slices/{axis}/{index}        ?window=&level=, PNG
//   POST /api/v1/volumes/{id}/segmentations                JSON {seed_mm, delta_r, ...}
//   GET  /api/v1/segmentations/{id}/mask                   .mha
//   GET  /api/v1/segmentations/{id}/overlays/{axis}/{index} ?window=&level=, PNG
//
// Errors are JSON {"error": ..., "field"?: ...}.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>

#include "json.hpp"

#include "gbmcut/volume.hpp"

namespace gbmcut {

struct ServiceConfig {
  std::size_t max_upload_bytes = std::size_t{512} << 20;
  // When set, uploads and masks are mirrored to disk with a manifest.json and
  // reloaded on start.
  std::optional<std::filesystem::path> data_dir;
};

// Reads GBMCUT_MAX_UPLOAD_BYTES and GBMCUT_DATA_DIR.
ServiceConfig config_from_env();

struct StoredSegmentation {
  std::string volume_id;
  Mask mask;
  nlohmann::ordered_json summary;
};

// Id -> immutable record maps. Lookups return shared pointers so a request
// keeps its record alive without holding the lock.
class SessionStore {
 public:
  explicit SessionStore(std::optional<std::filesystem::path> data_dir = std::nullopt);

  std::string add_volume(Volume volume);
  std::string add_segmentation(StoredSegmentation segmentation);
  [[nodiscard]] std::shared_ptr<const Volume> volume(const std::string& id) const;
  [[nodiscard]] std::shared_ptr<const StoredSegmentation> segmentation(const std::string& id) const;
  [[nodiscard]] std::size_t volume_count() const;
  [[nodiscard]] std::size_t segmentation_count() const;

 private:
  void load_from_disk();
  void write_manifest() const;  // caller holds the unique lock

  std::optional<std::filesystem::path> data_dir_;
  mutable std::shared_mutex mutex_;
  std::uint64_t next_volume_ = 1;
  std::uint64_t next_segmentation_ = 1;
  std::map<std::string, std::shared_ptr<const Volume>> volumes_;
  std::map<std::string, std::shared_ptr<const StoredSegmentation>> segmentations_;
};

// Metadata echoed by POST /volumes.
nlohmann::ordered_json volume_metadata(const std::string& id, const Volume& volume);

class Service {
 public:
  explicit Service(ServiceConfig config = {});
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  // Binds to host:port (port 0 picks a free one) and returns the bound port,
  // or -1 on failure.
  int bind(const std::string& host, int port);
  // Serves until stop(); call after bind().
  bool run();
  void stop();
  void wait_until_ready() const;

  [[nodiscard]] SessionStore& store();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace gbmcut
