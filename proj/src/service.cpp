#include "gbmcut/service.hpp"

#include <charconv>
#include <condition_variable>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <sstream>

#include "httplib.h"

#include "gbmcut/metaimage.hpp"
#include "gbmcut/segmenter.hpp"
#include "gbmcut/slice_image.hpp"
#include "gbmcut/summary.hpp"

namespace gbmcut {
namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr const char* kJson = "application/json";

// An error that maps directly to an HTTP status.
struct HttpError {
  int status;
  std::string message;
  std::string field;
};

void send_json(httplib::Response& res, int status, const ordered_json& body) {
  res.status = status;
  res.set_content(body.dump(), kJson);
}

void send_error(httplib::Response& res, const HttpError& e) {
  ordered_json body{{"error", e.message}};
  if (!e.field.empty()) body["field"] = e.field;
  send_json(res, e.status, body);
}

// "delta_r: must be >= 0" -> field "delta_r"
HttpError field_error(int status, const std::string& message) {
  const auto colon = message.find(':');
  std::string field;
  if (colon != std::string::npos && message.find(' ') > colon) field = message.substr(0, colon);
  return {status, message, field};
}

std::int64_t parse_index(const std::string& text) {
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec == std::errc::result_out_of_range) throw HttpError{416, "index out of range", "index"};
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw HttpError{400, "index must be an integer", "index"};
  }
  return v;
}

Axis parse_axis_or_throw(const std::string& text) {
  const auto axis = parse_axis(text);
  if (!axis) throw HttpError{400, "axis must be one of x, y, z", "axis"};
  return *axis;
}

double query_double(const httplib::Request& req, const char* key, double fallback) {
  if (!req.has_param(key)) return fallback;
  const std::string text = req.get_param_value(key);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
    throw HttpError{400, std::string(key) + " must be a number", key};
  }
  return v;
}

WindowLevel window_from_query(const httplib::Request& req, const Volume& volume) {
  const WindowLevel def = default_window(volume);
  return {query_double(req, "window", def.window), query_double(req, "level", def.level)};
}

void check_slice_index(const Geometry& g, Axis axis, std::int64_t index) {
  if (index < 0 || index >= axis_extent(g, axis)) {
    throw HttpError{416, "slice index " + std::to_string(index) + " outside [0, " +
                             std::to_string(axis_extent(g, axis)) + ")",
                    "index"};
  }
}

template <typename T>
void read_number(const ordered_json& body, const char* key, T& target) {
  if (!body.contains(key)) return;
  const auto& v = body.at(key);
  if constexpr (std::is_integral_v<T>) {
    if (!v.is_number_integer()) throw HttpError{422, std::string(key) + ": must be an integer", key};
  } else {
    if (!v.is_number()) throw HttpError{422, std::string(key) + ": must be a number", key};
  }
  target = v.get<T>();
}

struct SegmentRequest {
  Vec3 seed;
  SegmentationParams params;
};

SegmentRequest parse_segment_request(const std::string& text) {
  ordered_json body;
  try {
    body = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw HttpError{400, std::string("malformed JSON: ") + e.what(), ""};
  }
  if (!body.is_object()) throw HttpError{400, "body must be a JSON object", ""};
  // parameters may sit at top level or under "params"
  const ordered_json& params = body.contains("params") && body["params"].is_object() ? body["params"] : body;

  SegmentRequest out;
  if (!body.contains("seed_mm")) throw HttpError{422, "seed_mm: required", "seed_mm"};
  const auto& seed = body["seed_mm"];
  if (!seed.is_array() || seed.size() != 3 || !seed[0].is_number() || !seed[1].is_number() ||
      !seed[2].is_number()) {
    throw HttpError{422, "seed_mm: must be [x, y, z] in mm", "seed_mm"};
  }
  out.seed = {seed[0].get<double>(), seed[1].get<double>(), seed[2].get<double>()};
  read_number(params, "delta_r", out.params.delta_r);
  read_number(params, "subdivisions", out.params.subdivisions);
  read_number(params, "samples_per_ray", out.params.samples_per_ray);
  read_number(params, "max_radius_mm", out.params.max_radius_mm);
  read_number(params, "mean_region_d", out.params.mean_region_d);
  return out;
}

Volume parse_upload(const httplib::Request& req) {
  try {
    if (req.is_multipart_form_data()) {
      if (!req.has_file("header") || !req.has_file("data")) {
        throw HttpError{400, "multipart upload needs 'header' and 'data' parts", ""};
      }
      const std::string header = req.get_file_value("header").content;
      const std::string data = req.get_file_value("data").content;
      return parse_metaimage(header, &data);
    }
    if (req.body.empty()) throw HttpError{400, "empty body", ""};
    return parse_metaimage(req.body);
  } catch (const Error& e) {
    throw HttpError{400, e.what(), ""};
  }
}

std::string write_file(const fs::path& path, const std::string& bytes) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << bytes;
    if (!out) throw IoError("write failed: " + tmp.string());
  }
  fs::rename(tmp, path);
  return path.string();
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::uint64_t id_number(const std::string& id) {
  std::uint64_t n = 0;
  std::from_chars(id.data() + 1, id.data() + id.size(), n);
  return n;
}

}  // namespace

ServiceConfig config_from_env() {
  ServiceConfig config;
  if (const char* limit = std::getenv("GBMCUT_MAX_UPLOAD_BYTES")) {
    const std::string text = limit;
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || v == 0) {
      throw InvalidArgument("GBMCUT_MAX_UPLOAD_BYTES: must be a positive integer");
    }
    config.max_upload_bytes = v;
  }
  if (const char* dir = std::getenv("GBMCUT_DATA_DIR"); dir && *dir) config.data_dir = fs::path(dir);
  return config;
}

SessionStore::SessionStore(std::optional<fs::path> data_dir) : data_dir_(std::move(data_dir)) {
  if (data_dir_) {
    fs::create_directories(*data_dir_ / "volumes");
    fs::create_directories(*data_dir_ / "masks");
    load_from_disk();
  }
}

void SessionStore::load_from_disk() {
  const fs::path manifest = *data_dir_ / "manifest.json";
  if (!fs::exists(manifest)) return;
  const auto doc = ordered_json::parse(read_file(manifest));
  for (const auto& id : doc.value("volumes", ordered_json::array())) {
    const auto key = id.get<std::string>();
    volumes_[key] = std::make_shared<const Volume>(load_volume(*data_dir_ / "volumes" / (key + ".mha")));
    next_volume_ = std::max(next_volume_, id_number(key) + 1);
  }
  for (const auto& entry : doc.value("segmentations", ordered_json::array())) {
    const auto key = entry.at("id").get<std::string>();
    StoredSegmentation seg{entry.at("volume_id").get<std::string>(),
                           mask_from_volume(load_volume(*data_dir_ / "masks" / (key + ".mha"))),
                           entry.at("summary")};
    segmentations_[key] = std::make_shared<const StoredSegmentation>(std::move(seg));
    next_segmentation_ = std::max(next_segmentation_, id_number(key) + 1);
  }
}

void SessionStore::write_manifest() const {
  ordered_json doc;
  doc["volumes"] = ordered_json::array();
  for (const auto& [id, v] : volumes_) doc["volumes"].push_back(id);
  doc["segmentations"] = ordered_json::array();
  for (const auto& [id, s] : segmentations_) {
    doc["segmentations"].push_back({{"id", id}, {"volume_id", s->volume_id}, {"summary", s->summary}});
  }
  write_file(*data_dir_ / "manifest.json", doc.dump(2));
}

std::string SessionStore::add_volume(Volume volume) {
  auto stored = std::make_shared<const Volume>(std::move(volume));
  std::unique_lock lock(mutex_);
  const std::string id = "v" + std::to_string(next_volume_++);
  if (data_dir_) {
    write_file(*data_dir_ / "volumes" / (id + ".mha"), encode_volume_mha(*stored));
  }
  volumes_[id] = std::move(stored);
  if (data_dir_) write_manifest();
  return id;
}

std::string SessionStore::add_segmentation(StoredSegmentation segmentation) {
  auto stored = std::make_shared<const StoredSegmentation>(std::move(segmentation));
  std::unique_lock lock(mutex_);
  if (!volumes_.count(stored->volume_id)) throw InvalidArgument("unknown volume " + stored->volume_id);
  const std::string id = "s" + std::to_string(next_segmentation_++);
  if (data_dir_) write_file(*data_dir_ / "masks" / (id + ".mha"), encode_mask_mha(stored->mask));
  segmentations_[id] = std::move(stored);
  if (data_dir_) write_manifest();
  return id;
}

std::shared_ptr<const Volume> SessionStore::volume(const std::string& id) const {
  std::shared_lock lock(mutex_);
  const auto it = volumes_.find(id);
  return it == volumes_.end() ? nullptr : it->second;
}

std::shared_ptr<const StoredSegmentation> SessionStore::segmentation(const std::string& id) const {
  std::shared_lock lock(mutex_);
  const auto it = segmentations_.find(id);
  return it == segmentations_.end() ? nullptr : it->second;
}

std::size_t SessionStore::volume_count() const {
  std::shared_lock lock(mutex_);
  return volumes_.size();
}

std::size_t SessionStore::segmentation_count() const {
  std::shared_lock lock(mutex_);
  return segmentations_.size();
}

ordered_json volume_metadata(const std::string& id, const Volume& volume) {
  const Geometry& g = volume.geometry();
  const auto [lo, hi] = volume.min_max();
  return {{"id", id},
          {"dims", {g.dims[0], g.dims[1], g.dims[2]}},
          {"spacing", {g.spacing.x, g.spacing.y, g.spacing.z}},
          {"origin", {g.origin.x, g.origin.y, g.origin.z}},
          {"element_type", metaimage_name(volume.element_kind())},
          {"gray_min", lo},
          {"gray_max", hi}};
}

struct Service::Impl {
  explicit Impl(ServiceConfig cfg) : config(std::move(cfg)), store(config.data_dir) {}

  ServiceConfig config;
  SessionStore store;
  httplib::Server server;

  std::shared_ptr<const Volume> require_volume(const std::string& id) const {
    auto v = store.volume(id);
    if (!v) throw HttpError{404, "unknown volume " + id, ""};
    return v;
  }

  std::shared_ptr<const StoredSegmentation> require_segmentation(const std::string& id) const {
    auto s = store.segmentation(id);
    if (!s) throw HttpError{404, "unknown segmentation " + id, ""};
    return s;
  }

  template <typename F>
  httplib::Server::Handler guarded(F fn) {
    return [fn](const httplib::Request& req, httplib::Response& res) {
      try {
        fn(req, res);
      } catch (const HttpError& e) {
        send_error(res, e);
      } catch (const std::exception& e) {
        send_error(res, {500, e.what(), ""});
      }
    };
  }

  void install_routes() {
    server.set_payload_max_length(config.max_upload_bytes);
    server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
      if (!res.body.empty()) return httplib::Server::HandlerResponse::Unhandled;
      const char* message = res.status == 413 ? "payload exceeds the upload size limit"
                            : res.status == 404 ? "not found"
                                                : httplib::status_message(res.status);
      res.set_content(ordered_json{{"error", message}}.dump(), kJson);
      return httplib::Server::HandlerResponse::Handled;
    });

    server.Post("/api/v1/volumes", guarded([this](const httplib::Request& req, httplib::Response& res) {
      Volume volume = parse_upload(req);
      const std::string id = store.add_volume(std::move(volume));
      send_json(res, 201, volume_metadata(id, *store.volume(id)));
    }));

    server.Get(R"(/api/v1/volumes/([^/]+)/slices/([^/]+)/([^/]+))",
               guarded([this](const httplib::Request& req, httplib::Response& res) {
                 const auto volume = require_volume(req.matches[1]);
                 const Axis axis = parse_axis_or_throw(req.matches[2]);
                 const std::int64_t index = parse_index(req.matches[3]);
                 check_slice_index(volume->geometry(), axis, index);
                 const WindowLevel wl = window_from_query(req, *volume);
                 res.set_content(encode_png(render_slice(*volume, axis, index, wl)), "image/png");
               }));

    server.Post(R"(/api/v1/volumes/([^/]+)/segmentations)",
                guarded([this](const httplib::Request& req, httplib::Response& res) {
                  const std::string volume_id = req.matches[1];
                  const auto volume = require_volume(volume_id);
                  const SegmentRequest request = parse_segment_request(req.body);
                  std::optional<SegmentationResult> run;
                  try {
                    request.params.validate();
                    run.emplace(segment(*volume, request.seed, request.params));
                  } catch (const OutOfBounds& e) {
                    throw HttpError{422, std::string("seed_mm: ") + e.what(), "seed_mm"};
                  } catch (const InvalidArgument& e) {
                    throw field_error(422, e.what());
                  }
                  SegmentationResult& result = *run;
                  ordered_json summary = segmentation_summary(result, request.params, request.seed);
                  const std::string id = store.add_segmentation({volume_id, std::move(result.mask), summary});
                  ordered_json body{{"id", id}, {"volume_id", volume_id}};
                  for (const auto& [key, value] : summary.items()) body[key] = value;
                  send_json(res, 201, body);
                }));

    server.Get(R"(/api/v1/segmentations/([^/]+)/mask)",
               guarded([this](const httplib::Request& req, httplib::Response& res) {
                 const auto seg = require_segmentation(req.matches[1]);
                 res.set_header("Content-Disposition",
                                "attachment; filename=\"" + std::string(req.matches[1]) + ".mha\"");
                 res.set_content(encode_mask_mha(seg->mask), "application/octet-stream");
               }));

    server.Get(R"(/api/v1/segmentations/([^/]+)/overlays/([^/]+)/([^/]+))",
               guarded([this](const httplib::Request& req, httplib::Response& res) {
                 const auto seg = require_segmentation(req.matches[1]);
                 const auto volume = require_volume(seg->volume_id);
                 const Axis axis = parse_axis_or_throw(req.matches[2]);
                 const std::int64_t index = parse_index(req.matches[3]);
                 check_slice_index(volume->geometry(), axis, index);
                 const WindowLevel wl = window_from_query(req, *volume);
                 res.set_content(encode_png(render_overlay(*volume, seg->mask, axis, index, wl)), "image/png");
               }));
  }
};

Service::Service(ServiceConfig config) : impl_(std::make_unique<Impl>(std::move(config))) {
  impl_->install_routes();
}

Service::~Service() { stop(); }

int Service::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool Service::run() { return impl_->server.listen_after_bind(); }

void Service::stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

void Service::wait_until_ready() const { impl_->server.wait_until_ready(); }

SessionStore& Service::store() { return impl_->store; }

}  // namespace gbmcut
