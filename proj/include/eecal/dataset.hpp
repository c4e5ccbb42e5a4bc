#pragma once

// Dataset directory: manifest.json, background.ply and one PLY per frame.

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "eecal/error.hpp"
#include "eecal/json_io.hpp"
#include "eecal/parallel.hpp"
#include "eecal/ply.hpp"
#include "eecal/simulator.hpp"

namespace eecal {

inline constexpr const char* kManifestName = "manifest.json";
inline constexpr const char* kBackgroundName = "background.ply";

inline std::string frame_file_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "frame_%04zu.ply", index);
  return buf;
}

inline Json manifest_json(const Dataset& ds) {
  Json frames = Json::array();
  for (std::size_t i = 0; i < ds.frames.size(); ++i) {
    frames.push_back({{"file", frame_file_name(i)},
                      {"config_id", ds.frames[i].config_id},
                      {"t_b_ee", pose_json(ds.frames[i].t_b_ee)}});
  }
  Json j{{"scenario", scenario_json(ds.scenario)}};
  if (ds.gt_calibration) j["gt_calibration"] = pose_json(*ds.gt_calibration);
  j["background"] = kBackgroundName;
  j["frames"] = frames;
  j["warnings"] = ds.warnings;
  return j;
}

inline void save_dataset(const std::filesystem::path& dir, const Dataset& ds, unsigned jobs = 1) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create " + dir.string() + ": " + ec.message());
  write_ply((dir / kBackgroundName).string(), ds.background_cloud);
  parallel_for(ds.frames.size(), jobs,
               [&](std::size_t i) { write_ply((dir / frame_file_name(i)).string(), ds.frames[i].cloud); });
  write_text_file((dir / kManifestName).string(), manifest_json(ds).dump(2) + "\n");
}

/// Missing files and malformed content raise Io; a missing gt_calibration
/// simply leaves Dataset::gt_calibration empty.
inline Dataset load_dataset(const std::filesystem::path& dir, unsigned jobs = 1) {
  const std::filesystem::path manifest = dir / kManifestName;
  if (!std::filesystem::is_regular_file(manifest)) throw Error(ErrorKind::Io, "no " + manifest.string());
  Json j;
  try {
    j = Json::parse(read_text_file(manifest.string()));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::Io, manifest.string() + ": " + e.what());
  }
  Dataset ds;
  std::vector<std::string> files;
  try {
    ObjectReader r(j, "manifest");
    ds.scenario = scenario_from_json(r.raw("scenario"));
    if (r.has("gt_calibration")) {
      ds.gt_calibration = pose_from_json(r.raw("gt_calibration"), "manifest.gt_calibration");
      ds.scenario.gt_calibration = *ds.gt_calibration;
    }
    std::string background = kBackgroundName;
    r.read("background", background);
    r.read("warnings", ds.warnings);
    const Json& frames = r.raw("frames");
    if (!frames.is_array()) throw Error(ErrorKind::Config, "manifest.frames must be an array");
    for (std::size_t i = 0; i < frames.size(); ++i) {
      ObjectReader fr(frames[i], "manifest.frames[" + std::to_string(i) + "]");
      Frame f;
      files.push_back(fr.require<std::string>("file"));
      f.config_id = fr.require<int>("config_id");
      f.t_b_ee = pose_from_json(fr.raw("t_b_ee"), fr.join("t_b_ee"));
      fr.finish();
      ds.frames.push_back(std::move(f));
    }
    r.finish();
    if (std::filesystem::exists(dir / background)) ds.background_cloud = read_ply((dir / background).string());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Io) throw;
    throw Error(ErrorKind::Io, manifest.string() + ": " + e.what());
  }
  parallel_for(ds.frames.size(), jobs, [&](std::size_t i) { ds.frames[i].cloud = read_ply((dir / files[i]).string()); });
  return ds;
}

}  // namespace eecal
