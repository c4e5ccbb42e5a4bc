#pragma once

// ASCII PLY point clouds with optional per-vertex label and keypoint_id.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "eecal/error.hpp"
#include "eecal/geometry.hpp"

namespace eecal {

/// Coordinates are written as float32 values with 9 significant digits, so
/// a write-read cycle reproduces the file byte for byte.
inline std::string format_ply(const PointCloud& cloud) {
  cloud.validate();
  std::string out;
  out.reserve(64 + cloud.size() * 48);
  out += "ply\nformat ascii 1.0\nelement vertex " + std::to_string(cloud.size()) + "\n";
  out += "property float x\nproperty float y\nproperty float z\n";
  if (cloud.has_labels()) out += "property uchar label\n";
  if (cloud.has_keypoints()) out += "property int keypoint_id\n";
  out += "end_header\n";
  char buf[96];
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Vec3& p = cloud.points[i];
    int n = std::snprintf(buf, sizeof buf, "%.9g %.9g %.9g", static_cast<double>(static_cast<float>(p.x())),
                          static_cast<double>(static_cast<float>(p.y())),
                          static_cast<double>(static_cast<float>(p.z())));
    out.append(buf, static_cast<std::size_t>(n));
    if (cloud.has_labels()) {
      n = std::snprintf(buf, sizeof buf, " %d", static_cast<int>(cloud.labels[i]));
      out.append(buf, static_cast<std::size_t>(n));
    }
    if (cloud.has_keypoints()) {
      n = std::snprintf(buf, sizeof buf, " %d", cloud.keypoint_ids[i]);
      out.append(buf, static_cast<std::size_t>(n));
    }
    out += '\n';
  }
  return out;
}

inline void write_ply(const std::string& path, const PointCloud& cloud) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::Io, "cannot open " + path + " for writing");
  const std::string text = format_ply(cloud);
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!f) throw Error(ErrorKind::Io, "write failed: " + path);
}

/// Parses ASCII PLY text. x, y and z are required; label and keypoint_id are
/// read when present; other vertex properties are skipped.
inline PointCloud parse_ply(std::istream& in, const std::string& name = "<ply>") {
  const auto fail = [&](const std::string& why) { return Error(ErrorKind::Io, name + ": " + why); };
  std::string line;
  if (!std::getline(in, line) || line.rfind("ply", 0) != 0) throw fail("missing 'ply' magic");
  std::size_t n_vertices = 0;
  bool in_vertex = false;
  bool seen_vertex = false;
  bool ascii = false;
  std::vector<std::string> props;
  for (;;) {
    if (!std::getline(in, line)) throw fail("unterminated header");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::string word;
    ls >> word;
    if (word == "end_header") break;
    if (word == "format") {
      std::string fmt;
      ls >> fmt;
      ascii = fmt == "ascii";
    } else if (word == "element") {
      std::string ename;
      ls >> ename;
      in_vertex = ename == "vertex";
      if (in_vertex) {
        if (!(ls >> n_vertices)) throw fail("bad vertex count");
        seen_vertex = true;
      } else if (!seen_vertex) {
        throw fail("elements before 'vertex' are not supported");
      }
    } else if (word == "property" && in_vertex) {
      std::string type, pname;
      ls >> type;
      if (type == "list") throw fail("list properties are not supported on vertices");
      ls >> pname;
      props.push_back(pname);
    }
  }
  if (!ascii) throw fail("only ASCII PLY is supported");
  int ix = -1, iy = -1, iz = -1, il = -1, ik = -1;
  for (int i = 0; i < static_cast<int>(props.size()); ++i) {
    const std::string& p = props[static_cast<std::size_t>(i)];
    if (p == "x") ix = i;
    if (p == "y") iy = i;
    if (p == "z") iz = i;
    if (p == "label") il = i;
    if (p == "keypoint_id") ik = i;
  }
  if (ix < 0 || iy < 0 || iz < 0) throw fail("vertex element lacks x, y or z");

  PointCloud cloud;
  cloud.points.reserve(n_vertices);
  std::vector<double> values(props.size());
  for (std::size_t v = 0; v < n_vertices; ++v) {
    if (!std::getline(in, line)) throw fail("expected " + std::to_string(n_vertices) + " vertices");
    std::istringstream ls(line);
    for (double& x : values) {
      if (!(ls >> x)) throw fail("malformed vertex line " + std::to_string(v));
    }
    cloud.points.emplace_back(values[static_cast<std::size_t>(ix)], values[static_cast<std::size_t>(iy)],
                              values[static_cast<std::size_t>(iz)]);
    if (il >= 0) {
      const double l = values[static_cast<std::size_t>(il)];
      if (l != 0.0 && l != 1.0 && l != 2.0) throw fail("label out of range at vertex " + std::to_string(v));
      cloud.labels.push_back(static_cast<Label>(static_cast<int>(l)));
    }
    if (ik >= 0) cloud.keypoint_ids.push_back(static_cast<int>(values[static_cast<std::size_t>(ik)]));
  }
  try {
    cloud.validate();
  } catch (const Error& e) {
    throw fail(e.what());
  }
  return cloud;
}

inline PointCloud read_ply(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::Io, "cannot open " + path);
  return parse_ply(f, path);
}

}  // namespace eecal
