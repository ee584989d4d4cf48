#include "simtuple/scene_io.hpp"

#include "simtuple/error.hpp"

#include <fstream>

namespace simtuple {

namespace {

nlohmann::json rows_to_json(const RowMatrix& m) {
  auto rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    rows.push_back(std::vector<double>(m.row(r).data(), m.row(r).data() + m.cols()));
  return rows;
}

RowMatrix rows_from_json(const nlohmann::json& rows, const char* field) {
  if (!rows.is_array() || rows.empty()) fail(ErrorCode::parse, std::string("scene: '") + field + "' must be a non-empty array");
  const auto S = static_cast<Eigen::Index>(rows.size());
  const auto T = static_cast<Eigen::Index>(rows[0].size());
  RowMatrix m(S, T);
  for (Eigen::Index r = 0; r < S; ++r) {
    const auto& row = rows[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != T)
      fail(ErrorCode::parse, std::string("scene: ragged '") + field + "' rows");
    for (Eigen::Index t = 0; t < T; ++t) m(r, t) = row[static_cast<std::size_t>(t)].get<double>();
  }
  return m;
}

}  // namespace

nlohmann::json scene_to_json(const Scene& scene) {
  nlohmann::json doc;
  doc["id"] = scene.id;
  doc["hz"] = scene.hz;
  auto roles = nlohmann::json::array();
  for (Role r : scene.roles) roles.push_back(std::string(to_string(r)));
  doc["roles"] = roles;
  doc["x"] = rows_to_json(scene.x);
  doc["y"] = rows_to_json(scene.y);
  nlohmann::json meta;
  meta["source"] = scene.meta.source;
  meta["offset_s"] = scene.meta.offset_s;
  if (scene.meta.archetype) meta["archetype"] = std::string(to_string(*scene.meta.archetype));
  doc["meta"] = meta;
  return doc;
}

Scene scene_from_json(const nlohmann::json& doc) {
  try {
    Scene scene;
    scene.id = doc.at("id").get<std::string>();
    scene.hz = doc.at("hz").get<double>();
    for (const auto& r : doc.at("roles")) scene.roles.push_back(role_from_string(r.get<std::string>()));
    scene.x = rows_from_json(doc.at("x"), "x");
    scene.y = rows_from_json(doc.at("y"), "y");
    if (scene.x.rows() != scene.y.rows() || scene.x.cols() != scene.y.cols() ||
        static_cast<std::size_t>(scene.x.rows()) != scene.roles.size())
      fail(ErrorCode::parse, "scene '" + scene.id + "': roles, x and y disagree in shape");
    if (doc.contains("meta")) {
      const auto& meta = doc["meta"];
      scene.meta.source = meta.value("source", "");
      scene.meta.offset_s = meta.value("offset_s", 0.0);
      if (meta.contains("archetype")) scene.meta.archetype = archetype_from_string(meta["archetype"].get<std::string>());
    }
    return scene;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::parse, std::string("scene: ") + e.what());
  }
}

void write_scene_archive(std::ostream& out, const std::vector<Scene>& scenes) {
  for (const auto& s : scenes) out << scene_to_json(s).dump() << '\n';
}

void write_scene_archive(const std::string& path, const std::vector<Scene>& scenes) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::io, "cannot open '" + path + "' for writing");
  write_scene_archive(out, scenes);
  if (!out) fail(ErrorCode::io, "failed writing '" + path + "'");
}

std::vector<Scene> read_scene_archive(std::istream& in) {
  std::vector<Scene> scenes;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::parse, "scene archive line " + std::to_string(lineno) + ": " + e.what());
    }
    scenes.push_back(scene_from_json(doc));
  }
  return scenes;
}

std::vector<Scene> read_scene_archive(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot open scene archive '" + path + "'");
  return read_scene_archive(in);
}

}  // namespace simtuple
