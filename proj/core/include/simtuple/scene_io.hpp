#pragma once

#include "simtuple/scene.hpp"

#include <iosfwd>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

namespace simtuple {

nlohmann::json scene_to_json(const Scene& scene);
Scene scene_from_json(const nlohmann::json& doc);

/// Scene archives are JSON lines: one scene document per line.
void write_scene_archive(std::ostream& out, const std::vector<Scene>& scenes);
void write_scene_archive(const std::string& path, const std::vector<Scene>& scenes);
std::vector<Scene> read_scene_archive(std::istream& in);
std::vector<Scene> read_scene_archive(const std::string& path);

}  // namespace simtuple
