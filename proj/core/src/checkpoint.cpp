#include "simtuple/checkpoint.hpp"

#include "simtuple/error.hpp"

#include <fstream>
#include <sstream>

namespace simtuple {

namespace {

std::vector<double> to_vec(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

Eigen::VectorXd from_vec(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

nlohmann::json checkpoint_to_json(const EmbeddingModel& model) {
  const auto& a = model.arch;
  std::ostringstream rng;
  rng << model.rng;
  return {
      {"format", kCheckpointFormat},
      {"arch",
       {{"in_channels", a.in_channels},
        {"width", a.width},
        {"kernel", a.kernel},
        {"blocks", a.blocks},
        {"m", a.m},
        {"input_pool", a.input_pool}}},
      {"version", model.version},
      {"params", to_vec(model.params)},
      {"adam", {{"m", to_vec(model.adam.m)}, {"v", to_vec(model.adam.v)}, {"t", model.adam.t}}},
      {"rng", rng.str()},
  };
}

EmbeddingModel checkpoint_from_json(const nlohmann::json& doc) {
  try {
    if (doc.at("format").get<int>() != kCheckpointFormat)
      fail(ErrorCode::parse, "checkpoint: unsupported format " + doc.at("format").dump());
    EmbeddingModel model;
    const auto& a = doc.at("arch");
    model.arch.in_channels = a.at("in_channels").get<std::size_t>();
    model.arch.width = a.at("width").get<std::size_t>();
    model.arch.kernel = a.at("kernel").get<std::size_t>();
    model.arch.blocks = a.at("blocks").get<std::size_t>();
    model.arch.m = a.at("m").get<std::size_t>();
    model.arch.input_pool = a.at("input_pool").get<std::size_t>();
    model.version = doc.at("version").get<std::uint64_t>();
    model.params = from_vec(doc.at("params").get<std::vector<double>>());
    if (model.params.size() != static_cast<Eigen::Index>(model.arch.param_count()))
      fail(ErrorCode::parse, "checkpoint: parameter count does not match architecture");
    model.adam.m = from_vec(doc.at("adam").at("m").get<std::vector<double>>());
    model.adam.v = from_vec(doc.at("adam").at("v").get<std::vector<double>>());
    model.adam.t = doc.at("adam").at("t").get<std::uint64_t>();
    std::istringstream rng(doc.at("rng").get<std::string>());
    rng >> model.rng;
    if (!rng) fail(ErrorCode::parse, "checkpoint: malformed rng state");
    return model;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::parse, std::string("checkpoint: ") + e.what());
  }
}

void save_checkpoint(const EmbeddingModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::io, "cannot open '" + path + "' for writing");
  out << checkpoint_to_json(model).dump() << '\n';
  if (!out) fail(ErrorCode::io, "failed writing '" + path + "'");
}

EmbeddingModel load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot open checkpoint '" + path + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::parse, "checkpoint '" + path + "': " + e.what());
  }
  return checkpoint_from_json(doc);
}

}  // namespace simtuple
