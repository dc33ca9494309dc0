#include "amortized/checkpoint.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "amortized/csv.hpp"

namespace amortized {

using nlohmann::json;

std::string checkpoint_to_json(const LangevinSampler& sampler) {
  const auto& lambda = sampler.log_step();
  json rows = json::array();
  for (Eigen::Index t = 0; t < lambda.rows(); ++t) {
    json row = json::array();
    for (Eigen::Index j = 0; j < lambda.cols(); ++j) row.push_back(lambda(t, j));
    rows.push_back(std::move(row));
  }
  json doc = {
      {"format_version", kCheckpointFormatVersion},
      {"model", "langevin"},
      {"steps", sampler.steps()},
      {"dim", sampler.dim()},
      {"block_size", sampler.block_size()},
      {"scalar_step", sampler.scalar_step()},
      {"init", {{"mean", sampler.init().mean}, {"stddev", sampler.init().stddev}}},
      {"log_step", std::move(rows)},
  };
  return doc.dump(2) + "\n";
}

LangevinSampler checkpoint_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw CheckpointError(std::string("checkpoint is not valid JSON: ") + e.what());
  }
  try {
    if (!doc.is_object() || !doc.contains("format_version")) {
      throw CheckpointError("checkpoint has no format_version");
    }
    const int version = doc.at("format_version").get<int>();
    if (version != kCheckpointFormatVersion) {
      throw CheckpointError("unsupported checkpoint format_version " + std::to_string(version));
    }
    if (doc.at("model").get<std::string>() != "langevin") {
      throw CheckpointError("unsupported checkpoint model '" +
                            doc.at("model").get<std::string>() + "'");
    }
    const int steps = doc.at("steps").get<int>();
    const auto dim = doc.at("dim").get<Eigen::Index>();
    const int block_size = doc.at("block_size").get<int>();
    const bool scalar = doc.at("scalar_step").get<bool>();
    const InitDist init{doc.at("init").at("mean").get<double>(),
                        doc.at("init").at("stddev").get<double>()};
    LangevinSampler sampler(steps, dim, block_size, 0.0, scalar, init);

    const json& rows = doc.at("log_step");
    const Eigen::Index cols = scalar ? 1 : dim;
    if (!rows.is_array() || static_cast<int>(rows.size()) != steps) {
      throw CheckpointError("log_step must have one row per step");
    }
    Eigen::MatrixXd lambda(steps, cols);
    for (int t = 0; t < steps; ++t) {
      const json& row = rows.at(static_cast<std::size_t>(t));
      if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
        throw CheckpointError("log_step row " + std::to_string(t) + " has the wrong length");
      }
      for (Eigen::Index j = 0; j < cols; ++j) {
        lambda(t, j) = row.at(static_cast<std::size_t>(j)).get<double>();
      }
    }
    sampler.set_log_step(lambda);
    return sampler;
  } catch (const json::exception& e) {
    throw CheckpointError(std::string("malformed checkpoint: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw CheckpointError(std::string("invalid checkpoint: ") + e.what());
  }
}

void save_checkpoint(const std::string& path, const LangevinSampler& sampler) {
  const std::string text = checkpoint_to_json(sampler);
  write_file(path, [&](std::ostream& out) { out << text; });
}

LangevinSampler load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return checkpoint_from_json(text.str());
}

}  // namespace amortized
