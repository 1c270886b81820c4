#pragma once

#include <fstream>
#include <span>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "nmp/gradcheck.hpp"
#include "nmp/nn.hpp"

namespace nmp {

struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

constexpr int kCheckpointFormat = 1;

inline nlohmann::json tensor_to_json(const Tensor2& t) {
  return {{"rows", t.rows}, {"cols", t.cols}, {"data", t.data}};
}

inline Tensor2 tensor_from_json(const nlohmann::json& j) {
  Tensor2 t;
  t.rows = j.at("rows").get<std::size_t>();
  t.cols = j.at("cols").get<std::size_t>();
  t.data = j.at("data").get<Vec>();
  if (t.data.size() != t.rows * t.cols)
    throw FormatError("tensor data length does not match rows*cols");
  return t;
}

// Checkpoint document: {"format": 1, "config": {...}, "params": {name: tensor}}.
inline void save_checkpoint_json(const nlohmann::json& config,
                                 std::span<const NamedParam> params,
                                 const std::string& path) {
  nlohmann::json doc;
  doc["format"] = kCheckpointFormat;
  doc["config"] = config;
  nlohmann::json& p = doc["params"] = nlohmann::json::object();
  for (const NamedParam& np : params) p[np.name] = tensor_to_json(np.param->value);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
  out << doc.dump(2) << "\n";
}

inline nlohmann::json load_checkpoint_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open checkpoint: " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("checkpoint is not valid JSON: " + std::string(e.what()));
  }
  if (!doc.is_object() || !doc.contains("format"))
    throw FormatError("checkpoint missing format field");
  if (doc["format"] != kCheckpointFormat)
    throw FormatError("unsupported checkpoint format version: " + doc["format"].dump());
  if (!doc.contains("params") || !doc["params"].is_object())
    throw FormatError("checkpoint missing params object");
  return doc;
}

// Fills existing parameters (shapes already allocated) from a checkpoint doc.
inline void restore_params(const nlohmann::json& doc, std::span<NamedParam> params) {
  const nlohmann::json& p = doc.at("params");
  for (NamedParam& np : params) {
    if (!p.contains(np.name)) throw FormatError("checkpoint missing parameter: " + np.name);
    Tensor2 t = tensor_from_json(p.at(np.name));
    if (!t.same_shape(np.param->value))
      throw FormatError("checkpoint shape mismatch for parameter: " + np.name);
    np.param->value = std::move(t);
  }
}

}  // namespace nmp
