#pragma once

#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "nmp/geometry.hpp"
#include "nmp/tensor.hpp"

namespace nmp {

// Thrown when an input file violates the scene data model. The message lists
// every violation found, not just the first.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ObjectInstance {
  BoundingBox box;
  int category = 0;
  std::optional<Vec> visual_feature;
  std::optional<double> detection_score;

  friend bool operator==(const ObjectInstance&, const ObjectInstance&) = default;
};

struct RelationAnnotation {
  std::size_t subject_idx = 0;
  std::size_t object_idx = 0;
  int predicate = 0;

  friend bool operator==(const RelationAnnotation&, const RelationAnnotation&) = default;
};

// One image record. Image dimensions travel with the scene because the
// normalized distance divides by the image diagonal.
struct Scene {
  std::string id;
  double image_w = 0.0;
  double image_h = 0.0;
  std::vector<ObjectInstance> objects;
  std::vector<RelationAnnotation> relations;

  friend bool operator==(const Scene&, const Scene&) = default;
};

// (subject category, predicate, object category) combination; the unit of
// the zero-shot split.
struct TripletType {
  int subject_category = 0;
  int predicate = 0;
  int object_category = 0;

  auto operator<=>(const TripletType&) const = default;
};

inline std::vector<std::string> validate_scene(const Scene& s) {
  std::vector<std::string> errs;
  auto fail = [&](const std::string& what) {
    errs.push_back("scene '" + s.id + "': " + what);
  };
  if (!(s.image_w > 0.0) || !(s.image_h > 0.0) ||
      !std::isfinite(s.image_w) || !std::isfinite(s.image_h))
    fail("image dimensions must be positive and finite");
  std::optional<std::size_t> feature_dim;
  for (std::size_t i = 0; i < s.objects.size(); ++i) {
    const ObjectInstance& o = s.objects[i];
    const std::string tag = "objects[" + std::to_string(i) + "]";
    if (!o.box.valid()) fail(tag + ".box must have finite x,y and w,h > 0");
    if (o.category < 0) fail(tag + ".category must be non-negative");
    if (o.visual_feature) {
      if (!feature_dim) feature_dim = o.visual_feature->size();
      if (o.visual_feature->size() != *feature_dim)
        fail(tag + ".visual_feature length differs from other objects");
      for (double v : *o.visual_feature)
        if (!std::isfinite(v)) {
          fail(tag + ".visual_feature has non-finite entries");
          break;
        }
    }
    if (o.detection_score && !(*o.detection_score >= 0.0 && *o.detection_score <= 1.0))
      fail(tag + ".score must lie in [0, 1]");
  }
  std::set<std::tuple<std::size_t, std::size_t, int>> seen;
  for (std::size_t i = 0; i < s.relations.size(); ++i) {
    const RelationAnnotation& r = s.relations[i];
    const std::string tag = "relations[" + std::to_string(i) + "]";
    if (r.subject_idx >= s.objects.size() || r.object_idx >= s.objects.size()) {
      fail(tag + " references an object index out of range");
      continue;
    }
    if (r.subject_idx == r.object_idx) fail(tag + " is a self-relation");
    if (r.predicate < 0) fail(tag + ".pred must be non-negative");
    if (!seen.insert({r.subject_idx, r.object_idx, r.predicate}).second)
      fail(tag + " duplicates an earlier (sub, obj, pred) triplet");
  }
  return errs;
}

inline void validate_scenes(const std::vector<Scene>& scenes) {
  std::vector<std::string> errs;
  for (const Scene& s : scenes) {
    auto e = validate_scene(s);
    errs.insert(errs.end(), e.begin(), e.end());
  }
  if (!errs.empty()) {
    std::ostringstream msg;
    msg << errs.size() << " validation error(s):";
    for (const std::string& e : errs) msg << "\n  " << e;
    throw ValidationError(msg.str());
  }
}

inline nlohmann::json scene_to_json(const Scene& s) {
  nlohmann::json objects = nlohmann::json::array();
  for (const ObjectInstance& o : s.objects) {
    nlohmann::json jo = {{"x", o.box.x},         {"y", o.box.y},
                         {"w", o.box.w},         {"h", o.box.h},
                         {"category", o.category}};
    if (o.visual_feature) jo["visual_feature"] = *o.visual_feature;
    if (o.detection_score) jo["score"] = *o.detection_score;
    objects.push_back(std::move(jo));
  }
  nlohmann::json relations = nlohmann::json::array();
  for (const RelationAnnotation& r : s.relations)
    relations.push_back({{"sub", r.subject_idx}, {"obj", r.object_idx}, {"pred", r.predicate}});
  return {{"id", s.id},
          {"image_w", s.image_w},
          {"image_h", s.image_h},
          {"objects", std::move(objects)},
          {"relations", std::move(relations)}};
}

inline Scene scene_from_json(const nlohmann::json& j) {
  Scene s;
  s.id = j.at("id").get<std::string>();
  s.image_w = j.at("image_w").get<double>();
  s.image_h = j.at("image_h").get<double>();
  for (const nlohmann::json& jo : j.at("objects")) {
    ObjectInstance o;
    o.box = {jo.at("x").get<double>(), jo.at("y").get<double>(),
             jo.at("w").get<double>(), jo.at("h").get<double>()};
    o.category = jo.at("category").get<int>();
    if (jo.contains("visual_feature")) o.visual_feature = jo.at("visual_feature").get<Vec>();
    if (jo.contains("score")) o.detection_score = jo.at("score").get<double>();
    s.objects.push_back(std::move(o));
  }
  for (const nlohmann::json& jr : j.at("relations")) {
    RelationAnnotation r;
    r.subject_idx = jr.at("sub").get<std::size_t>();
    r.object_idx = jr.at("obj").get<std::size_t>();
    r.predicate = jr.at("pred").get<int>();
    s.relations.push_back(r);
  }
  return s;
}

inline void save_scenes(const std::vector<Scene>& scenes, const std::string& path) {
  nlohmann::json doc;
  nlohmann::json& arr = doc["scenes"] = nlohmann::json::array();
  for (const Scene& s : scenes) arr.push_back(scene_to_json(s));
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write scene file: " + path);
  out << doc.dump(1) << "\n";
}

// Loads and validates a scene file; any violation fails the whole load.
inline std::vector<Scene> load_scenes(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open scene file: " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("scene file is not valid JSON: " + std::string(e.what()));
  }
  std::vector<Scene> scenes;
  try {
    for (const nlohmann::json& js : doc.at("scenes")) scenes.push_back(scene_from_json(js));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("scene file does not match the schema: " + std::string(e.what()));
  }
  validate_scenes(scenes);
  return scenes;
}

// Word-embedding lookup table, one row per category.
struct EmbeddingTable {
  std::size_t num_categories = 0;
  std::size_t dim = 0;
  Tensor2 rows;  // num_categories x dim
  bool trainable = true;
};

// Embedding file schema: {"dim": D, "rows": [[...], ...]}.
inline EmbeddingTable load_embedding_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open embedding file: " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("embedding file is not valid JSON: " + std::string(e.what()));
  }
  EmbeddingTable t;
  t.dim = doc.at("dim").get<std::size_t>();
  const nlohmann::json& rows = doc.at("rows");
  t.num_categories = rows.size();
  t.rows = Tensor2(t.num_categories, t.dim);
  for (std::size_t r = 0; r < t.num_categories; ++r) {
    Vec row = rows[r].get<Vec>();
    if (row.size() != t.dim)
      throw ValidationError("embedding row " + std::to_string(r) + " has wrong length");
    for (std::size_t c = 0; c < t.dim; ++c) t.rows.at(r, c) = row[c];
  }
  return t;
}

// o_i = [a_i; s_i]; either part can be disabled by the ablation flags.
inline Vec resolve_object_embedding(const ObjectInstance& obj, const EmbeddingTable& words,
                                    bool use_visual = true, bool use_word = true) {
  Vec o;
  if (use_visual) {
    if (!obj.visual_feature)
      throw ValidationError("object lacks a visual feature but the visual part is enabled");
    o = *obj.visual_feature;
  }
  if (use_word) {
    if (static_cast<std::size_t>(obj.category) >= words.num_categories)
      throw ValidationError("object category not covered by the embedding table");
    const std::size_t r = static_cast<std::size_t>(obj.category);
    o.insert(o.end(), words.rows.data.begin() + r * words.dim,
             words.rows.data.begin() + (r + 1) * words.dim);
  }
  return o;
}

struct RelationRef {
  std::size_t scene_idx = 0;
  std::size_t relation_idx = 0;

  friend bool operator==(const RelationRef&, const RelationRef&) = default;
};

struct ZeroShotSplit {
  std::vector<RelationRef> seen;
  std::vector<RelationRef> unseen;
  std::set<TripletType> unseen_types;  // types in test never observed in train
};

inline TripletType triplet_type_of(const Scene& s, const RelationAnnotation& r) {
  return {s.objects[r.subject_idx].category, r.predicate,
          s.objects[r.object_idx].category};
}

// Partitions test relations into seen/unseen by (subject category, predicate,
// object category) membership in the training set. Exhaustive and disjoint.
inline ZeroShotSplit zero_shot_split(const std::vector<Scene>& train,
                                     const std::vector<Scene>& test) {
  std::set<TripletType> train_types;
  for (const Scene& s : train)
    for (const RelationAnnotation& r : s.relations) train_types.insert(triplet_type_of(s, r));
  ZeroShotSplit out;
  for (std::size_t si = 0; si < test.size(); ++si) {
    const Scene& s = test[si];
    for (std::size_t ri = 0; ri < s.relations.size(); ++ri) {
      const TripletType t = triplet_type_of(s, s.relations[ri]);
      if (train_types.contains(t)) {
        out.seen.push_back({si, ri});
      } else {
        out.unseen.push_back({si, ri});
        out.unseen_types.insert(t);
      }
    }
  }
  return out;
}

}  // namespace nmp
