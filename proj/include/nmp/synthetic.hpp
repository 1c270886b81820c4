#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "nmp/geometry.hpp"
#include "nmp/rng.hpp"
#include "nmp/scene.hpp"

namespace nmp {

// Geometric predicates of the synthetic world. Categories >= 4 are semantic
// predicates keyed off the (subject, object) category pair.
enum SyntheticPredicate : int {
  kAbove = 0,
  kBelow = 1,
  kNear = 2,
  kOverlaps = 3,
};

constexpr double kSyntheticImageSize = 1000.0;
constexpr double kAboveGapFraction = 0.05;   // of the image diagonal
constexpr double kNearDistance = 0.2;        // normalized distance bound
constexpr double kOverlapIou = 0.3;

struct SyntheticConfig {
  std::size_t num_scenes = 0;
  std::size_t objects_per_scene = 0;
  std::size_t num_categories = 8;
  std::size_t num_predicates = 6;
  std::size_t feature_dim = 64;  // length of the generated visual features
  std::uint64_t seed = 0;

  void validate() const {
    if (num_scenes < 1) throw std::invalid_argument("synthetic: num_scenes must be >= 1");
    if (objects_per_scene < 2)
      throw std::invalid_argument("synthetic: objects_per_scene must be >= 2");
    if (num_predicates < 4)
      throw std::invalid_argument("synthetic: num_predicates must be >= 4");
    if (num_categories < 1)
      throw std::invalid_argument("synthetic: num_categories must be >= 1");
    if (feature_dim < num_categories)
      throw std::invalid_argument("synthetic: feature_dim must cover num_categories");
  }
};

// Category-pair lookup for the semantic predicates (indices >= 4). Hash-based
// and independent of the generator seed, so train and test splits drawn with
// different seeds share the same semantics. Returns -1 when the pair carries
// no semantic predicate.
inline int semantic_predicate(int subject_cat, int object_cat,
                              std::size_t num_categories, std::size_t num_predicates) {
  if (num_predicates <= 4) return -1;
  const std::uint64_t key =
      (static_cast<std::uint64_t>(subject_cat) << 32) ^
      (static_cast<std::uint64_t>(object_cat) << 8) ^
      (num_categories * 1000003ULL) ^ num_predicates;
  const std::uint64_t h = splitmix64(key);
  if (h % 100 >= 30) return -1;  // ~30% of category pairs carry one
  return 4 + static_cast<int>((h >> 32) % (num_predicates - 4));
}

// Ground-truth rule for an ordered pair. Overlap is checked first, then the
// vertical rules, then nearness; precedence keeps each pair single-labeled.
// Returns -1 when no rule applies (the pair stays unannotated).
inline int synthetic_label(const BoundingBox& subject, const BoundingBox& object,
                           int subject_cat, int object_cat, const SyntheticConfig& cfg) {
  const int sem = semantic_predicate(subject_cat, object_cat, cfg.num_categories,
                                     cfg.num_predicates);
  if (sem >= 0) return sem;
  if (iou(subject, object) > kOverlapIou) return kOverlaps;
  const double diag = kSyntheticImageSize * std::sqrt(2.0);
  const double gap = kAboveGapFraction * diag;
  if (subject.cy() < object.cy() - gap) return kAbove;   // image y grows downward
  if (subject.cy() > object.cy() + gap) return kBelow;
  if (norm_distance(subject, object, kSyntheticImageSize, kSyntheticImageSize) < kNearDistance)
    return kNear;
  return -1;
}

// Re-derives whether an assigned label satisfies its own rule; the generator
// checks every emitted annotation against this.
inline bool synthetic_rule_holds(int label, const BoundingBox& subject,
                                 const BoundingBox& object, int subject_cat,
                                 int object_cat, const SyntheticConfig& cfg) {
  const double diag = kSyntheticImageSize * std::sqrt(2.0);
  const double gap = kAboveGapFraction * diag;
  const bool above = subject.cy() < object.cy() - gap;
  const bool below = subject.cy() > object.cy() + gap;
  switch (label) {
    case kAbove:
      return above;
    case kBelow:
      return below;
    case kNear:
      return !above && !below &&
             norm_distance(subject, object, kSyntheticImageSize, kSyntheticImageSize) <
                 kNearDistance;
    case kOverlaps:
      return iou(subject, object) > kOverlapIou;
    default:
      return label == semantic_predicate(subject_cat, object_cat, cfg.num_categories,
                                         cfg.num_predicates);
  }
}

// Deterministic synthetic scenes: boxes inside a 1000x1000 image, labels from
// the fixed rules above, visual features as noisy one-hots of the category.
inline std::vector<Scene> generate_synthetic(const SyntheticConfig& cfg) {
  cfg.validate();
  Rng rng(derive_seed(cfg.seed, "data"));
  std::vector<Scene> scenes;
  scenes.reserve(cfg.num_scenes);
  for (std::size_t si = 0; si < cfg.num_scenes; ++si) {
    Scene scene;
    scene.id = "syn-" + std::to_string(si);
    scene.image_w = kSyntheticImageSize;
    scene.image_h = kSyntheticImageSize;
    // Resample until at least one pair is related; training requires it and
    // with >= 2 objects the near rule makes empty scenes rare.
    for (int attempt = 0; attempt < 1000; ++attempt) {
      scene.objects.clear();
      scene.relations.clear();
      for (std::size_t oi = 0; oi < cfg.objects_per_scene; ++oi) {
        ObjectInstance obj;
        obj.category = static_cast<int>(rng.uniform_index(cfg.num_categories));
        // Near-square boxes keep absolute scale recoverable from the
        // normalized spatial features.
        const double size = rng.uniform(60.0, 140.0);
        const double aspect = rng.uniform(0.85, 1.18);
        obj.box.w = size * aspect;
        obj.box.h = size;
        obj.box.x = rng.uniform(0.0, kSyntheticImageSize - obj.box.w);
        obj.box.y = rng.uniform(0.0, kSyntheticImageSize - obj.box.h);
        Vec feat(cfg.feature_dim, 0.0);
        feat[static_cast<std::size_t>(obj.category)] = 1.0;
        for (double& v : feat) v += rng.normal(0.0, 0.1);
        obj.visual_feature = std::move(feat);
        scene.objects.push_back(std::move(obj));
      }
      for (std::size_t i = 0; i < scene.objects.size(); ++i) {
        for (std::size_t j = 0; j < scene.objects.size(); ++j) {
          if (i == j) continue;
          const ObjectInstance& a = scene.objects[i];
          const ObjectInstance& b = scene.objects[j];
          const int label = synthetic_label(a.box, b.box, a.category, b.category, cfg);
          if (label < 0) continue;
          if (!synthetic_rule_holds(label, a.box, b.box, a.category, b.category, cfg))
            throw std::logic_error("synthetic generator produced a rule-violating label");
          scene.relations.push_back({i, j, label});
        }
      }
      if (!scene.relations.empty()) break;
    }
    if (scene.relations.empty())
      throw std::runtime_error("synthetic generator failed to produce a related pair");
    scenes.push_back(std::move(scene));
  }
  validate_scenes(scenes);
  return scenes;
}

}  // namespace nmp
