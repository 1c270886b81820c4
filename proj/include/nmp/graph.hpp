#pragma once

#include <algorithm>
#include <map>
#include <utility>
#include <vector>

#include "nmp/geometry.hpp"
#include "nmp/scene.hpp"

namespace nmp {

// Relationship-mode thresholds (Eq. 1 of the message-passing model).
constexpr double kDefaultT1 = 0.45;  // normalized-distance threshold
constexpr double kDefaultT2 = 0.50;  // iou threshold

struct GraphEdge {
  std::size_t src = 0;
  std::size_t dst = 0;
  SpatialLocation spatial;
  std::vector<int> gold;  // annotated predicates; empty for unlabeled candidates
};

// Directed interaction graph over one scene's objects. Edges are unique
// ordered pairs without self-loops, sorted by (src, dst); (i,j) and (j,i)
// are distinct edges.
struct InteractionGraph {
  std::size_t num_nodes = 0;
  std::vector<GraphEdge> edges;
  std::vector<std::size_t> in_degree, out_degree;
  std::vector<std::vector<std::size_t>> incoming, outgoing;  // edge indices per node

  std::size_t num_edges() const { return edges.size(); }

  std::size_t labeled_edge_count() const {
    std::size_t n = 0;
    for (const GraphEdge& e : edges) n += !e.gold.empty();
    return n;
  }
};

// Eq. 1: an edge exists when the boxes are close or strongly overlapping.
// Symmetric in its arguments, so both directions appear or neither does.
inline bool edge_exists(const BoundingBox& b_i, const BoundingBox& b_j,
                        double image_w, double image_h,
                        double t1 = kDefaultT1, double t2 = kDefaultT2) {
  return norm_distance(b_i, b_j, image_w, image_h) < t1 || iou(b_i, b_j) > t2;
}

namespace detail {

inline InteractionGraph finalize_graph(
    const Scene& scene, std::map<std::pair<std::size_t, std::size_t>, std::vector<int>> pairs) {
  InteractionGraph g;
  g.num_nodes = scene.objects.size();
  g.in_degree.assign(g.num_nodes, 0);
  g.out_degree.assign(g.num_nodes, 0);
  g.incoming.assign(g.num_nodes, {});
  g.outgoing.assign(g.num_nodes, {});
  g.edges.reserve(pairs.size());
  for (auto& [pair, gold] : pairs) {  // map iteration is already (src, dst) sorted
    GraphEdge e;
    e.src = pair.first;
    e.dst = pair.second;
    std::sort(gold.begin(), gold.end());
    e.gold = std::move(gold);
    e.spatial = spatial_location(scene.objects[e.src].box, scene.objects[e.dst].box,
                                 scene.image_w, scene.image_h);
    const std::size_t idx = g.edges.size();
    g.outgoing[e.src].push_back(idx);
    g.incoming[e.dst].push_back(idx);
    ++g.out_degree[e.src];
    ++g.in_degree[e.dst];
    g.edges.push_back(std::move(e));
  }
  return g;
}

}  // namespace detail

// Predicate mode: one directed edge per distinct annotated (subject, object)
// pair; a pair with several annotated predicates yields one edge carrying
// all of them.
inline InteractionGraph build_predicate_graph(const Scene& scene) {
  std::map<std::pair<std::size_t, std::size_t>, std::vector<int>> pairs;
  for (const RelationAnnotation& r : scene.relations)
    pairs[{r.subject_idx, r.object_idx}].push_back(r.predicate);
  return detail::finalize_graph(scene, std::move(pairs));
}

// Relationship mode: every ordered pair passing Eq. 1 becomes a candidate
// edge. Gold predicates are attached where a candidate coincides with an
// annotated pair.
inline InteractionGraph build_relationship_graph(const Scene& scene,
                                                 double t1 = kDefaultT1,
                                                 double t2 = kDefaultT2) {
  std::map<std::pair<std::size_t, std::size_t>, std::vector<int>> pairs;
  for (std::size_t i = 0; i < scene.objects.size(); ++i)
    for (std::size_t j = 0; j < scene.objects.size(); ++j) {
      if (i == j) continue;
      if (edge_exists(scene.objects[i].box, scene.objects[j].box, scene.image_w,
                      scene.image_h, t1, t2))
        pairs[{i, j}];
    }
  for (const RelationAnnotation& r : scene.relations) {
    auto it = pairs.find({r.subject_idx, r.object_idx});
    if (it != pairs.end()) it->second.push_back(r.predicate);
  }
  return detail::finalize_graph(scene, std::move(pairs));
}

}  // namespace nmp
