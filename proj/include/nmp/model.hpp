#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nmp/autodiff.hpp"
#include "nmp/gradcheck.hpp"
#include "nmp/graph.hpp"
#include "nmp/scene.hpp"

namespace nmp {

// Model hyperparameters and ablation switches. The four flags mirror the
// feature axes A (visual), S (word), L (spatial), GRAPH (message passing).
struct NmpConfig {
  std::size_t num_predicates = 0;  // K
  std::size_t num_categories = 0;  // word-table rows
  std::size_t d_a = 64;            // visual feature dim
  std::size_t d_s = 50;            // word embedding dim
  std::size_t d_h = 64;            // hidden dim
  std::size_t mlp_hidden = 64;     // MLP hidden-layer width
  bool use_visual = true;
  bool use_word = true;
  bool use_spatial = true;
  bool use_graph = true;
  bool word_trainable = true;

  std::size_t node_dim() const {
    return (use_visual ? d_a : 0) + (use_word ? d_s : 0);
  }
  std::size_t classifier_dim() const {
    return d_h + (use_spatial ? SpatialLocation::kSize : 0);
  }

  void validate() const {
    if (num_predicates < 2)
      throw std::invalid_argument("config: num_predicates must be >= 2");
    if (!use_visual && !use_word)
      throw std::invalid_argument("config: at least one of visual/word features required");
    if (use_visual && d_a == 0) throw std::invalid_argument("config: d_a must be positive");
    if (use_word && (d_s == 0 || num_categories == 0))
      throw std::invalid_argument("config: word embedding needs d_s and num_categories");
    if (d_h == 0 || mlp_hidden == 0)
      throw std::invalid_argument("config: hidden dims must be positive");
  }

  friend bool operator==(const NmpConfig&, const NmpConfig&) = default;
};

inline nlohmann::json config_to_json(const NmpConfig& c) {
  return {{"num_predicates", c.num_predicates},
          {"num_categories", c.num_categories},
          {"d_a", c.d_a},
          {"d_s", c.d_s},
          {"d_h", c.d_h},
          {"mlp_hidden", c.mlp_hidden},
          {"use_visual", c.use_visual},
          {"use_word", c.use_word},
          {"use_spatial", c.use_spatial},
          {"use_graph", c.use_graph},
          {"word_trainable", c.word_trainable}};
}

inline NmpConfig config_from_json(const nlohmann::json& j) {
  NmpConfig c;
  c.num_predicates = j.at("num_predicates").get<std::size_t>();
  c.num_categories = j.at("num_categories").get<std::size_t>();
  c.d_a = j.at("d_a").get<std::size_t>();
  c.d_s = j.at("d_s").get<std::size_t>();
  c.d_h = j.at("d_h").get<std::size_t>();
  c.mlp_hidden = j.at("mlp_hidden").get<std::size_t>();
  c.use_visual = j.at("use_visual").get<bool>();
  c.use_word = j.at("use_word").get<bool>();
  c.use_spatial = j.at("use_spatial").get<bool>();
  c.use_graph = j.at("use_graph").get<bool>();
  c.word_trainable = j.at("word_trainable").get<bool>();
  return c;
}

// All trainable arrays of the network. f_v1, f_e2 and f_fusion exist even
// when use_graph is off; they simply receive no gradient then.
struct NmpParams {
  NmpConfig config;
  Mlp2 f_emb, f_e1, f_v1, f_e2, f_fusion;
  Param classifier_w, classifier_b;
  Param word_table;

  NmpParams() = default;

  explicit NmpParams(const NmpConfig& cfg)
      : config(cfg),
        f_emb(cfg.node_dim(), cfg.mlp_hidden, cfg.d_h),
        f_e1(2 * cfg.d_h, cfg.mlp_hidden, cfg.d_h),
        f_v1(2 * cfg.d_h, cfg.mlp_hidden, cfg.d_h),
        f_e2(2 * cfg.d_h, cfg.mlp_hidden, cfg.d_h),
        f_fusion(2 * cfg.d_h, cfg.mlp_hidden, cfg.d_h),
        classifier_w(cfg.num_predicates, cfg.classifier_dim()),
        classifier_b(cfg.num_predicates, 1),
        word_table(cfg.num_categories, cfg.d_s) {
    cfg.validate();
  }

  template <class F>
  void visit_params(F&& f) {
    f_emb.visit("f_emb", f);
    f_e1.visit("f_e1", f);
    f_v1.visit("f_v1", f);
    f_e2.visit("f_e2", f);
    f_fusion.visit("f_fusion", f);
    f("classifier.w", classifier_w);
    f("classifier.b", classifier_b);
    f("word_table", word_table);
  }

  std::vector<NamedParam> named_params() {
    std::vector<NamedParam> out;
    visit_params([&](const std::string& n, Param& p) { out.push_back({n, &p}); });
    return out;
  }

  void zero_grads() {
    visit_params([](const std::string&, Param& p) { p.zero_grad(); });
  }

  bool all_finite() {
    bool ok = true;
    visit_params([&](const std::string&, Param& p) { ok = ok && p.value.all_finite(); });
    return ok;
  }
};

// Glorot-uniform weights, zero biases. Draws happen in a fixed order for
// every parameter regardless of the ablation flags, keeping runs with the
// same seed byte-comparable.
inline NmpParams init_params(const NmpConfig& cfg, Rng& rng) {
  NmpParams p(cfg);
  p.f_emb.init(rng);
  p.f_e1.init(rng);
  p.f_v1.init(rng);
  p.f_e2.init(rng);
  p.f_fusion.init(rng);
  glorot_init(p.classifier_w.value, rng);
  p.classifier_b.value.fill(0.0);
  glorot_init(p.word_table.value, rng);
  return p;
}

using NodeIds = std::vector<Tape::Id>;

// Leaf nodes o_i = [a_i; s_i], assembled per the ablation flags. Word rows
// come from the trainable table, so gradients reach it through the tape.
inline NodeIds node_feature_inputs(Tape& t, const Scene& scene, NmpParams& p) {
  const NmpConfig& cfg = p.config;
  NodeIds ids;
  ids.reserve(scene.objects.size());
  for (const ObjectInstance& obj : scene.objects) {
    std::optional<Tape::Id> id;
    if (cfg.use_visual) {
      if (!obj.visual_feature)
        throw ValidationError("scene '" + scene.id +
                              "': object lacks a visual feature but the visual part is enabled");
      if (obj.visual_feature->size() != cfg.d_a)
        throw std::invalid_argument("visual feature length does not match config d_a");
      id = t.input(*obj.visual_feature);
    }
    if (cfg.use_word) {
      if (static_cast<std::size_t>(obj.category) >= cfg.num_categories)
        throw std::invalid_argument("object category outside the word table");
      const Tape::Id w = t.table_row(p.word_table, static_cast<std::size_t>(obj.category));
      id = id ? t.concat(*id, w) : w;
    }
    ids.push_back(*id);
  }
  return ids;
}

// o1_i = f_emb(o_i), per node.
inline NodeIds embed_nodes(Tape& t, const NodeIds& features, NmpParams& p) {
  NodeIds out;
  out.reserve(features.size());
  for (Tape::Id f : features) out.push_back(mlp2_tape(t, p.f_emb, f));
  return out;
}

// e1_ij = f_e1([o1_i; o1_j]); concatenation order is (source; target), which
// is what distinguishes the two directions of a pair.
inline NodeIds node_to_edge_1(Tape& t, const InteractionGraph& g, const NodeIds& o1,
                              NmpParams& p) {
  NodeIds out;
  out.reserve(g.edges.size());
  for (const GraphEdge& e : g.edges)
    out.push_back(mlp2_tape(t, p.f_e1, t.concat(o1[e.src], o1[e.dst])));
  return out;
}

// o2_i = f_v1([mean incoming e1; mean outgoing e1]). An empty side
// contributes a zero vector.
inline NodeIds edge_to_node(Tape& t, const InteractionGraph& g, const NodeIds& e1,
                            NmpParams& p) {
  NodeIds out;
  out.reserve(g.num_nodes);
  const std::size_t d = p.config.d_h;
  for (std::size_t i = 0; i < g.num_nodes; ++i) {
    NodeIds in_ids, out_ids;
    for (std::size_t idx : g.incoming[i]) in_ids.push_back(e1[idx]);
    for (std::size_t idx : g.outgoing[i]) out_ids.push_back(e1[idx]);
    const Tape::Id agg = t.concat(t.mean_of(std::move(in_ids), d),
                                  t.mean_of(std::move(out_ids), d));
    out.push_back(mlp2_tape(t, p.f_v1, agg));
  }
  return out;
}

// e2_ij = f_e2([o2_i; o2_j]), same direction convention as node_to_edge_1.
inline NodeIds node_to_edge_2(Tape& t, const InteractionGraph& g, const NodeIds& o2,
                              NmpParams& p) {
  NodeIds out;
  out.reserve(g.edges.size());
  for (const GraphEdge& e : g.edges)
    out.push_back(mlp2_tape(t, p.f_e2, t.concat(o2[e.src], o2[e.dst])));
  return out;
}

// e_ij = f_fusion([e1_ij; e2_ij]).
inline NodeIds fuse_edges(Tape& t, const NodeIds& e1, const NodeIds& e2, NmpParams& p) {
  if (e1.size() != e2.size())
    throw std::invalid_argument("fuse_edges: edge count mismatch");
  NodeIds out;
  out.reserve(e1.size());
  for (std::size_t i = 0; i < e1.size(); ++i)
    out.push_back(mlp2_tape(t, p.f_fusion, t.concat(e1[i], e2[i])));
  return out;
}

// y_ij = softmax(W [e_ij; l_ij] + b); l_ij enters only when use_spatial.
inline NodeIds classify_edges(Tape& t, const InteractionGraph& g, const NodeIds& e,
                              NmpParams& p) {
  NodeIds out;
  out.reserve(e.size());
  for (std::size_t i = 0; i < e.size(); ++i) {
    Tape::Id x = e[i];
    if (p.config.use_spatial) {
      const auto& l = g.edges[i].spatial.values;
      x = t.concat(x, t.input(Vec(l.begin(), l.end())));
    }
    out.push_back(t.softmax_op(t.affine(p.classifier_w, p.classifier_b, x)));
  }
  return out;
}

// Full composition: embed -> node2edge -> (edge2node -> node2edge -> fuse,
// when message passing is on) -> classify. Returns per-edge probability Ids.
inline NodeIds scene_forward(Tape& t, const Scene& scene, const InteractionGraph& g,
                             NmpParams& p) {
  const NodeIds feats = node_feature_inputs(t, scene, p);
  const NodeIds o1 = embed_nodes(t, feats, p);
  NodeIds e = node_to_edge_1(t, g, o1, p);
  if (p.config.use_graph) {
    const NodeIds o2 = edge_to_node(t, g, e, p);
    const NodeIds e2 = node_to_edge_2(t, g, o2, p);
    e = fuse_edges(t, e, e2, p);
  }
  return classify_edges(t, g, e, p);
}

// Per-edge predicate distributions, aligned with graph.edges.
struct EdgeScores {
  std::vector<Vec> probs;
};

inline EdgeScores forward(const Scene& scene, const InteractionGraph& g, NmpParams& p) {
  Tape t;
  const NodeIds ids = scene_forward(t, scene, g, p);
  EdgeScores s;
  s.probs.reserve(ids.size());
  for (Tape::Id id : ids) s.probs.push_back(t.value(id));
  return s;
}

}  // namespace nmp
