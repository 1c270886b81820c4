#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>

namespace nmp {

// Axis-aligned box in pixel coordinates; (x, y) is the top-left corner.
// Boxes with non-positive width or height are rejected at scene load, so
// the arithmetic below can assume w > 0 and h > 0.
struct BoundingBox {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  double cx() const { return x + w / 2.0; }
  double cy() const { return y + h / 2.0; }
  double right() const { return x + w; }
  double bottom() const { return y + h; }
  double area() const { return w * h; }

  bool valid() const {
    return std::isfinite(x) && std::isfinite(y) && std::isfinite(w) &&
           std::isfinite(h) && w > 0.0 && h > 0.0;
  }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

using BoxDelta = std::array<double, 4>;

// Spatial cue vector for an ordered pair of boxes:
// [delta(b_i,b_j); delta(b_i,b_ij); delta(b_j,b_ij); iou; dis]
// where b_ij is the union box. Always 14 components.
struct SpatialLocation {
  static constexpr std::size_t kSize = 14;
  std::array<double, kSize> values{};

  double operator[](std::size_t i) const { return values[i]; }
};

inline double iou(const BoundingBox& a, const BoundingBox& b) {
  const double iw = std::min(a.right(), b.right()) - std::max(a.x, b.x);
  const double ih = std::min(a.bottom(), b.bottom()) - std::max(a.y, b.y);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  return inter / (a.area() + b.area() - inter);
}

// Smallest axis-aligned box containing both inputs.
inline BoundingBox union_box(const BoundingBox& a, const BoundingBox& b) {
  const double x0 = std::min(a.x, b.x);
  const double y0 = std::min(a.y, b.y);
  const double x1 = std::max(a.right(), b.right());
  const double y1 = std::max(a.bottom(), b.bottom());
  return {x0, y0, x1 - x0, y1 - y0};
}

// Standard box-regression deltas: center shift relative to src size,
// log ratio of sizes.
inline BoxDelta box_delta(const BoundingBox& src, const BoundingBox& dst) {
  return {(dst.cx() - src.cx()) / src.w, (dst.cy() - src.cy()) / src.h,
          std::log(dst.w / src.w), std::log(dst.h / src.h)};
}

// Inverse transform: apply_delta(src, box_delta(src, dst)) == dst.
inline BoundingBox apply_delta(const BoundingBox& src, const BoxDelta& d) {
  const double cx = src.cx() + d[0] * src.w;
  const double cy = src.cy() + d[1] * src.h;
  const double w = src.w * std::exp(d[2]);
  const double h = src.h * std::exp(d[3]);
  return {cx - w / 2.0, cy - h / 2.0, w, h};
}

// Center distance normalized by the image diagonal.
inline double norm_distance(const BoundingBox& a, const BoundingBox& b,
                            double image_w, double image_h) {
  const double dx = a.cx() - b.cx();
  const double dy = a.cy() - b.cy();
  const double diag = std::sqrt(image_w * image_w + image_h * image_h);
  return std::sqrt(dx * dx + dy * dy) / diag;
}

inline SpatialLocation spatial_location(const BoundingBox& b_i,
                                        const BoundingBox& b_j, double image_w,
                                        double image_h) {
  const BoundingBox b_ij = union_box(b_i, b_j);
  const BoxDelta d_ij = box_delta(b_i, b_j);
  const BoxDelta d_iu = box_delta(b_i, b_ij);
  const BoxDelta d_ju = box_delta(b_j, b_ij);
  SpatialLocation l;
  for (std::size_t k = 0; k < 4; ++k) {
    l.values[k] = d_ij[k];
    l.values[4 + k] = d_iu[k];
    l.values[8 + k] = d_ju[k];
  }
  l.values[12] = iou(b_i, b_j);
  l.values[13] = norm_distance(b_i, b_j, image_w, image_h);
  return l;
}

}  // namespace nmp
