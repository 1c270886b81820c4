#include "nmp/geometry.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "nmp/rng.hpp"

using namespace nmp;

namespace {

// Independent arithmetic oracles, written against corner coordinates so they
// share no code with the library path.

double overlap_1d(double lo1, double hi1, double lo2, double hi2) {
  const double lo = lo1 > lo2 ? lo1 : lo2;
  const double hi = hi1 < hi2 ? hi1 : hi2;
  return hi > lo ? hi - lo : 0.0;
}

double iou_oracle(const BoundingBox& a, const BoundingBox& b) {
  const double inter = overlap_1d(a.x, a.x + a.w, b.x, b.x + b.w) *
                       overlap_1d(a.y, a.y + a.h, b.y, b.y + b.h);
  const double uni = a.w * a.h + b.w * b.h - inter;
  return inter / uni;
}

BoundingBox random_box(Rng& rng, double span = 100.0) {
  BoundingBox box;
  box.x = rng.uniform(-span, span);
  box.y = rng.uniform(-span, span);
  box.w = rng.uniform(0.5, span);
  box.h = rng.uniform(0.5, span);
  return box;
}

}  // namespace

TEST(Iou, SpecExamples) {
  const BoundingBox a{0, 0, 10, 10};
  EXPECT_NEAR(iou(a, a), 1.0, 1e-12);
  EXPECT_DOUBLE_EQ(iou(a, {100, 100, 5, 5}), 0.0);
  // inter 50, union 150
  EXPECT_NEAR(iou(a, {5, 0, 10, 10}), 1.0 / 3.0, 1e-12);
}

TEST(Iou, MatchesCellCountOnIntegerBoxes) {
  // On integer boxes the intersection/union areas are exact cell counts,
  // giving a genuinely brute-force oracle.
  Rng rng(11);
  for (int t = 0; t < 200; ++t) {
    BoundingBox a, b;
    a.x = std::floor(rng.uniform(0, 40));
    a.y = std::floor(rng.uniform(0, 40));
    a.w = std::floor(rng.uniform(1, 30));
    a.h = std::floor(rng.uniform(1, 30));
    b.x = std::floor(rng.uniform(0, 40));
    b.y = std::floor(rng.uniform(0, 40));
    b.w = std::floor(rng.uniform(1, 30));
    b.h = std::floor(rng.uniform(1, 30));
    long inter = 0, uni = 0;
    for (int cx = 0; cx < 80; ++cx) {
      for (int cy = 0; cy < 80; ++cy) {
        const bool in_a = cx >= a.x && cx < a.x + a.w && cy >= a.y && cy < a.y + a.h;
        const bool in_b = cx >= b.x && cx < b.x + b.w && cy >= b.y && cy < b.y + b.h;
        inter += in_a && in_b;
        uni += in_a || in_b;
      }
    }
    EXPECT_NEAR(iou(a, b), static_cast<double>(inter) / uni, 1e-12);
  }
}

TEST(Iou, SymmetricAndBounded) {
  Rng rng(7);
  for (int t = 0; t < 500; ++t) {
    const BoundingBox a = random_box(rng);
    const BoundingBox b = random_box(rng);
    const double v = iou(a, b);
    EXPECT_DOUBLE_EQ(v, iou(b, a));
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
    if (!(a == b)) EXPECT_LT(v, 1.0);
  }
}

TEST(UnionBox, SpecExamples) {
  const BoundingBox a{0, 0, 10, 10};
  const BoundingBox b{5, 0, 10, 10};
  EXPECT_EQ(union_box(a, a), a);
  EXPECT_EQ(union_box(a, b), (BoundingBox{0, 0, 15, 10}));
  EXPECT_EQ(union_box(a, b), union_box(b, a));
}

TEST(UnionBox, ContainsBothInputs) {
  Rng rng(13);
  for (int t = 0; t < 500; ++t) {
    const BoundingBox a = random_box(rng);
    const BoundingBox b = random_box(rng);
    const BoundingBox u = union_box(a, b);
    EXPECT_LE(u.x, std::min(a.x, b.x));
    EXPECT_LE(u.y, std::min(a.y, b.y));
    EXPECT_GE(u.right(), std::max(a.right(), b.right()));
    EXPECT_GE(u.bottom(), std::max(a.bottom(), b.bottom()));
  }
}

TEST(BoxDelta, SpecExamples) {
  const BoundingBox src{0, 0, 10, 10};
  const BoxDelta zero = box_delta(src, src);
  for (double v : zero) EXPECT_DOUBLE_EQ(v, 0.0);

  const BoxDelta shift = box_delta(src, {10, 0, 10, 10});
  EXPECT_DOUBLE_EQ(shift[0], 1.0);
  EXPECT_DOUBLE_EQ(shift[1], 0.0);
  EXPECT_DOUBLE_EQ(shift[2], 0.0);
  EXPECT_DOUBLE_EQ(shift[3], 0.0);

  const BoxDelta grow = box_delta(src, {0, 0, 20, 10});
  EXPECT_DOUBLE_EQ(grow[0], 0.5);
  EXPECT_DOUBLE_EQ(grow[1], 0.0);
  EXPECT_NEAR(grow[2], std::log(2.0), 1e-15);
  EXPECT_DOUBLE_EQ(grow[3], 0.0);
}

TEST(BoxDelta, ApplyDeltaInverts) {
  Rng rng(17);
  for (int t = 0; t < 500; ++t) {
    const BoundingBox src = random_box(rng);
    const BoundingBox dst = random_box(rng);
    const BoundingBox back = apply_delta(src, box_delta(src, dst));
    const double scale = std::max({std::abs(dst.x), std::abs(dst.y), dst.w, dst.h, 1.0});
    EXPECT_NEAR(back.x, dst.x, 1e-9 * scale);
    EXPECT_NEAR(back.y, dst.y, 1e-9 * scale);
    EXPECT_NEAR(back.w, dst.w, 1e-9 * scale);
    EXPECT_NEAR(back.h, dst.h, 1e-9 * scale);
  }
}

TEST(NormDistance, SpecExamples) {
  const BoundingBox a{10, 20, 4, 6};
  EXPECT_DOUBLE_EQ(norm_distance(a, a, 100, 100), 0.0);

  // centers at (0,0) and (image_w, image_h): the full diagonal
  const BoundingBox c0{-1, -1, 2, 2};
  const BoundingBox c1{99, 99, 2, 2};
  EXPECT_NEAR(norm_distance(c0, c1, 100, 100), 1.0, 1e-12);

  const BoundingBox p{-5, -5, 10, 10};   // center (0, 0)
  const BoundingBox q{25, 35, 10, 10};   // center (30, 40)
  EXPECT_NEAR(norm_distance(p, q, 100, 100), 50.0 / std::sqrt(20000.0), 1e-12);
}

TEST(NormDistance, SymmetricTriangleInequality) {
  Rng rng(19);
  for (int t = 0; t < 300; ++t) {
    const BoundingBox a = random_box(rng);
    const BoundingBox b = random_box(rng);
    const BoundingBox c = random_box(rng);
    const double ab = norm_distance(a, b, 640, 480);
    const double bc = norm_distance(b, c, 640, 480);
    const double ac = norm_distance(a, c, 640, 480);
    EXPECT_DOUBLE_EQ(ab, norm_distance(b, a, 640, 480));
    EXPECT_LE(ac, ab + bc + 1e-12);
  }
}

TEST(SpatialLocation, IdenticalBoxes) {
  const BoundingBox a{3, 4, 10, 20};
  const SpatialLocation l = spatial_location(a, a, 100, 100);
  for (std::size_t k = 0; k < 12; ++k) EXPECT_DOUBLE_EQ(l[k], 0.0);
  EXPECT_NEAR(l[12], 1.0, 1e-12);
  EXPECT_DOUBLE_EQ(l[13], 0.0);
}

TEST(SpatialLocation, DirectionSensitive) {
  const BoundingBox a{0, 0, 10, 10};
  const BoundingBox b{5, 0, 10, 10};
  const SpatialLocation ab = spatial_location(a, b, 100, 100);
  const SpatialLocation ba = spatial_location(b, a, 100, 100);
  EXPECT_NE(ab.values, ba.values);
}

TEST(SpatialLocation, ComposedSpecExample) {
  const BoundingBox b_i{0, 0, 10, 10};
  const BoundingBox b_j{5, 0, 10, 10};
  const SpatialLocation l = spatial_location(b_i, b_j, 100, 100);
  EXPECT_DOUBLE_EQ(l[0], 0.5);
  EXPECT_DOUBLE_EQ(l[1], 0.0);
  EXPECT_DOUBLE_EQ(l[2], 0.0);
  EXPECT_DOUBLE_EQ(l[3], 0.0);
  EXPECT_NEAR(l[12], 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(l[13], 5.0 / std::sqrt(20000.0), 1e-12);
}

TEST(SpatialLocation, AlwaysFiniteLength14) {
  Rng rng(23);
  for (int t = 0; t < 500; ++t) {
    const SpatialLocation l = spatial_location(random_box(rng), random_box(rng), 1000, 800);
    ASSERT_EQ(l.values.size(), 14u);
    for (double v : l.values) EXPECT_TRUE(std::isfinite(v));
    EXPECT_GE(l[12], 0.0);
    EXPECT_LE(l[12], 1.0);
    EXPECT_GE(l[13], 0.0);
  }
}

TEST(GeometryOracles, ThousandRandomPairs) {
  Rng rng(29);
  double max_err = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const BoundingBox a = random_box(rng);
    const BoundingBox b = random_box(rng);
    max_err = std::max(max_err, std::abs(iou(a, b) - iou_oracle(a, b)));

    const BoundingBox u = union_box(a, b);
    max_err = std::max(max_err, std::abs(u.x - std::min(a.x, b.x)));
    max_err = std::max(max_err, std::abs(u.y - std::min(a.y, b.y)));
    max_err = std::max(max_err, std::abs(u.right() - std::max(a.x + a.w, b.x + b.w)));
    max_err = std::max(max_err, std::abs(u.bottom() - std::max(a.y + a.h, b.y + b.h)));

    const BoxDelta d = box_delta(a, b);
    max_err = std::max(max_err, std::abs(d[0] - ((b.x + b.w / 2) - (a.x + a.w / 2)) / a.w));
    max_err = std::max(max_err, std::abs(d[1] - ((b.y + b.h / 2) - (a.y + a.h / 2)) / a.h));
    max_err = std::max(max_err, std::abs(d[2] - (std::log(b.w) - std::log(a.w))));
    max_err = std::max(max_err, std::abs(d[3] - (std::log(b.h) - std::log(a.h))));

    const double dx = (a.x + a.w / 2) - (b.x + b.w / 2);
    const double dy = (a.y + a.h / 2) - (b.y + b.h / 2);
    max_err = std::max(max_err, std::abs(norm_distance(a, b, 640, 480) -
                                         std::hypot(dx, dy) / std::hypot(640.0, 480.0)));
  }
  EXPECT_LT(max_err, 1e-9);
}
