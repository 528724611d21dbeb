#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "diskcover/types.hpp"

using namespace diskcover;

namespace {

DiskSet make(int n, int m, AssocKind kind) {
  std::vector<Point> centers(static_cast<std::size_t>(n), Point{5.0, 5.0});
  std::vector<double> sigmas(static_cast<std::size_t>(m), 2.0);
  return DiskSet(centers, sigmas, make_assoc(n, m, kind));
}

bool has(const std::vector<std::string>& v, const std::string& s) { return std::find(v.begin(), v.end(), s) != v.end(); }

}  // namespace

TEST(RadiusIndex, SharedSigmaMapsEveryCenterToZero) {
  const DiskSet d = make(5, 1, AssocKind::shared);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(radius_index(d, i), 0);
}

TEST(RadiusIndex, IndividualIsIdentity) {
  const DiskSet d = make(6, 6, AssocKind::individual);
  for (std::size_t i = 0; i < 6; ++i) EXPECT_EQ(radius_index(d, i), static_cast<int>(i));
}

TEST(RadiusIndex, GroupedBlocks) {
  const DiskSet d = make(4, 2, AssocKind::grouped);
  EXPECT_EQ(radius_index(d, 0), 0);
  EXPECT_EQ(radius_index(d, 1), 0);
  EXPECT_EQ(radius_index(d, 2), 1);
  EXPECT_EQ(radius_index(d, 3), 1);
}

TEST(RadiusIndex, GroupedRemainderGoesToLastBlock) {
  EXPECT_EQ(make_assoc(7, 3, AssocKind::grouped), (std::vector<int>{0, 0, 1, 1, 2, 2, 2}));
}

TEST(RadiusIndex, OutOfRangeIsContractViolation) {
  const DiskSet d = make(3, 3, AssocKind::individual);
  try {
    radius_index(d, 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ContractViolation);
  }
}

TEST(DiskSet, RejectsInvalidSets) {
  const auto code_of = [](auto&& build) {
    try {
      build();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::Usage;
  };
  EXPECT_EQ(code_of([] { DiskSet({}, {}, {}); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([] { DiskSet({{1, 1}}, {0.0}, {0}); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([] { DiskSet({{1, 1}}, {-1.0}, {0}); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([] { DiskSet({{std::nan(""), 1}}, {1.0}, {0}); }), ErrorCode::NonFinite);
  EXPECT_EQ(code_of([] { DiskSet({{1, 1}, {2, 2}}, {1.0, 2.0}, {0, 0}); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([] { DiskSet({{1, 1}}, {1.0}, {1}); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([] { DiskSet({{1, 1}}, {1.0}, {0, 0}); }), ErrorCode::InvalidArgument);
}

TEST(Validate, PaperOperatingPointIsValid) {
  FitConfig c;
  c.n_disks = 16;
  c.n_radii = 16;
  c.alpha = 0.5;
  EXPECT_TRUE(validate(c).empty());
}

TEST(Validate, ZeroRadiiIsReported) {
  FitConfig c;
  c.n_radii = 0;
  EXPECT_TRUE(has(validate(c), "M ≥ 1"));
}

TEST(Validate, AlphaAboveOneIsReported) {
  FitConfig c;
  c.alpha = 1.5;
  EXPECT_TRUE(has(validate(c), "alpha ∈ (0,1]"));
}

TEST(Validate, CollectsEveryViolation) {
  FitConfig c;
  c.n_disks = 0;
  c.n_radii = 0;
  c.alpha = 0.0;
  c.max_iters = 0;
  c.step_size = -1.0;
  c.restarts = 0;
  EXPECT_GE(validate(c).size(), 5u);
}

TEST(Validate, MismatchedAssocKind) {
  FitConfig c;
  c.n_disks = 8;
  c.n_radii = 8;
  c.assoc_kind = AssocKind::shared;
  EXPECT_FALSE(validate(c).empty());
  c.n_radii = 1;
  EXPECT_TRUE(validate(c).empty());
}

TEST(AssocKind, ImpliedByCounts) {
  EXPECT_EQ(assoc_kind_for(8, 1), AssocKind::shared);
  EXPECT_EQ(assoc_kind_for(8, 8), AssocKind::individual);
  EXPECT_EQ(assoc_kind_for(8, 2), AssocKind::grouped);
  EXPECT_EQ(assoc_kind_for(1, 1), AssocKind::shared);
}

TEST(Names, RoundTrip) {
  for (auto k : {AssocKind::shared, AssocKind::grouped, AssocKind::individual}) EXPECT_EQ(parse_assoc_kind(to_string(k)), k);
  for (auto k : {LossKind::dice, LossKind::bce}) EXPECT_EQ(parse_loss_kind(to_string(k)), k);
  EXPECT_THROW(parse_loss_kind("l2"), Error);
}

TEST(Masks, CountAndBounds) {
  BinaryMask m(3, 2);
  EXPECT_TRUE(m.empty_foreground());
  m.set(2, 1, true);
  EXPECT_EQ(m.count(), 1u);
  EXPECT_EQ(m.at(2, 1), 1);
  EXPECT_THROW(BinaryMask(2, 2, {0, 1, 2, 0}), Error);
  EXPECT_THROW(BinaryMask(2, 2, {0, 1, 0}), Error);
  EXPECT_THROW(ScalarField(1, 1, {-1.0}), Error);
}

TEST(Polyline, Validity) {
  EXPECT_TRUE(is_valid({{{0, 0}, {1, 0}}, false}));
  EXPECT_FALSE(is_valid({{{0, 0}, {1, 0}}, true}));
  EXPECT_FALSE(is_valid({{{0, 0}, {0, 0}, {1, 1}}, false}));
  EXPECT_TRUE(is_valid({{{0, 0}, {1, 0}, {1, 1}}, true}));
}

TEST(ErrorType, MessageCarriesCode) {
  const Error e(ErrorCode::EmptyMask, "nothing to fit");
  EXPECT_STREQ(e.what(), "EmptyMask: nothing to fit");
  EXPECT_EQ(e.detail(), "nothing to fit");
}
