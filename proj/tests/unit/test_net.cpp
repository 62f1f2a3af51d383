#include "chedra/error.hpp"
#include "chedra/io.hpp"
#include "chedra/net.hpp"
#include "chedra/validation.hpp"
#include "fixtures.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace chedra;
using fixtures::kSqrt2;

namespace {

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no Error thrown";
  return Errc::InvariantError;
}

LinkageSpec first_columns(LinkageSpec L, std::size_t p) {
  L.others.resize(p);
  return L;
}

Point3 axis(double z) { return Point3(0, 0, z); }

// Every bar of every triple keeps its length: |A - S_above| = t,
// |A - S_mid| = s, |B - S_below| = u, |B - S_mid| = |v| s.
double bar_defect(const ConeNet& net, const FlexionState& st) {
  double worst = 0.0;
  for (std::size_t k = 0; k < net.triples.size(); ++k) {
    const LinkageSpec& L = net.triples[k].linkage;
    for (std::size_t j = 0; j < net.vertices.cols(); ++j) {
      const Sublinkage& c = j == 0 ? L.initial : L.others[j - 1];
      const Point3& A = st.vertices.at(k + 1, j);
      const Point3& B = st.vertices.at(k + 2, j);
      const double above = st.tip_heights[k], mid = st.tip_heights[k + 1], below = st.tip_heights[k + 2];
      worst = std::max(worst, std::abs((A - axis(above)).norm() - c.t) / c.t);
      worst = std::max(worst, std::abs((A - axis(mid)).norm() - c.s) / c.s);
      worst = std::max(worst, std::abs((B - axis(below)).norm() - c.u) / c.u);
      worst = std::max(worst, std::abs((B - axis(mid)).norm() - std::abs(c.v) * c.s) / (std::abs(c.v) * c.s));
    }
  }
  return worst;
}

std::vector<double> midpoints(const RangeInterval& r, int n) {
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back(r.lo + (r.hi - r.lo) * (i + 0.5) / n);
  return out;
}

NetSpec chain_spec(CaseLabel second, double u) {
  NetSpec spec;
  spec.cases = {CaseLabel::Scaling_1a, second};
  spec.initial = {2.0, 1.2, 1.5, 1.25, 0.0};
  spec.a_ref = 1.8;
  spec.profile = {ProfileEntry::lengths(1.8, 1.3, 0.4), ProfileEntry::lengths(2.1, 1.5, 0.8),
                  ProfileEntry::lengths(1.9, 1.1, 1.2)};
  spec.chain = {ChainLink{u, std::nullopt}};
  return spec;
}

}  // namespace

TEST(BuildPatch, E1ShapeAndTips) {
  const ConeNet net = build_patch(first_columns(fixtures::e1_linkage(), 3));
  EXPECT_EQ(net.vertices.rows(), 4u);
  EXPECT_EQ(net.vertices.cols(), 4u);
  ASSERT_EQ(net.tips.size(), 3u);
  EXPECT_NEAR(net.tips[0].z(), 2.0, 1e-15);
  EXPECT_NEAR(net.tips[1].z(), 0.0, 1e-15);
  EXPECT_NEAR(net.tips[2].z(), 2 * kSqrt2, 1e-14);
  EXPECT_EQ(net.triples.front().label, CaseLabel::Scaling_1a);
  // first linkage vertex of column 0: A0 = (1, 0, 1) for s = t = sqrt2, a = 2
  EXPECT_NEAR((net.vertices.at(1, 0) - Point3(1, 0, 1)).norm(), 0.0, 1e-14);
  EXPECT_NEAR((net.vertices.at(2, 0) - Point3(kSqrt2, 0, kSqrt2)).norm(), 0.0, 1e-14);
}

TEST(BuildPatch, VerticesLieOnTheirMeridianPlanes) {
  const LinkageSpec L = fixtures::e2_linkage();
  const ConeNet net = build_patch(L);
  for (std::size_t j = 0; j < net.vertices.cols(); ++j) {
    const double phi = j == 0 ? 0.0 : L.others[j - 1].phi;
    for (std::size_t r = 0; r < net.vertices.rows(); ++r) {
      const Point3& p = net.vertices.at(r, j);
      // normal of the meridian plane through angle phi
      EXPECT_NEAR(-std::sin(phi) * p.x() + std::cos(phi) * p.y(), 0.0, 1e-13);
      // rows past the first linkage row sit on the side given by sign(v)
      const double side = r <= 1 ? 1.0 : (j == 0 ? L.initial.v : L.others[j - 1].v);
      EXPECT_GE(side * (std::cos(phi) * p.x() + std::sin(phi) * p.y()), -1e-13);
    }
  }
}

TEST(BuildPatch, BoundaryRowsOnRulings) {
  Boundary b{0.3, 0.7};
  const ConeNet net = build_patch(fixtures::e1_linkage(), b);
  const std::size_t last = net.vertices.rows() - 1;
  for (std::size_t j = 0; j < net.vertices.cols(); ++j) {
    const Point3 A = net.vertices.at(1, j), B = net.vertices.at(last - 1, j);
    const Point3 top = axis(net.tips.front().z()), bottom = axis(net.tips.back().z());
    EXPECT_NEAR((net.vertices.at(0, j) - (A + 0.3 * (top - A))).norm(), 0.0, 1e-14);
    EXPECT_NEAR((net.vertices.at(last, j) - (B + 0.7 * (bottom - B))).norm(), 0.0, 1e-14);
  }
}

TEST(BuildPatch, CrossEdgesFollowIntercept) {
  const LinkageSpec L = fixtures::e2_linkage();
  const ConeNet net = build_patch(L);
  for (std::size_t j = 0; j < net.vertices.cols(); ++j) {
    const Sublinkage& c = j == 0 ? L.initial : L.others[j - 1];
    EXPECT_NEAR((net.vertices.at(2, j) - net.vertices.at(1, j)).norm(), std::abs(c.v - 1.0) * c.s, 1e-13);
  }
}

TEST(BuildPatch, NonSimpleFan) {
  LinkageSpec L = fixtures::e1_linkage();
  L.others[2].phi = L.others[0].phi;
  EXPECT_EQ(code_of([&] { build_patch(L); }), Errc::NonSimpleFan);
  LinkageSpec wrap = fixtures::e1_linkage();
  wrap.others.back().phi = 2 * std::numbers::pi + 0.1;
  EXPECT_EQ(code_of([&] { build_patch(wrap); }), Errc::NonSimpleFan);
  // decreasing fans are fine
  LinkageSpec down = fixtures::e1_linkage();
  for (auto& c : down.others) c.phi = -c.phi;
  EXPECT_NO_THROW(build_patch(down));
}

TEST(Flex, ReferenceReproduced) {
  for (const LinkageSpec& L : {fixtures::e1_linkage(), fixtures::e2_linkage(), fixtures::e3_linkage()}) {
    const ConeNet net = build_patch(L);
    const FlexionState st = flex(net, L.a_ref);
    for (std::size_t r = 0; r < net.vertices.rows(); ++r) {
      for (std::size_t c = 0; c < net.vertices.cols(); ++c) {
        EXPECT_NEAR((st.vertices.at(r, c) - net.vertices.at(r, c)).norm(), 0.0, 1e-12);
      }
    }
  }
}

TEST(Flex, IsometricSweep) {
  for (const LinkageSpec& L : {fixtures::e1_linkage(), fixtures::e2_linkage(), fixtures::e3_linkage()}) {
    const ConeNet net = build_patch(L);
    const auto home = interval_containing(net_flexion_range(net), L.a_ref);
    ASSERT_TRUE(home.has_value());
    for (double a : midpoints(*home, 20)) {
      const FlexionState st = flex(net, a);
      EXPECT_LT(bar_defect(net, st), 1e-10) << "a=" << a;
      const ValidationReport rep = validate_state(net, st);
      EXPECT_TRUE(rep.pass()) << "a=" << a << " iso=" << rep.max_isometry << " plan=" << rep.max_planarity;
    }
  }
}

TEST(Flex, MotionIsNotTrivial) {
  const ConeNet net = build_patch(fixtures::e1_linkage());
  const FlexionState st = flex(net, 1.5);
  double moved = 0.0;
  for (std::size_t c = 1; c < net.vertices.cols(); ++c) {
    moved = std::max(moved, std::abs(st.phis[c] - net.phis[c]));
  }
  EXPECT_GT(moved, 1e-3);
}

TEST(Flex, OutsideRangeThrows) {
  const ConeNet net = build_patch(fixtures::e1_linkage());
  EXPECT_EQ(code_of([&] { flex(net, 5.0); }), Errc::DiscriminantNegative);
  EXPECT_EQ(code_of([&] { flex(net, -1.0); }), Errc::DiscriminantNegative);
}

TEST(NetRange, ContainsReferenceAndEndsAtAngleLimit) {
  const ConeNet net = build_net(load_spec(CHEDRA_TEST_DATA_DIR "/e1.json"));
  const auto home = interval_containing(net_flexion_range(net), net.a_ref);
  ASSERT_TRUE(home.has_value());
  EXPECT_EQ(home->lo, 0.0);
  EXPECT_EQ(home->hi_kind, RangeBoundary::AngleLimit);
  EXPECT_LT(home->hi, 2 * kSqrt2);
  EXPECT_NO_THROW(flex(net, home->hi * (1 - 1e-9)));
  EXPECT_EQ(code_of([&] { flex(net, home->hi * (1 + 1e-6)); }), Errc::AngleUnsolvable);
}

TEST(SampleSemidiscrete, Examples) {
  CurveSampler c;
  c.d = [](double r) { return 1.0 + r; };
  c.phi = [](double r) { return 1.2 * r; };
  c.z = [](double r) { return 0.5 + 0.25 * r; };
  c.n = 5;
  const auto e = sample_semidiscrete(c, CaseLabel::Scaling_1a);
  ASSERT_EQ(e.size(), 5u);
  EXPECT_DOUBLE_EQ(*e[0].d, 1.0);
  EXPECT_DOUBLE_EQ(*e[2].d, 1.5);
  EXPECT_DOUBLE_EQ(e[4].phi, 1.2);
  EXPECT_DOUBLE_EQ(*e[3].z, 0.6875);
  EXPECT_FALSE(e[1].s.has_value());

  c.n = 1;
  EXPECT_EQ(code_of([&] { sample_semidiscrete(c, CaseLabel::Scaling_1a); }), Errc::InadmissibleSample);
  c.n = 4;
  c.phi = [](double r) { return std::sin(6 * r); };
  EXPECT_EQ(code_of([&] { sample_semidiscrete(c, CaseLabel::Scaling_1a); }), Errc::InadmissibleSample);
  c.phi = [](double r) { return r; };
  c.d = [](double r) { return 0.5 - r; };
  EXPECT_EQ(code_of([&] { sample_semidiscrete(c, CaseLabel::Scaling_1a); }), Errc::InadmissibleSample);
  c.d = [](double) { return 1.0; };
  c.z = nullptr;
  EXPECT_EQ(code_of([&] { sample_semidiscrete(c, CaseLabel::Scaling_1a); }), Errc::InadmissibleSample);
}

TEST(SampleSemidiscrete, CaseThreeRowsArePlanar) {
  CurveSampler c;
  c.d = [](double r) { return 1.0 + r; };
  c.phi = [](double r) { return r; };
  c.z = [](double r) { return 0.3 + r; };
  c.n = 4;
  for (const ProfileEntry& e : sample_semidiscrete(c, CaseLabel::Perspectivity_3)) EXPECT_DOUBLE_EQ(*e.z, 0.3);
}

TEST(SampleSemidiscrete, RefinementKeepsCoarseSamples) {
  CurveSampler c;
  c.d = [](double r) { return 1.2 + 0.4 * std::sin(3 * r); };
  c.phi = [](double r) { return 1.5 * r + 0.1 * r * r; };
  c.z = [](double r) { return 0.8 + 0.3 * r; };
  for (int n : {2, 3, 5, 9}) {
    c.n = n;
    const auto coarse = sample_semidiscrete(c, CaseLabel::Collineation_2a);
    c.n = 2 * n - 1;
    const auto fine = sample_semidiscrete(c, CaseLabel::Collineation_2a);
    for (int i = 0; i < n; ++i) {
      EXPECT_NEAR(*coarse[i].d, *fine[2 * i].d, 1e-15);
      EXPECT_NEAR(coarse[i].phi, fine[2 * i].phi, 1e-15);
      EXPECT_NEAR(*coarse[i].z, *fine[2 * i].z, 1e-15);
    }
  }
}

TEST(SampleSemidiscrete, SampledProfileBuildsFlexibleNet) {
  // Sample a smooth profile from A0 outward and build a case-1a net from it.
  NetSpec spec;
  spec.cases = {CaseLabel::Scaling_1a};
  spec.a_ref = 2.0;
  const double z0 = 0.8, d0 = 1.1;
  spec.initial.s = std::hypot(d0, z0);
  spec.initial.t = std::hypot(d0, z0 - 2.0);
  spec.initial.u = 1.3;
  spec.initial.v = 1.3 / spec.initial.t;
  CurveSampler c;
  c.d = [&](double r) { return d0 + 0.3 * r; };
  c.z = [&](double r) { return z0 + 0.2 * r * r; };
  c.phi = [](double r) { return 1.4 * r; };
  c.n = 6;
  auto entries = sample_semidiscrete(c, CaseLabel::Scaling_1a);
  EXPECT_NEAR(*entries[0].d, d0, 1e-15);
  entries.erase(entries.begin());  // entry 0 is the initial column itself
  spec.profile = entries;
  const ConeNet net = build_net(spec);
  EXPECT_EQ(net.triples.front().label, CaseLabel::Scaling_1a);
  const auto home = interval_containing(net_flexion_range(net), spec.a_ref);
  ASSERT_TRUE(home.has_value());
  for (double a : midpoints(*home, 10)) EXPECT_LT(bar_defect(net, flex(net, a)), 1e-10);
}

TEST(PNet, ChainFromDataFile) {
  const NetSpec spec = load_spec(CHEDRA_TEST_DATA_DIR "/pnet_chain.json");
  const ConeNet net = build_net(spec);
  ASSERT_EQ(net.triples.size(), 2u);
  EXPECT_EQ(net.vertices.rows(), 5u);
  EXPECT_EQ(net.tips.size(), 4u);
  for (const TripleData& t : net.triples) EXPECT_EQ(t.label, CaseLabel::Scaling_1a);
  const auto home = interval_containing(net_flexion_range(net), net.a_ref);
  ASSERT_TRUE(home.has_value());
  for (double a : midpoints(*home, 20)) {
    const FlexionState st = flex(net, a);
    EXPECT_LT(bar_defect(net, st), 1e-10);
    EXPECT_TRUE(validate_state(net, st).pass()) << "a=" << a;
  }
}

TEST(PNet, MixedScalingAndCollineation) {
  for (CaseLabel second : {CaseLabel::Scaling_1a, CaseLabel::Collineation_2a, CaseLabel::Scaling_1b}) {
    const ConeNet net = build_pnet(chain_spec(second, 1.0));
    ASSERT_EQ(net.triples.size(), 2u);
    EXPECT_EQ(net.triples[1].label, second);
    // the second triple's A row is the first triple's B row
    const LinkageSpec& next = net.triples[1].linkage;
    EXPECT_NEAR(next.initial.s, 1.5, 1e-15);
    EXPECT_NEAR(next.initial.t, 1.25 * 2.0, 1e-15);
    const auto home = interval_containing(net_flexion_range(net), net.a_ref);
    ASSERT_TRUE(home.has_value()) << to_string(second);
    for (double a : midpoints(*home, 20)) {
      const FlexionState st = flex(net, a);
      EXPECT_LT(bar_defect(net, st), 1e-10) << to_string(second) << " a=" << a;
      EXPECT_TRUE(validate_state(net, st).pass()) << to_string(second) << " a=" << a;
    }
  }
}

TEST(PNet, IncompatibleChaining) {
  // E1 data: the derived triple has s' = t' = 2, so case 2 has no completion.
  NetSpec spec = load_spec(CHEDRA_TEST_DATA_DIR "/pnet_chain.json");
  spec.cases[1] = CaseLabel::Collineation_2a;
  try {
    build_pnet(spec);
    ADD_FAILURE() << "expected IncompatibleChaining";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::IncompatibleChaining);
    ASSERT_TRUE(e.index().has_value());
    EXPECT_EQ(*e.index(), 1);
  }
  // first triple not of its declared case
  NetSpec wrong = chain_spec(CaseLabel::Scaling_1a, 1.0);
  wrong.profile[1].u = 1.01 * 1.5 * 1.5 / 1.2;
  try {
    build_pnet(wrong);
    ADD_FAILURE() << "expected IncompatibleChaining";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::IncompatibleChaining);
    EXPECT_EQ(e.index().value_or(-1), 0);
  }
}

TEST(PNet, SpecChecks) {
  NetSpec spec = chain_spec(CaseLabel::Scaling_1a, 1.0);
  spec.chain.clear();
  EXPECT_EQ(code_of([&] { build_net(spec); }), Errc::InvariantError);
  spec = chain_spec(CaseLabel::Perspectivity_3, 1.0);
  EXPECT_EQ(code_of([&] { build_net(spec); }), Errc::InvariantError);
}

TEST(MeasureIntrinsics, Counts) {
  const ConeNet net = build_patch(fixtures::e1_linkage());
  const std::size_t R = net.vertices.rows(), C = net.vertices.cols();
  EXPECT_EQ(net.intrinsics.row_edges.size(), R * (C - 1));
  EXPECT_EQ(net.intrinsics.col_edges.size(), (R - 1) * C);
  EXPECT_EQ(net.intrinsics.diagonals.size(), (R - 1) * (C - 1));
  // row-1 edge between columns 0 and 1 measured directly
  EXPECT_DOUBLE_EQ(net.intrinsics.row_edges[C - 1], (net.vertices.at(1, 1) - net.vertices.at(1, 0)).norm());
}
