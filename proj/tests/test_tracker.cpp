#include <gtest/gtest.h>

#include <set>

#include "boxkf/simulation.hpp"
#include "boxkf/tracker.hpp"

using namespace boxkf;

namespace {

Vector cv_state(double x, double y, double vx, double vy, double w, double h)
{
  Vector s(6);
  s << x, y, vx, vy, w, h;
  return s;
}

/// Two noiseless constant-velocity targets, (5, 0) and (0, 5) px/frame.
std::vector<FrameDetections> two_target_scene(int steps = 20)
{
  SimConfig cfg;
  cfg.noise = NoiseParams::uniform(1.0, 0.0, 0.0);
  cfg.n_steps = steps;
  cfg.n_targets = 2;
  cfg.initial_states = std::vector<Vector>{cv_state(100, 100, 5, 0, 40, 80), cv_state(400, 300, 0, 5, 40, 80)};
  return to_frame_detections(simulate_trajectory(cfg), cfg.param);
}

std::vector<Detection> at(int frame, std::vector<BoundingBox> boxes)
{
  std::vector<Detection> out;
  for (const auto & b : boxes) out.push_back({frame, b, 1.0});
  return out;
}

}  // namespace

TEST(Tracker, SpawnsTentativeTracks)
{
  Tracker t;
  const auto out = t.step(0, at(0, {{10, 10, 5, 5}, {100, 100, 5, 5}, {200, 200, 5, 5}}));
  EXPECT_TRUE(out.empty());
  ASSERT_EQ(t.tracks().size(), 3u);
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(t.tracks()[i].id, i + 1);
    EXPECT_EQ(t.tracks()[i].status, TrackStatus::Tentative);
    EXPECT_EQ(t.tracks()[i].hits, 1);
  }
}

TEST(Tracker, PerfectMatchKeepsIdentity)
{
  TrackerConfig cfg;
  cfg.min_hits = 1;
  Tracker t(cfg);
  const BoundingBox box{50, 50, 20, 40};
  t.step(0, at(0, {box}));
  ASSERT_EQ(t.tracks().front().status, TrackStatus::Confirmed);
  const auto out = t.step(1, at(1, {box}));
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].id, 1);
  EXPECT_EQ(t.tracks().front().hits, 2);
  EXPECT_EQ(t.tracks().front().misses, 0);
}

TEST(Tracker, ConfirmsAfterMinHits)
{
  Tracker t;  // min_hits = 3
  const BoundingBox box{50, 50, 20, 40};
  EXPECT_TRUE(t.step(0, at(0, {box})).empty());
  EXPECT_TRUE(t.step(1, at(1, {box})).empty());
  const auto out = t.step(2, at(2, {box}));
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].status, TrackStatus::Confirmed);

  TrackerConfig show;
  show.output_tentative = true;
  Tracker u(show);
  const auto first = u.step(0, at(0, {box}));
  ASSERT_EQ(first.size(), 1u);
  EXPECT_EQ(first[0].status, TrackStatus::Tentative);
}

TEST(Tracker, TwoTargetSceneKeepsTwoIds)
{
  Tracker t;
  std::set<int> ids;
  for (const auto & f : two_target_scene()) {
    for (const auto & o : t.step(f.frame, f.detections)) ids.insert(o.id);
  }
  EXPECT_EQ(ids, (std::set<int>{1, 2}));
  const auto hist = t.flush();
  ASSERT_EQ(hist.size(), 2u);
  for (const auto & h : hist) {
    EXPECT_EQ(h.entries.size(), 20u);
    for (std::size_t k = 0; k < h.entries.size(); ++k) EXPECT_EQ(h.entries[k].frame, static_cast<int>(k));
  }
  EXPECT_EQ(t.flush(), hist);  // idempotent
}

TEST(Tracker, FlushOnFreshTrackerIsEmpty)
{
  EXPECT_TRUE(Tracker{}.flush().empty());
}

TEST(Tracker, HistoryEndsAtLastDetection)
{
  TrackerConfig cfg;
  cfg.max_age = 3;
  Tracker t(cfg);
  for (int f = 0; f < 20; ++f) {
    std::vector<BoundingBox> boxes{{300, 50 + 4.0 * f, 30, 60}};
    if (f <= 10) boxes.push_back({50 + 5.0 * f, 200, 40, 80});
    t.step(f, at(f, boxes));
    if (f == 14) {
      // misses 4 > max_age 3: deleted by now
      for (const auto & tr : t.tracks()) EXPECT_NE(tr.id, 2);
    }
  }
  const auto hist = t.flush();
  ASSERT_EQ(hist.size(), 2u);
  EXPECT_EQ(hist[1].id, 2);
  EXPECT_EQ(hist[1].entries.back().frame, 10);
  EXPECT_EQ(hist[0].entries.back().frame, 19);
}

TEST(Tracker, NoResurrectionAfterDeletion)
{
  TrackerConfig cfg;
  cfg.max_age = 2;
  cfg.min_hits = 1;
  Tracker t(cfg);
  const BoundingBox box{100, 100, 40, 40};
  std::vector<int> first_seen_order;
  std::set<int> seen;
  for (int f = 0; f < 12; ++f) {
    const bool visible = f < 3 || f >= 8;
    for (const auto & o : t.step(f, visible ? at(f, {box}) : std::vector<Detection>{})) {
      if (seen.insert(o.id).second) first_seen_order.push_back(o.id);
    }
  }
  EXPECT_EQ(first_seen_order, (std::vector<int>{1, 2}));
  ASSERT_EQ(t.tracks().size(), 1u);
  EXPECT_EQ(t.tracks().front().id, 2);
}

TEST(Tracker, OutOfOrderFrame)
{
  Tracker t;
  t.step(5, {});
  try {
    t.step(4, {});
    FAIL();
  } catch (const Error & e) {
    EXPECT_EQ(e.kind(), ErrorKind::OutOfOrderFrame);
  }
  EXPECT_NO_THROW(t.step(5, {}));
  EXPECT_THROW(t.step(6, at(7, {{1, 1, 1, 1}})), Error);
}

TEST(Tracker, NegativePredictedSizeDeletesTrack)
{
  TrackerConfig cfg;
  cfg.param = Parameterization::CXCYWH_V;
  cfg.min_hits = 1;
  cfg.max_age = 100;
  cfg.iou_threshold = 0.01;
  Tracker t(cfg);
  for (int f = 0; f < 5; ++f) {
    const double w = 40.0 - 8.0 * f;
    t.step(f, at(f, {{100, 100, w, 40.0 - 8.0 * f}}));
  }
  ASSERT_EQ(t.tracks().size(), 1u);
  for (int f = 5; f < 20; ++f) t.step(f, {});
  EXPECT_TRUE(t.tracks().empty());
  ASSERT_EQ(t.flush().size(), 1u);
}

TEST(Tracker, Deterministic)
{
  SimConfig cfg;
  cfg.noise = NoiseParams::uniform(1.0, 0.3, 1.0);
  cfg.n_steps = 60;
  cfg.n_targets = 5;
  cfg.seed = 77;
  cfg.drop_probability = 0.1;
  const auto frames = to_frame_detections(simulate_trajectory(cfg), cfg.param);
  const auto a = track_sequence(frames, TrackerConfig{});
  const auto b = track_sequence(frames, TrackerConfig{});
  EXPECT_EQ(a, b);
  EXPECT_FALSE(a.empty());
  for (std::size_t i = 1; i < a.size(); ++i) EXPECT_LT(a[i - 1].id, a[i].id);
}

TEST(Tracker, MahalanobisGateKeepsCleanScene)
{
  TrackerConfig cfg;
  cfg.use_mahalanobis_gate = true;
  const auto hist = track_sequence(two_target_scene(), cfg);
  ASSERT_EQ(hist.size(), 2u);
  EXPECT_EQ(hist[0].entries.size(), 20u);
}

TEST(Tracker, MahalanobisGateRejectsImplausibleSize)
{
  TrackerConfig cfg;
  cfg.min_hits = 1;
  cfg.iou_threshold = 0.1;
  cfg.noise = NoiseParams::uniform(1.0, 0.1, 0.1);
  cfg.use_mahalanobis_gate = true;
  Tracker t(cfg);
  t.step(0, at(0, {{100, 100, 40, 40}}));
  t.step(1, at(1, {{100, 100, 40, 40}}));
  // Same center, IoU 0.25, but width jumps far outside the innovation gate.
  t.step(2, at(2, {{100, 100, 80, 20}}));
  ASSERT_EQ(t.tracks().size(), 2u);
  EXPECT_EQ(t.tracks()[0].misses, 1);
  EXPECT_EQ(t.tracks()[1].id, 2);
}

TEST(Tracker, ConfigValidation)
{
  TrackerConfig bad;
  bad.max_age = 0;
  EXPECT_THROW(Tracker{bad}, Error);
  bad = {};
  bad.iou_threshold = 1.5;
  EXPECT_THROW(Tracker{bad}, Error);
  bad = {};
  bad.min_hits = 0;
  EXPECT_THROW(Tracker{bad}, Error);
}
