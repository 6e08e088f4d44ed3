#pragma once

// SORT-style multi-object tracker: predict every live track, associate by
// IoU (optionally gated by Mahalanobis distance), update matches, spawn
// tracks for unmatched detections and retire tracks that miss too often.

#include <algorithm>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "boxkf/association.hpp"
#include "boxkf/detection.hpp"
#include "boxkf/error.hpp"
#include "boxkf/kalman_filter.hpp"
#include "boxkf/motion_model.hpp"
#include "boxkf/state.hpp"

namespace boxkf {

enum class TrackStatus { Tentative, Confirmed, Deleted };

constexpr std::string_view to_string(TrackStatus s) noexcept
{
  switch (s) {
    case TrackStatus::Tentative: return "tentative";
    case TrackStatus::Confirmed: return "confirmed";
    case TrackStatus::Deleted: return "deleted";
  }
  return "?";
}

struct Track
{
  int id;
  GaussianState state;
  int hits{0};
  int misses{0};
  TrackStatus status{TrackStatus::Tentative};
  bool ever_confirmed{false};
  std::vector<HistoryEntry> history{};  // frames where the track was updated
};

struct TrackerConfig
{
  Parameterization param{Parameterization::CXCYWH};
  NoiseParams noise{};
  double iou_threshold{0.3};
  int max_age{5};
  int min_hits{3};
  bool use_mahalanobis_gate{false};
  bool output_tentative{false};
  std::optional<double> initial_velocity_std{};  // default: 10 * sigma_meas / dt

  void validate() const
  {
    noise.validate();
    if (!(iou_threshold >= 0.0 && iou_threshold <= 1.0)) {
      throw Error(ErrorKind::InvalidArgument, "iou_threshold must lie in [0, 1]");
    }
    if (max_age < 1) {
      throw Error(ErrorKind::InvalidArgument, "max_age must be >= 1");
    }
    if (min_hits < 1) {
      throw Error(ErrorKind::InvalidArgument, "min_hits must be >= 1");
    }
    if (initial_velocity_std && !(*initial_velocity_std >= 0.0)) {
      throw Error(ErrorKind::InvalidArgument, "initial velocity std must be >= 0");
    }
  }
};

struct TrackOutput
{
  int id;
  BoundingBox box;
  TrackStatus status;
};

class Tracker
{
public:
  explicit Tracker(TrackerConfig config = {})
  : config_(std::move(config))
  {
    config_.validate();
    model_ = build_model(config_.param, config_.noise);
  }

  const TrackerConfig & config() const noexcept { return config_; }
  const std::vector<Track> & tracks() const noexcept { return live_; }

  /// Processes one frame. Every detection must carry `frame`.
  std::vector<TrackOutput> step(int frame, const std::vector<Detection> & detections)
  {
    if (last_frame_ && frame < *last_frame_) {
      throw Error(
        ErrorKind::OutOfOrderFrame,
        "frame " + std::to_string(frame) + " after frame " + std::to_string(*last_frame_));
    }
    for (const Detection & d : detections) {
      if (d.frame != frame) {
        throw Error(ErrorKind::InvalidArgument, "detection frame differs from the stepped frame");
      }
      if (!is_valid(d.box)) {
        throw Error(ErrorKind::NonPositiveSize, "detection box must have positive finite size");
      }
    }
    last_frame_ = frame;

    // Predict; a track whose predicted size is no longer positive is dropped.
    std::vector<BoundingBox> predicted;
    predicted.reserve(live_.size());
    for (Track & t : live_) {
      t.state = predict(t.state, model_.F, model_.Q);
      try {
        predicted.push_back(from_state(t.state.mean(), config_.param));
      } catch (const Error & e) {
        if (e.kind() != ErrorKind::NonPositiveSize) throw;
        t.status = TrackStatus::Deleted;
        predicted.push_back({});
      }
    }

    std::vector<BoundingBox> det_boxes;
    det_boxes.reserve(detections.size());
    for (const Detection & d : detections) det_boxes.push_back(d.box);

    CostMatrix cm = CostMatrix::from_iou(predicted, det_boxes);
    for (Eigen::Index i = 0; i < cm.rows(); ++i) {
      for (Eigen::Index j = 0; j < cm.cols(); ++j) {
        const Track & t = live_[static_cast<std::size_t>(i)];
        bool ok = t.status != TrackStatus::Deleted && cm.costs(i, j) < 1.0;
        if (ok && config_.use_mahalanobis_gate) {
          try {
            const Vector z = to_measurement(det_boxes[static_cast<std::size_t>(j)], config_.param);
            ok = gating_distance(t.state, z, model_.H, model_.R) <= kMahalanobisGate4Dof;
          } catch (const Error & e) {
            if (e.kind() != ErrorKind::SingularInnovation) throw;
            ok = false;
          }
        }
        cm.gate_mask(i, j) = ok;
      }
    }
    const Assignment assignment = solve_assignment(cm, 1.0 - config_.iou_threshold);

    for (const auto & [ti, di] : assignment.matches) {
      Track & t = live_[static_cast<std::size_t>(ti)];
      const Detection & d = detections[static_cast<std::size_t>(di)];
      t.state = update(t.state, to_measurement(d.box, config_.param), model_.H, model_.R).first;
      ++t.hits;
      t.misses = 0;
      if (t.status == TrackStatus::Tentative && t.hits >= config_.min_hits) {
        t.status = TrackStatus::Confirmed;
        t.ever_confirmed = true;
      }
      try {
        t.history.push_back({frame, from_state(t.state.mean(), config_.param)});
      } catch (const Error & e) {
        if (e.kind() != ErrorKind::NonPositiveSize) throw;
        t.status = TrackStatus::Deleted;
      }
    }
    for (int ti : assignment.unmatched_tracks) {
      Track & t = live_[static_cast<std::size_t>(ti)];
      ++t.misses;
      if (t.misses > config_.max_age) {
        t.status = TrackStatus::Deleted;
      }
    }
    for (int di : assignment.unmatched_detections) {
      const Detection & d = detections[static_cast<std::size_t>(di)];
      Track t{
        next_id_++,
        initial_state(
          to_measurement(d.box, config_.param), config_.param, config_.noise,
          config_.initial_velocity_std)};
      t.hits = 1;
      if (t.hits >= config_.min_hits) {
        t.status = TrackStatus::Confirmed;
        t.ever_confirmed = true;
      }
      t.history.push_back({frame, from_state(t.state.mean(), config_.param)});
      live_.push_back(std::move(t));
    }

    retire_deleted();

    std::vector<TrackOutput> out;
    for (const Track & t : live_) {
      const bool emit = t.status == TrackStatus::Confirmed ||
                        (config_.output_tentative && t.status == TrackStatus::Tentative);
      if (emit) {
        out.push_back({t.id, from_state(t.state.mean(), config_.param), t.status});
      }
    }
    return out;
  }

  /// Convenience overload: the frame is taken from the detections, or is the
  /// frame after the last one when the list is empty.
  std::vector<TrackOutput> step(const std::vector<Detection> & detections)
  {
    const int frame = !detections.empty() ? detections.front().frame
                      : last_frame_      ? *last_frame_ + 1
                                         : 0;
    return step(frame, detections);
  }

  /// Updated-frame histories of every track that was ever confirmed, by id.
  std::vector<TrackHistory> flush() const
  {
    std::vector<TrackHistory> out = finished_;
    for (const Track & t : live_) {
      if (t.ever_confirmed) {
        out.push_back({t.id, t.history});
      }
    }
    std::sort(out.begin(), out.end(), [](const auto & a, const auto & b) { return a.id < b.id; });
    return out;
  }

private:
  void retire_deleted()
  {
    auto it = std::stable_partition(live_.begin(), live_.end(), [](const Track & t) {
      return t.status != TrackStatus::Deleted;
    });
    for (auto d = it; d != live_.end(); ++d) {
      if (d->ever_confirmed) {
        finished_.push_back({d->id, std::move(d->history)});
      }
    }
    live_.erase(it, live_.end());
  }

  TrackerConfig config_;
  ModelMatrices model_;
  std::vector<Track> live_;
  std::vector<TrackHistory> finished_;
  std::optional<int> last_frame_;
  int next_id_{1};
};

/// Runs a tracker over a whole sequence, stepping every frame from the first
/// to the last listed one (frames without detections included), and returns
/// the flushed histories.
inline std::vector<TrackHistory> track_sequence(
  const std::vector<FrameDetections> & frames, const TrackerConfig & config)
{
  Tracker tracker(config);
  if (frames.empty()) {
    return {};
  }
  const std::vector<Detection> none;
  std::size_t next = 0;
  for (int f = frames.front().frame; f <= frames.back().frame; ++f) {
    if (next < frames.size() && frames[next].frame == f) {
      tracker.step(f, frames[next].detections);
      ++next;
    } else {
      tracker.step(f, none);
    }
  }
  return tracker.flush();
}

}  // namespace boxkf
