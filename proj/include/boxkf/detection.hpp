#pragma once

#include <vector>

#include "boxkf/state.hpp"

namespace boxkf {

/// One measured box. `frame` is 0-based; files on disk use 1-based frames.
struct Detection
{
  int frame{0};
  BoundingBox box;
  double confidence{1.0};
};

struct FrameDetections
{
  int frame{0};  // 0-based
  std::vector<Detection> detections;
};

struct HistoryEntry
{
  int frame{0};
  BoundingBox box;

  friend bool operator==(const HistoryEntry &, const HistoryEntry &) = default;
};

struct TrackHistory
{
  int id{0};
  std::vector<HistoryEntry> entries;

  friend bool operator==(const TrackHistory &, const TrackHistory &) = default;
};

}  // namespace boxkf
