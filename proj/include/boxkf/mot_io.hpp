#pragma once

// MOTChallenge text format:
//   frame,id,bb_left,bb_top,bb_width,bb_height,conf,x,y,z
// Frames are 1-based on disk and 0-based in memory. Boxes are converted
// between corner form (disk) and center form (memory) here and nowhere else.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "boxkf/detection.hpp"
#include "boxkf/error.hpp"
#include "boxkf/state.hpp"
#include "boxkf/tracker.hpp"

namespace boxkf {

struct MotRow
{
  int frame;  // 0-based
  int id;
  BoundingBox box;
  double confidence;
};

struct DetectionFile
{
  std::vector<FrameDetections> frames;  // ascending by frame
  std::vector<std::string> warnings;
};

/// Shortest decimal string that parses back to exactly `v`.
inline std::string format_number(double v)
{
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace detail {

inline std::string_view trim(std::string_view s) noexcept
{
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline double parse_field(std::string_view field, std::size_t line, std::size_t column)
{
  field = trim(field);
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  double v = 0.0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (field.empty() || res.ec != std::errc{} || res.ptr != field.data() + field.size()) {
    throw ParseError(line, column, "not a number: '" + std::string(field) + "'");
  }
  if (!std::isfinite(v)) {
    throw ParseError(line, column, "value is not finite");
  }
  return v;
}

inline int parse_integer_field(std::string_view field, std::size_t line, std::size_t column)
{
  const double v = parse_field(field, line, column);
  if (v != std::floor(v) || std::abs(v) > 1e9) {
    throw ParseError(line, column, "expected an integer");
  }
  return static_cast<int>(v);
}

/// Parses all rows; rows with non-positive width or height are skipped with a warning.
inline std::vector<MotRow> parse_mot_rows(std::istream & in, std::vector<std::string> & warnings)
{
  std::vector<MotRow> rows;
  std::string text;
  std::size_t line_no = 0;
  bool any_data = false;
  while (std::getline(in, text)) {
    ++line_no;
    const std::string_view line = trim(text);
    if (line.empty() || line.front() == '#') {
      continue;
    }
    any_data = true;
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      fields.push_back(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (fields.size() < 7 || fields.size() > 10) {
      throw ParseError(
        line_no, std::min<std::size_t>(fields.size() + 1, 11),
        "expected 7 to 10 comma-separated fields, got " + std::to_string(fields.size()));
    }
    const int frame = parse_integer_field(fields[0], line_no, 1);
    if (frame < 1) {
      throw ParseError(line_no, 1, "frame numbers start at 1");
    }
    const int id = parse_integer_field(fields[1], line_no, 2);
    const double left = parse_field(fields[2], line_no, 3);
    const double top = parse_field(fields[3], line_no, 4);
    const double width = parse_field(fields[4], line_no, 5);
    const double height = parse_field(fields[5], line_no, 6);
    const double conf = parse_field(fields[6], line_no, 7);
    for (std::size_t c = 7; c < fields.size(); ++c) {
      parse_field(fields[c], line_no, c + 1);
    }
    if (!(width > 0.0) || !(height > 0.0)) {
      warnings.push_back("line " + std::to_string(line_no) + ": non-positive box size, row skipped");
      continue;
    }
    rows.push_back({frame - 1, id, BoundingBox::from_corner(left, top, width, height), conf});
  }
  if (!any_data) {
    throw Error(ErrorKind::EmptyInput, "no data rows");
  }
  return rows;
}

inline std::ifstream open_input(const std::string & path)
{
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::IoError, "cannot open '" + path + "' for reading");
  }
  return in;
}

}  // namespace detail

inline DetectionFile read_mot_detections(std::istream & in)
{
  DetectionFile out;
  const std::vector<MotRow> rows = detail::parse_mot_rows(in, out.warnings);
  std::map<int, std::vector<Detection>> by_frame;
  for (const MotRow & r : rows) {
    by_frame[r.frame].push_back({r.frame, r.box, r.confidence});
  }
  for (auto & [frame, dets] : by_frame) {
    out.frames.push_back({frame, std::move(dets)});
  }
  return out;
}

inline DetectionFile read_mot_detections(const std::string & path)
{
  auto in = detail::open_input(path);
  try {
    return read_mot_detections(in);
  } catch (const ParseError & e) {
    throw ParseError(e.line(), e.column(), path + ": " + std::string(e.what()));
  }
}

/// Reads a results file back into per-id histories (ids ascending, frames ascending).
inline std::vector<TrackHistory> read_mot_results(std::istream & in)
{
  std::vector<std::string> warnings;
  const std::vector<MotRow> rows = detail::parse_mot_rows(in, warnings);
  std::map<int, std::vector<HistoryEntry>> by_id;
  for (const MotRow & r : rows) {
    by_id[r.id].push_back({r.frame, r.box});
  }
  std::vector<TrackHistory> out;
  for (auto & [id, entries] : by_id) {
    std::stable_sort(entries.begin(), entries.end(), [](const auto & a, const auto & b) {
      return a.frame < b.frame;
    });
    out.push_back({id, std::move(entries)});
  }
  return out;
}

inline std::vector<TrackHistory> read_mot_results(const std::string & path)
{
  auto in = detail::open_input(path);
  return read_mot_results(in);
}

/// One line per (frame, id), sorted by frame then id; conf = 1, x/y/z = -1.
inline void write_mot_results(std::ostream & out, const std::vector<TrackHistory> & histories)
{
  struct Row
  {
    int frame;
    int id;
    BoundingBox box;
  };
  std::vector<Row> rows;
  for (const TrackHistory & h : histories) {
    for (const HistoryEntry & e : h.entries) {
      rows.push_back({e.frame, h.id, e.box});
    }
  }
  std::stable_sort(rows.begin(), rows.end(), [](const Row & a, const Row & b) {
    return a.frame != b.frame ? a.frame < b.frame : a.id < b.id;
  });
  for (const Row & r : rows) {
    out << (r.frame + 1) << ',' << r.id << ',' << format_number(r.box.left()) << ','
        << format_number(r.box.top()) << ',' << format_number(r.box.w) << ','
        << format_number(r.box.h) << ",1,-1,-1,-1\n";
  }
}

inline void write_mot_results(const std::string & path, const std::vector<TrackHistory> & histories)
{
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw Error(ErrorKind::IoError, "cannot open '" + path + "' for writing");
  }
  write_mot_results(out, histories);
  out.flush();
  if (!out) {
    throw Error(ErrorKind::IoError, "write to '" + path + "' failed");
  }
}

/// Detection-file lines, id = -1.
inline void write_mot_detections(std::ostream & out, const std::vector<FrameDetections> & frames)
{
  for (const auto & frame : frames) {
    for (const Detection & d : frame.detections) {
      out << (d.frame + 1) << ",-1," << format_number(d.box.left()) << ','
          << format_number(d.box.top()) << ',' << format_number(d.box.w) << ','
          << format_number(d.box.h) << ',' << format_number(d.confidence) << ",-1,-1,-1\n";
    }
  }
}

}  // namespace boxkf
