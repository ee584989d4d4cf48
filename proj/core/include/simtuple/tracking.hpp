#pragma once

#include "simtuple/scene.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace simtuple {

enum class TrackTeam : std::uint8_t { home, away, ball };

/// One row of raw tracking data: `frame,agent_id,team,x,y`.
struct TrackingRow {
  std::int64_t frame = 0;
  std::int64_t agent_id = 0;
  TrackTeam team = TrackTeam::home;
  double x = 0.0;
  double y = 0.0;
};

/// Tracking rows sorted by frame. Rows of one frame may come in any agent
/// order; each agent appears at most once per frame.
struct TrackingTable {
  std::vector<TrackingRow> rows;
};

/// Parses the tracking CSV format (header `frame,agent_id,team,x,y`, team in
/// {home, away, ball}). Throws a parse error naming the 1-based data row on
/// malformed, unsorted or duplicate input.
TrackingTable read_tracking_csv(std::istream& in);
TrackingTable read_tracking_csv_file(const std::string& path);
void write_tracking_csv(std::ostream& out, const TrackingTable& table);

struct ExtractOptions {
  double window_s = 5.0;
  double overlap = 0.5;
  double hz = 25.0;
  /// Minimum share of frames in which one team is closest to the ball.
  double possession_threshold = 0.6;
  /// A frame is dead-ball when the ball moves slower than this (m/s).
  double pause_speed = 0.1;
  /// Windows containing this many consecutive dead-ball frames are paused.
  int pause_min_frames = 25;
  /// Expected players per team; 0 accepts any roster size.
  std::size_t team_size = 11;
  std::string source = "tracking";
  Pitch pitch;
};

struct ExtractStats {
  std::size_t windows = 0;
  std::size_t kept = 0;
  std::size_t missing_agents = 0;
  std::size_t paused = 0;
  std::size_t unclear_possession = 0;
};

/// Validates ordering invariants of a table; throws a parse error with the
/// offending row index.
void check_tracking_order(const TrackingTable& table);

/// Cuts sliding windows out of a tracking table and keeps those with complete
/// rosters, live play and clear possession. Kept scenes are normalized so the
/// team in possession attacks toward +x.
std::vector<Scene> extract_scenes(const TrackingTable& table, const ExtractOptions& opts,
                                  ExtractStats* stats = nullptr);

/// Frame offset of window k relative to the first frame.
std::int64_t window_start_offset(std::size_t k, const ExtractOptions& opts);
std::int64_t window_frames(const ExtractOptions& opts);

struct SyntheticGameOptions {
  double minutes = 90.0;
  double hz = 25.0;
  std::size_t team_size = 11;
  /// Number of windows that survive the extraction filters.
  std::size_t target_scenes = 1005;
  ExtractOptions extract;
};

/// Generates a full-game tracking table whose dead-ball spells and tracking
/// dropouts are placed so that exactly `target_scenes` windows pass
/// `extract_scenes` with `opts.extract`.
TrackingTable synth_tracking_game(std::uint64_t seed, const SyntheticGameOptions& opts);

}  // namespace simtuple
