#include "simtuple/tracking.hpp"

#include "simtuple/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <random>
#include <unordered_map>

namespace simtuple {

namespace {

std::string_view team_name(TrackTeam t) {
  switch (t) {
    case TrackTeam::home: return "home";
    case TrackTeam::away: return "away";
    case TrackTeam::ball: return "ball";
  }
  return "?";
}

[[noreturn]] void row_error(std::size_t row, const std::string& what) {
  fail(ErrorCode::parse, "tracking row " + std::to_string(row) + ": " + what);
}

template <typename T>
T parse_number(std::string_view field, std::size_t row, const char* name) {
  T value{};
  const auto* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (ec != std::errc() || ptr != end) row_error(row, std::string("bad ") + name + " '" + std::string(field) + "'");
  return value;
}

}  // namespace

TrackingTable read_tracking_csv(std::istream& in) {
  TrackingTable table;
  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::parse, "tracking csv: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "frame,agent_id,team,x,y")
    fail(ErrorCode::parse, "tracking csv: expected header 'frame,agent_id,team,x,y', got '" + line + "'");

  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ++row;
    std::string_view rest(line);
    std::string_view fields[5];
    for (int f = 0; f < 5; ++f) {
      const auto comma = rest.find(',');
      if (f < 4) {
        if (comma == std::string_view::npos) row_error(row, "expected 5 fields");
        fields[f] = rest.substr(0, comma);
        rest.remove_prefix(comma + 1);
      } else {
        if (comma != std::string_view::npos) row_error(row, "expected 5 fields");
        fields[f] = rest;
      }
    }
    TrackingRow r;
    r.frame = parse_number<std::int64_t>(fields[0], row, "frame");
    r.agent_id = parse_number<std::int64_t>(fields[1], row, "agent_id");
    if (fields[2] == "home") r.team = TrackTeam::home;
    else if (fields[2] == "away") r.team = TrackTeam::away;
    else if (fields[2] == "ball") r.team = TrackTeam::ball;
    else row_error(row, "unknown team '" + std::string(fields[2]) + "'");
    r.x = parse_number<double>(fields[3], row, "x");
    r.y = parse_number<double>(fields[4], row, "y");
    if (!std::isfinite(r.x) || !std::isfinite(r.y)) row_error(row, "non-finite position");
    table.rows.push_back(r);
  }
  check_tracking_order(table);
  return table;
}

TrackingTable read_tracking_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot open tracking file '" + path + "'");
  return read_tracking_csv(in);
}

void write_tracking_csv(std::ostream& out, const TrackingTable& table) {
  out << "frame,agent_id,team,x,y\n";
  char buf[64];
  for (const auto& r : table.rows) {
    out << r.frame << ',' << r.agent_id << ',' << team_name(r.team) << ',';
    auto res = std::to_chars(buf, buf + sizeof buf, r.x);
    out.write(buf, res.ptr - buf);
    out << ',';
    res = std::to_chars(buf, buf + sizeof buf, r.y);
    out.write(buf, res.ptr - buf);
    out << '\n';
  }
}

void check_tracking_order(const TrackingTable& table) {
  std::unordered_map<std::int64_t, std::pair<std::int64_t, TrackTeam>> last;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& r = table.rows[i];
    if (i > 0 && r.frame < table.rows[i - 1].frame) row_error(i + 1, "frames not sorted");
    auto [it, inserted] = last.try_emplace(r.agent_id, r.frame, r.team);
    if (!inserted) {
      if (r.frame <= it->second.first)
        row_error(i + 1, "agent " + std::to_string(r.agent_id) + " frames not strictly increasing");
      if (r.team != it->second.second)
        row_error(i + 1, "agent " + std::to_string(r.agent_id) + " changes team");
      it->second.first = r.frame;
    }
  }
}

std::int64_t window_frames(const ExtractOptions& opts) {
  return std::llround(opts.window_s * opts.hz);
}

std::int64_t window_start_offset(std::size_t k, const ExtractOptions& opts) {
  const double step_s = opts.window_s * (1.0 - opts.overlap);
  return std::llround(static_cast<double>(k) * step_s * opts.hz);
}

std::vector<Scene> extract_scenes(const TrackingTable& table, const ExtractOptions& opts,
                                  ExtractStats* stats) {
  require(opts.window_s > 0.0 && opts.hz > 0.0, "extract_scenes: window and rate must be positive");
  require(opts.overlap >= 0.0 && opts.overlap < 1.0, "extract_scenes: overlap must be in [0, 1)");
  check_tracking_order(table);

  ExtractStats local;
  std::vector<Scene> scenes;
  const auto W = window_frames(opts);
  require(W >= 2, "extract_scenes: window must span at least two frames");
  if (table.rows.empty()) {
    if (stats) *stats = local;
    return scenes;
  }

  const std::int64_t f0 = table.rows.front().frame;
  const std::int64_t f_last = table.rows.back().frame;
  // begin[f - f0] .. begin[f - f0 + 1] is the row range of frame f.
  std::vector<std::size_t> begin(static_cast<std::size_t>(f_last - f0 + 2), 0);
  {
    std::size_t i = 0;
    for (std::int64_t f = f0; f <= f_last + 1; ++f) {
      while (i < table.rows.size() && table.rows[i].frame < f) ++i;
      begin[static_cast<std::size_t>(f - f0)] = i;
    }
  }

  struct Track {
    std::int64_t id;
    TrackTeam team;
    std::vector<double> x, y;
    std::int64_t count = 0;
  };

  const double still_step = opts.pause_speed / opts.hz;
  const double step_s = opts.window_s * (1.0 - opts.overlap);

  for (std::size_t k = 0;; ++k) {
    const std::int64_t start = f0 + window_start_offset(k, opts);
    if (start + W - 1 > f_last) break;
    ++local.windows;

    std::unordered_map<std::int64_t, std::size_t> slot;
    std::vector<Track> tracks;
    for (std::int64_t f = start; f < start + W; ++f) {
      const auto t = static_cast<std::size_t>(f - start);
      const auto lo = begin[static_cast<std::size_t>(f - f0)];
      const auto hi = begin[static_cast<std::size_t>(f - f0 + 1)];
      for (std::size_t i = lo; i < hi; ++i) {
        const auto& r = table.rows[i];
        auto [it, inserted] = slot.try_emplace(r.agent_id, tracks.size());
        if (inserted) {
          tracks.push_back({r.agent_id, r.team, std::vector<double>(static_cast<std::size_t>(W)),
                            std::vector<double>(static_cast<std::size_t>(W)), 0});
        }
        auto& tr = tracks[it->second];
        tr.x[t] = r.x;
        tr.y[t] = r.y;
        ++tr.count;
      }
    }

    std::size_t home = 0, away = 0, balls = 0;
    bool complete = true;
    for (const auto& tr : tracks) {
      complete = complete && tr.count == W;
      home += tr.team == TrackTeam::home;
      away += tr.team == TrackTeam::away;
      balls += tr.team == TrackTeam::ball;
    }
    if (opts.team_size > 0) complete = complete && home == opts.team_size && away == opts.team_size;
    complete = complete && balls == 1 && home > 0 && away > 0;
    if (!complete) {
      ++local.missing_agents;
      continue;
    }

    std::sort(tracks.begin(), tracks.end(), [](const Track& a, const Track& b) {
      if (a.team != b.team) return a.team < b.team;
      return a.id < b.id;
    });
    const Track& ball = tracks.back();

    int run = 0, longest = 0;
    for (std::int64_t t = 1; t < W; ++t) {
      const auto u = static_cast<std::size_t>(t);
      const double step = std::hypot(ball.x[u] - ball.x[u - 1], ball.y[u] - ball.y[u - 1]);
      run = step < still_step ? run + 1 : 0;
      longest = std::max(longest, run + (run > 0 ? 1 : 0));
    }
    if (longest >= opts.pause_min_frames) {
      ++local.paused;
      continue;
    }

    std::int64_t home_frames = 0, away_frames = 0;
    for (std::int64_t t = 0; t < W; ++t) {
      const auto u = static_cast<std::size_t>(t);
      double best = std::numeric_limits<double>::infinity();
      TrackTeam owner = TrackTeam::home;
      for (std::size_t a = 0; a + 1 < tracks.size(); ++a) {
        const double d = std::hypot(tracks[a].x[u] - ball.x[u], tracks[a].y[u] - ball.y[u]);
        if (d < best) {
          best = d;
          owner = tracks[a].team;
        }
      }
      (owner == TrackTeam::home ? home_frames : away_frames) += 1;
    }
    const double share = static_cast<double>(std::max(home_frames, away_frames)) / static_cast<double>(W);
    if (share < opts.possession_threshold) {
      ++local.unclear_possession;
      continue;
    }
    const TrackTeam possessing = home_frames >= away_frames ? TrackTeam::home : TrackTeam::away;

    Scene scene;
    scene.id = opts.source + "@" + std::to_string(start);
    scene.hz = opts.hz;
    scene.meta.source = opts.source;
    scene.meta.offset_s = static_cast<double>(k) * step_s;
    const auto S = static_cast<Eigen::Index>(tracks.size());
    scene.x.resize(S, W);
    scene.y.resize(S, W);
    Eigen::Index row = 0;
    auto emit = [&](const Track& tr, Role role) {
      scene.roles.push_back(role);
      scene.x.row(row) = Eigen::Map<const Eigen::RowVectorXd>(tr.x.data(), W);
      scene.y.row(row) = Eigen::Map<const Eigen::RowVectorXd>(tr.y.data(), W);
      ++row;
    };
    for (const auto& tr : tracks)
      if (tr.team == possessing) emit(tr, Role::possession);
    for (const auto& tr : tracks)
      if (tr.team != possessing && tr.team != TrackTeam::ball) emit(tr, Role::defending);
    emit(ball, Role::ball);

    // Attack toward +x: the defending block sits between the attackers and
    // the goal they attack.
    double pos_x = 0.0, def_x = 0.0;
    std::size_t np = 0, nd = 0;
    for (Eigen::Index s = 0; s < S; ++s) {
      const auto role = scene.roles[static_cast<std::size_t>(s)];
      if (role == Role::possession) pos_x += scene.x.row(s).mean(), ++np;
      if (role == Role::defending) def_x += scene.x.row(s).mean(), ++nd;
    }
    if (pos_x / static_cast<double>(np) > def_x / static_cast<double>(nd)) {
      scene.x = -scene.x;
      scene.y = -scene.y;
    }
    scenes.push_back(std::move(scene));
    ++local.kept;
  }
  if (stats) *stats = local;
  return scenes;
}

// ---------------------------------------------------------------------------
// Synthetic full-game table

namespace {

struct Player {
  Eigen::Vector2d pos;
  Eigen::Vector2d vel = Eigen::Vector2d::Zero();
  Eigen::Vector2d anchor;  // formation slot relative to the block center
  Eigen::Vector2d wander = Eigen::Vector2d::Zero();
};

const std::vector<Eigen::Vector2d>& formation(std::size_t team_size) {
  // 4-4-2 in a team frame attacking +x; extra or fewer players reuse the grid.
  static const std::vector<Eigen::Vector2d> base = {
      {-30, 0},  {-18, -20}, {-18, -7}, {-18, 7},  {-18, 20}, {-4, -22},
      {-4, -8},  {-4, 8},    {-4, 22},  {10, -7},  {10, 7},
  };
  static std::vector<Eigen::Vector2d> custom;
  if (team_size == base.size()) return base;
  custom.clear();
  for (std::size_t i = 0; i < team_size; ++i) custom.push_back(base[i % base.size()] + Eigen::Vector2d(0, 2.0 * (i / base.size())));
  return custom;
}

}  // namespace

TrackingTable synth_tracking_game(std::uint64_t seed, const SyntheticGameOptions& opts) {
  ExtractOptions ex = opts.extract;
  ex.hz = opts.hz;
  ex.team_size = opts.team_size;
  require(opts.team_size >= 1, "synth_tracking_game: team_size must be positive");

  const auto total_frames = static_cast<std::int64_t>(std::llround(opts.minutes * 60.0 * opts.hz));
  const auto W = window_frames(ex);
  std::size_t n_windows = 0;
  while (window_start_offset(n_windows, ex) + W <= total_frames) ++n_windows;
  require(opts.target_scenes <= n_windows, "synth_tracking_game: target exceeds available windows");
  // Every frame past the first step lies in exactly two windows only when two
  // steps add up to one window; the construction below relies on it.
  require(window_start_offset(2, ex) == W, "synth_tracking_game: requires 50% overlap");

  std::mt19937_64 rng(seed);
  const std::size_t kills = n_windows - opts.target_scenes;

  // Window labels: killed runs have length >= 2 except a lone killed window 0,
  // which is spoiled through its exclusive leading frames.
  std::vector<char> killed(n_windows, 0);
  std::size_t remaining = kills;
  std::size_t cursor = 0;
  if (remaining % 2 == 1) {
    killed[0] = 1;
    --remaining;
    cursor = 2;  // keep window 1 alive so the lone run stays isolated
  }
  {
    const std::size_t runs = remaining / 2 == 0 ? 0 : std::max<std::size_t>(1, remaining / 6);
    std::vector<std::size_t> run_len(runs, 2);
    std::size_t extra = remaining - 2 * runs;
    std::uniform_int_distribution<std::size_t> pick(0, runs > 0 ? runs - 1 : 0);
    while (extra > 0) {
      ++run_len[pick(rng)];
      --extra;
    }
    const std::size_t good_after_cursor = n_windows - cursor - remaining;
    require(runs == 0 || good_after_cursor + 1 >= runs, "synth_tracking_game: too many killed windows");
    // Spread good windows over runs + 1 gaps, inner gaps >= 1.
    std::vector<std::size_t> gap(runs + 1, 0);
    for (std::size_t g = 1; g < runs; ++g) gap[g] = 1;
    std::size_t spare = good_after_cursor - (runs > 0 ? runs - 1 : 0);
    std::uniform_int_distribution<std::size_t> pick_gap(0, runs);
    while (spare > 0) {
      ++gap[pick_gap(rng)];
      --spare;
    }
    std::size_t w = cursor;
    for (std::size_t r = 0; r < runs; ++r) {
      w += gap[r];
      for (std::size_t i = 0; i < run_len[r]; ++i) killed[w + i] = 1;
      w += run_len[r];
    }
  }

  // Per-frame events: dead-ball frames and frames where one player is dropped.
  enum class Spoil : std::uint8_t { none, pause, dropout };
  std::vector<Spoil> spoil(static_cast<std::size_t>(total_frames), Spoil::none);
  std::vector<char> switch_at(static_cast<std::size_t>(total_frames), 0);
  std::vector<int> dropped_player(static_cast<std::size_t>(total_frames), -1);
  const int pause_len = ex.pause_min_frames + 5;
  std::uniform_int_distribution<int> coin(0, 1);
  std::uniform_int_distribution<int> who(0, static_cast<int>(2 * opts.team_size) - 1);

  auto spoil_range = [&](std::int64_t lo, std::int64_t hi, Spoil kind, int player, bool sw) {
    for (std::int64_t f = lo; f < hi; ++f) {
      spoil[static_cast<std::size_t>(f)] = kind;
      dropped_player[static_cast<std::size_t>(f)] = player;
    }
    if (sw) switch_at[static_cast<std::size_t>(lo)] = 1;
  };

  for (std::size_t w = 0; w < n_windows;) {
    if (!killed[w]) {
      ++w;
      continue;
    }
    std::size_t end = w;
    while (end < n_windows && killed[end]) ++end;
    const Spoil kind = coin(rng) ? Spoil::pause : Spoil::dropout;
    const int player = who(rng);
    const bool sw = kind == Spoil::pause && coin(rng);
    if (end - w == 1) {
      // Lone window 0: spoil its leading frames that no other window covers.
      const std::int64_t lo = 2, hi = window_start_offset(1, ex) - 2;
      spoil_range(lo, std::min(hi, lo + pause_len), kind, player, false);
    } else {
      for (std::size_t i = w; i + 1 < end; ++i) {
        const std::int64_t lo = window_start_offset(i + 1, ex);
        const std::int64_t hi = window_start_offset(i, ex) + W;
        spoil_range(lo + 2, std::min(hi - 2, lo + 2 + pause_len), kind, player,
                    sw && i == w);
      }
    }
    w = end;
  }

  // Kinematics.
  const Pitch pitch = ex.pitch;
  const std::size_t n = opts.team_size;
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double dt = 1.0 / opts.hz;
  const auto& shape = formation(n);
  std::vector<Player> players(2 * n);
  double block[2] = {0.0, 0.0};  // block center x per team (in team frame)
  for (std::size_t i = 0; i < 2 * n; ++i) {
    const bool home = i < n;
    players[i].anchor = shape[i % n];
    const double dir = home ? 1.0 : -1.0;
    players[i].pos = {dir * (players[i].anchor.x() * 0.8 - 5.0), dir * players[i].anchor.y()};
  }
  int possessing = 0;  // 0 home, 1 away
  std::size_t carrier = n - 1;
  std::size_t receiver = carrier;
  Eigen::Vector2d ball = players[carrier].pos;
  bool passing = false;
  double next_pass = 2.0;
  double t_sec = 0.0;

  auto clamp_pitch = [&](Eigen::Vector2d p) {
    p.x() = std::clamp(p.x(), -pitch.half_length() + 0.5, pitch.half_length() - 0.5);
    p.y() = std::clamp(p.y(), -pitch.half_width() + 0.5, pitch.half_width() - 0.5);
    return p;
  };

  TrackingTable table;
  table.rows.reserve(static_cast<std::size_t>(total_frames) * (2 * n + 1));

  for (std::int64_t f = 0; f < total_frames; ++f) {
    const auto fu = static_cast<std::size_t>(f);
    t_sec += dt;
    if (switch_at[fu]) {
      possessing = 1 - possessing;
      // New carrier: nearest player of the new team takes the dead ball.
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t idx = possessing * n + i;
        const double d = (players[idx].pos - ball).norm();
        if (d < best) best = d, carrier = idx;
      }
      passing = false;
    }

    // Blocks: attackers push forward, defenders drop toward their goal.
    const double push = 0.8 * dt;
    block[possessing] = std::min(block[possessing] + push, 18.0);
    block[1 - possessing] = std::max(block[1 - possessing] - push, -18.0);

    for (std::size_t i = 0; i < 2 * n; ++i) {
      auto& p = players[i];
      const int team = i < n ? 0 : 1;
      const double dir = team == 0 ? 1.0 : -1.0;
      // Defenders sit deeper than the attackers in the same region.
      const double depth = team == possessing ? 0.0 : 12.0;
      p.wander += (-0.3 * p.wander + 2.0 * Eigen::Vector2d(gauss(rng), gauss(rng))) * dt;
      Eigen::Vector2d target{dir * (p.anchor.x() + block[team] - depth) , dir * p.anchor.y()};
      target += p.wander * 3.0;
      if (team == possessing) target.y() += 0.15 * (ball.y() - target.y());
      else target += 0.25 * (ball - target);
      Eigen::Vector2d desired = (target - p.pos) * 0.8;
      if (desired.norm() > 7.0) desired *= 7.0 / desired.norm();
      p.vel += (desired - p.vel) * std::min(1.0, 2.0 * dt);
      p.pos = clamp_pitch(p.pos + p.vel * dt);
    }

    if (spoil[fu] == Spoil::pause) {
      // Dead ball: it stays where it is.
    } else if (passing) {
      const Eigen::Vector2d to = players[receiver].pos - ball;
      const double step = 16.0 * dt;
      if (to.norm() <= step) {
        carrier = receiver;
        passing = false;
        next_pass = t_sec + 1.5 + std::abs(gauss(rng));
      } else {
        ball += to / to.norm() * step;
      }
    } else {
      const double wobble = 2.0 * std::numbers::pi * 1.3 * t_sec;
      ball = players[carrier].pos + Eigen::Vector2d(0.6 * std::cos(wobble), 0.6 * std::sin(wobble));
      if (t_sec >= next_pass) {
        // Short pass to the nearest teammate that is not the carrier.
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i) {
          const std::size_t idx = possessing * n + i;
          if (idx == carrier) continue;
          const double d = (players[idx].pos - ball).norm() + 6.0 * std::abs(gauss(rng));
          if (d < best) best = d, receiver = idx;
        }
        passing = true;
      }
    }
    ball = clamp_pitch(ball);

    for (std::size_t i = 0; i < 2 * n; ++i) {
      if (spoil[fu] == Spoil::dropout && dropped_player[fu] == static_cast<int>(i)) continue;
      table.rows.push_back({f, static_cast<std::int64_t>(i + 1), i < n ? TrackTeam::home : TrackTeam::away,
                            players[i].pos.x(), players[i].pos.y()});
    }
    table.rows.push_back({f, 0, TrackTeam::ball, ball.x(), ball.y()});
  }
  return table;
}

}  // namespace simtuple
