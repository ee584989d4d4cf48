#include "helpers.hpp"

#include "simtuple/error.hpp"
#include "simtuple/hungarian.hpp"
#include "simtuple/scene_distance.hpp"
#include "simtuple/scene_io.hpp"
#include "simtuple/synth.hpp"
#include "simtuple/template_order.hpp"
#include "simtuple/tracking.hpp"

#include <doctest.h>

#include <numeric>
#include <sstream>

using namespace simtuple;
using simtuple::test::random_scene;
using simtuple::test::roster;

namespace {

double brute_force_min(const Eigen::MatrixXd& c) {
  std::vector<std::size_t> perm(static_cast<std::size_t>(c.rows()));
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double s = 0.0;
    for (std::size_t i = 0; i < perm.size(); ++i) s += c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(perm[i]));
    best = std::min(best, s);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

bool is_permutation_of_n(const std::vector<std::size_t>& p, std::size_t n) {
  std::vector<std::size_t> s = p;
  std::sort(s.begin(), s.end());
  for (std::size_t i = 0; i < n; ++i)
    if (s.size() != n || s[i] != i) return false;
  return true;
}

// Clean two-a-side tracking: home hugs the ball, which rolls at 2 m/s.
TrackingTable clean_tracking(std::int64_t frames, double hz = 25.0) {
  TrackingTable t;
  for (std::int64_t f = 0; f < frames; ++f) {
    const double bx = -20.0 + 2.0 * static_cast<double>(f) / hz;
    t.rows.push_back({f, 1, TrackTeam::home, bx - 1.0, 0.0});
    t.rows.push_back({f, 2, TrackTeam::home, bx - 5.0, 8.0});
    t.rows.push_back({f, 3, TrackTeam::away, bx + 15.0, -5.0});
    t.rows.push_back({f, 4, TrackTeam::away, bx + 20.0, 5.0});
    t.rows.push_back({f, 99, TrackTeam::ball, bx, 0.5});
  }
  return t;
}

ExtractOptions two_a_side() {
  ExtractOptions o;
  o.team_size = 2;
  return o;
}

}  // namespace

TEST_SUITE("traj") {
  TEST_CASE("hungarian small examples") {
    Eigen::MatrixXd c(2, 2);
    c << 0, 1, 1, 0;
    auto a = hungarian_assign(c);
    CHECK(a.perm == std::vector<std::size_t>{0, 1});
    CHECK(a.cost == 0.0);

    Eigen::MatrixXd one(1, 1);
    one << 5;
    a = hungarian_assign(one);
    CHECK(a.perm == std::vector<std::size_t>{0});
    CHECK(a.cost == 5.0);
  }

  TEST_CASE("hungarian matches exhaustive search on random 6x6") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      std::mt19937_64 rng(seed);
      std::uniform_real_distribution<double> u(0.0, 10.0);
      Eigen::MatrixXd c(6, 6);
      for (Eigen::Index i = 0; i < c.size(); ++i) c.data()[i] = u(rng);
      const auto a = hungarian_assign(c);
      REQUIRE(is_permutation_of_n(a.perm, 6));
      double s = 0.0;
      for (std::size_t i = 0; i < 6; ++i) s += c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(a.perm[i]));
      CHECK(s == doctest::Approx(a.cost).epsilon(1e-12));
      CHECK(std::abs(a.cost - brute_force_min(c)) < 1e-9);
    }
  }

  TEST_CASE("hungarian handles ties and integer costs for every n up to 7") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> u(0, 3);
    for (int n = 1; n <= 7; ++n)
      for (int rep = 0; rep < 20; ++rep) {
        Eigen::MatrixXd c(n, n);
        for (Eigen::Index i = 0; i < c.size(); ++i) c.data()[i] = u(rng);
        CHECK(std::abs(hungarian_assign(c).cost - brute_force_min(c)) < 1e-9);
      }
  }

  TEST_CASE("hungarian rejects bad input") {
    CHECK_THROWS_AS(hungarian_assign(Eigen::MatrixXd::Zero(2, 3)), Error);
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(2, 2);
    c(0, 1) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(hungarian_assign(c), Error);
  }

  TEST_CASE("scene distance examples") {
    Scene a, b;
    a.roles = b.roles = {Role::ball};
    a.x = RowMatrix::Zero(1, 1);
    a.y = RowMatrix::Zero(1, 1);
    b.x = RowMatrix::Constant(1, 1, 3.0);
    b.y = RowMatrix::Constant(1, 1, 4.0);
    CHECK(scene_distance(a, b) == doctest::Approx(5.0));
    CHECK(scene_distance(a, a) == 0.0);

    std::mt19937_64 rng(1);
    const Scene s = random_scene(rng, {Role::possession, Role::possession, Role::ball}, 20);
    const Scene t = random_scene(rng, {Role::possession, Role::possession, Role::ball}, 20);
    const Scene t_swapped = permute_rows(t, {1, 0, 2});
    CHECK(scene_distance(s, t) == doctest::Approx(scene_distance(s, t_swapped)).epsilon(1e-12));
  }

  TEST_CASE("scene distance equals the exhaustive per-role minimum") {
    std::mt19937_64 rng(5);
    const auto roles = roster(4);
    for (int rep = 0; rep < 10; ++rep) {
      const Scene a = random_scene(rng, roles, 12), b = random_scene(rng, roles, 12);
      Eigen::MatrixXd pos(4, 4), def(4, 4);
      for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) {
          pos(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row_distance(a, i, b, j);
          def(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row_distance(a, 4 + i, b, 4 + j);
        }
      const double best = brute_force_min(pos) + brute_force_min(def) + row_distance(a, 8, b, 8);
      CHECK(scene_distance(a, b) == doctest::Approx(best).epsilon(1e-12));
    }
  }

  TEST_CASE("scene distance properties") {
    std::mt19937_64 rng(9);
    const auto roles = roster(3);
    for (int rep = 0; rep < 25; ++rep) {
      const Scene a = random_scene(rng, roles, 8), b = random_scene(rng, roles, 8);
      const double d = scene_distance(a, b);
      CHECK(d >= 0.0);
      CHECK(d == doctest::Approx(scene_distance(b, a)).epsilon(1e-12));
      std::vector<std::size_t> perm(roles.size());
      std::iota(perm.begin(), perm.end(), 0);
      std::shuffle(perm.begin(), perm.begin() + 3, rng);
      std::shuffle(perm.begin() + 3, perm.begin() + 6, rng);
      const Scene pa = permute_rows(a, perm);
      CHECK(scene_distance(pa, b) == doctest::Approx(d).epsilon(1e-12));
      CHECK(scene_distance(a, pa) == doctest::Approx(0.0).epsilon(1e-12));
    }
  }

  TEST_CASE("scene distance rejects mismatched shapes") {
    std::mt19937_64 rng(2);
    const Scene a = random_scene(rng, roster(2), 5), b = random_scene(rng, roster(2), 6);
    CHECK_THROWS_AS(scene_distance(a, b), Error);
    const Scene c = random_scene(rng, roster(3), 5);
    CHECK_THROWS_AS(scene_distance(a, c), Error);
  }

  TEST_CASE("distance table agrees with direct evaluation") {
    const auto scenes = synth_generate(4, 6, simtuple::test::tiny_profile());
    const DistanceTable table(scenes);
    double sum = 0.0;
    for (std::size_t i = 0; i < 6; ++i)
      for (std::size_t j = 0; j < 6; ++j) {
        CHECK(table.distance(i, j) == doctest::Approx(scene_distance(scenes[i], scenes[j])).epsilon(1e-12));
        if (i < j) sum += table.distance(i, j);
      }
    CHECK(table.mean_distance() == doctest::Approx(sum / 15.0));
  }

  TEST_CASE("template order of a canonical scene is the identity") {
    // Rows already sit on the template circle in slot order.
    Scene s;
    s.roles = roster(5);
    s.x.resize(11, 2);
    s.y.resize(11, 2);
    const auto slots = template_slots(5);
    for (std::size_t i = 0; i < 5; ++i) {
      s.x.row(static_cast<Eigen::Index>(i)).setConstant(10.0 * slots[i].x());
      s.y.row(static_cast<Eigen::Index>(i)).setConstant(10.0 * slots[i].y());
      s.x.row(static_cast<Eigen::Index>(5 + i)).setConstant(20.0 + 6.0 * slots[i].x());
      s.y.row(static_cast<Eigen::Index>(5 + i)).setConstant(6.0 * slots[i].y());
    }
    s.x.row(10).setZero();
    s.y.row(10).setZero();
    std::vector<std::size_t> identity(11);
    std::iota(identity.begin(), identity.end(), 0);
    CHECK(template_order(s).order == identity);
  }

  TEST_CASE("template order canonicalizes row permutations") {
    std::mt19937_64 rng(21);
    const auto roles = roster(5);
    for (int rep = 0; rep < 20; ++rep) {
      const Scene s = random_scene(rng, roles, 6);
      std::vector<std::size_t> pi(roles.size());
      std::iota(pi.begin(), pi.end(), 0);
      std::shuffle(pi.begin(), pi.begin() + 5, rng);
      std::shuffle(pi.begin() + 5, pi.begin() + 10, rng);
      const Scene ps = permute_rows(s, pi);
      const auto o = template_order(s).order;
      const auto po = template_order(ps).order;
      REQUIRE(po.size() == o.size());
      for (std::size_t i = 0; i < o.size(); ++i) CHECK(pi[po[i]] == o[i]);
      CHECK(is_permutation_of_n(o, roles.size()));
    }
  }

  TEST_CASE("template order matches a brute-force circle matching") {
    Scene s;
    s.roles = {Role::possession, Role::possession, Role::possession, Role::possession, Role::defending, Role::ball};
    s.x.resize(6, 1);
    s.y.resize(6, 1);
    const double cx[] = {-5, 5, 5, -5, 30, 0}, cy[] = {5, -5, 5, -5, 0, 0};
    for (Eigen::Index r = 0; r < 6; ++r) {
      s.x(r, 0) = cx[r];
      s.y(r, 0) = cy[r];
    }
    const auto fit = template_order(s).possession;
    const auto unit = template_slots(4);
    std::vector<std::size_t> perm{0, 1, 2, 3}, best_perm;
    double best = std::numeric_limits<double>::infinity();
    do {
      double c = 0.0;
      for (std::size_t j = 0; j < 4; ++j) {
        const Eigen::Vector2d slot = fit.center + unit[j].cwiseProduct(fit.scale);
        c += (Eigen::Vector2d(cx[perm[j]], cy[perm[j]]) - slot).norm();
      }
      if (c < best - 1e-12) best = c, best_perm = perm;
    } while (std::next_permutation(perm.begin(), perm.end()));
    CHECK(fit.order == best_perm);
    // Corners sit at 45, 135, 225 and 315 degrees; slots 0..3 at 0, 90, 180, 270.
    // Angular order must be preserved up to rotation.
    std::vector<double> angles;
    for (auto r : fit.order) angles.push_back(std::atan2(cy[r], cx[r]));
    int increasing = 0;
    for (std::size_t j = 0; j < 4; ++j) {
      double step = angles[(j + 1) % 4] - angles[j];
      if (step < 0) step += 2 * std::numbers::pi;
      increasing += step < std::numbers::pi;
    }
    CHECK(increasing == 4);
  }

  TEST_CASE("degenerate template falls back to input order") {
    Scene s;
    s.roles = roster(3);
    s.x = RowMatrix::Zero(7, 3);
    s.y = RowMatrix::Zero(7, 3);
    const auto t = template_order(s);
    CHECK(t.possession.degenerate);
    CHECK(t.order == std::vector<std::size_t>{0, 1, 2, 3, 4, 5, 6});
  }

  TEST_CASE("extract scenes tiles ten seconds into three windows") {
    ExtractStats stats;
    const auto scenes = extract_scenes(clean_tracking(250), two_a_side(), &stats);
    REQUIRE(scenes.size() == 3);
    CHECK(scenes[0].meta.offset_s == 0.0);
    CHECK(scenes[1].meta.offset_s == doctest::Approx(2.5));
    CHECK(scenes[2].meta.offset_s == doctest::Approx(5.0));
    for (const auto& s : scenes) {
      CHECK(s.steps() == 125);
      CHECK(s.agents() == 5);
      CHECK_NOTHROW(validate(s));
    }
    CHECK(stats.windows == 3);
    CHECK(stats.kept == 3);
  }

  TEST_CASE("extract scenes never emits a partial trailing window") {
    for (std::int64_t frames : {124, 125, 187, 188, 249, 251, 400}) {
      const auto scenes = extract_scenes(clean_tracking(frames), two_a_side());
      const auto opts = two_a_side();
      std::size_t expect = 0;
      while (window_start_offset(expect, opts) + window_frames(opts) <= frames) ++expect;
      CHECK(scenes.size() == expect);
      for (const auto& s : scenes) CHECK(s.steps() == window_frames(opts));
    }
  }

  TEST_CASE("extract scenes filters") {
    // One missing player frame shared by the second and third windows.
    auto t = clean_tracking(250);
    const auto missing = std::find_if(t.rows.begin(), t.rows.end(),
                                      [](const TrackingRow& r) { return r.frame == 150 && r.agent_id == 3; });
    t.rows.erase(missing);
    ExtractStats stats;
    auto scenes = extract_scenes(t, two_a_side(), &stats);
    CHECK(scenes.size() == 1);
    CHECK(stats.missing_agents == 2);

    // The ball stops for two seconds in the first window.
    t = clean_tracking(250);
    for (auto& r : t.rows)
      if (r.team == TrackTeam::ball && r.frame >= 10 && r.frame < 60) r.x = -20.0 + 2.0 * 10 / 25.0;
    scenes = extract_scenes(t, two_a_side(), &stats);
    CHECK(stats.paused == 1);
    CHECK(scenes.size() == 2);

    // Both teams equally close to the ball.
    t = clean_tracking(250);
    for (auto& r : t.rows)
      if (r.agent_id == 3) r.x -= 15.0, r.y = 0.0;
    for (auto& r : t.rows)
      if (r.agent_id == 3 && r.frame % 2 == 0) r.x -= 1.0;
    scenes = extract_scenes(t, two_a_side(), &stats);
    CHECK(scenes.empty());
    CHECK(stats.unclear_possession == 3);
  }

  TEST_CASE("extracted scenes attack toward +x") {
    auto t = clean_tracking(125);
    for (auto& r : t.rows) r.x = -r.x;  // home attacks toward -x
    const auto scenes = extract_scenes(t, two_a_side());
    REQUIRE(scenes.size() == 1);
    const auto& s = scenes[0];
    double pos = 0.0, def = 0.0;
    for (auto r : s.rows_with(Role::possession)) pos += s.x.row(static_cast<Eigen::Index>(r)).mean();
    for (auto r : s.rows_with(Role::defending)) def += s.x.row(static_cast<Eigen::Index>(r)).mean();
    CHECK(pos < def);
  }

  TEST_CASE("tracking csv errors name the row") {
    std::istringstream bad("frame,agent_id,team,x,y\n0,1,home,0,0\n0,1,home,1,1\n");
    try {
      read_tracking_csv(bad);
      FAIL("expected a parse error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::parse);
      CHECK(std::string(e.what()).find('2') != std::string::npos);
    }
    std::istringstream unsorted("frame,agent_id,team,x,y\n1,1,home,0,0\n0,1,home,1,1\n");
    CHECK_THROWS_AS(read_tracking_csv(unsorted), Error);
    std::istringstream junk("frame,agent_id,team,x,y\n0,1,keeper,0,0\n");
    CHECK_THROWS_AS(read_tracking_csv(junk), Error);
  }

  TEST_CASE("tracking csv round trip") {
    const auto t = clean_tracking(30);
    std::stringstream io;
    write_tracking_csv(io, t);
    const auto back = read_tracking_csv(io);
    REQUIRE(back.rows.size() == t.rows.size());
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      CHECK(back.rows[i].frame == t.rows[i].frame);
      CHECK(back.rows[i].x == t.rows[i].x);
    }
  }

  TEST_CASE("synthetic full game yields 1005 scenes") {
    const auto table = synth_tracking_game(17, {});
    ExtractStats stats;
    const auto scenes = extract_scenes(table, ExtractOptions{}, &stats);
    CHECK(scenes.size() == 1005);
    CHECK(stats.kept == 1005);
    CHECK(stats.missing_agents + stats.paused + stats.unclear_possession == stats.windows - 1005);
    CHECK(stats.missing_agents > 0);
    CHECK(stats.paused > 0);
  }

  TEST_CASE("synth is deterministic and follows the profile") {
    const auto a = synth_generate(7, 100), b = synth_generate(7, 100);
    std::ostringstream sa, sb;
    write_scene_archive(sa, a);
    write_scene_archive(sb, b);
    CHECK(sa.str() == sb.str());
    for (const auto& s : a) {
      CHECK(s.agents() == 23);
      CHECK(s.steps() == 125);
      CHECK(s.meta.archetype.has_value());
      CHECK_NOTHROW(validate(s));
    }
    CHECK_THROWS_AS(synth_generate(7, 0), Error);
  }

  TEST_CASE("synth archetype histogram follows the configured mix") {
    SynthProfile p;
    p.duration_s = 0.2;
    const auto scenes = synth_generate(3, 10000, p);
    std::array<double, kArchetypeCount> counts{};
    for (const auto& s : scenes) counts[static_cast<std::size_t>(*s.meta.archetype)] += 1.0;
    double chi2 = 0.0;
    for (std::size_t i = 0; i < kArchetypeCount; ++i) {
      const double expected = 10000.0 * p.archetype_mix[i];
      chi2 += (counts[i] - expected) * (counts[i] - expected) / expected;
    }
    // 99.9th percentile of chi-square with 3 degrees of freedom.
    CHECK(chi2 < 16.27);
  }

  TEST_CASE("scene archive round trip is exact") {
    const auto scenes = synth_generate(2, 5, simtuple::test::tiny_profile());
    std::stringstream io;
    write_scene_archive(io, scenes);
    const auto back = read_scene_archive(io);
    REQUIRE(back.size() == scenes.size());
    for (std::size_t i = 0; i < scenes.size(); ++i) {
      CHECK(back[i].id == scenes[i].id);
      CHECK(back[i].roles == scenes[i].roles);
      CHECK(back[i].x == scenes[i].x);
      CHECK(back[i].y == scenes[i].y);
      CHECK(back[i].meta.archetype == scenes[i].meta.archetype);
    }
  }
}
