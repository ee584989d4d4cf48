#include "helpers.hpp"
#include "repeat_logs.hpp"

#include "simtuple/cluster.hpp"
#include "simtuple/error.hpp"
#include "simtuple/metrics.hpp"
#include "simtuple/report.hpp"
#include "simtuple/simulate.hpp"

#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

using namespace simtuple;
using namespace simtuple::test;

namespace {

// Complete linkage by brute force over leaf sets: the linkage of two clusters
// is recomputed from the original matrix at every step.
struct NaiveMerge {
  std::set<std::size_t> members;
  double height;
};
std::vector<NaiveMerge> naive_complete_linkage(const Eigen::MatrixXd& D) {
  std::vector<std::set<std::size_t>> clusters;
  for (Eigen::Index i = 0; i < D.rows(); ++i) clusters.push_back({static_cast<std::size_t>(i)});
  std::vector<NaiveMerge> out;
  while (clusters.size() > 1) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i < clusters.size(); ++i)
      for (std::size_t j = i + 1; j < clusters.size(); ++j) {
        double link = 0.0;
        for (auto a : clusters[i])
          for (auto b : clusters[j])
            link = std::max(link, D(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)));
        if (link < best) {
          best = link;
          bi = i;
          bj = j;
        }
      }
    std::set<std::size_t> merged = clusters[bi];
    merged.insert(clusters[bj].begin(), clusters[bj].end());
    out.push_back({merged, best});
    clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(bj));
    clusters[bi] = merged;
  }
  return out;
}

std::set<std::size_t> leaves(const Dendrogram& t, std::size_t id) {
  if (id < t.n) return {id};
  const auto& m = t.merges[id - t.n];
  auto a = leaves(t, m.a);
  const auto b = leaves(t, m.b);
  a.insert(b.begin(), b.end());
  return a;
}

Eigen::MatrixXd random_symmetric(std::mt19937_64& rng, Eigen::Index n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) D(i, j) = D(j, i) = u(rng);
  return D;
}

// Logs of a few scripted annotators on the tiny study.
const std::vector<std::vector<Event>>& scripted_logs() {
  static const std::vector<std::vector<Event>> logs = [] {
    const auto ctx = tiny_context();
    std::vector<std::vector<Event>> out;
    for (std::uint64_t i = 0; i < 4; ++i)
      out.push_back(run_scripted(ctx, "ann-" + std::to_string(i), 100 + i, ScriptedAnnotator(i, 0.1 + 0.1 * i)));
    return out;
  }();
  return logs;
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_SUITE("metrics") {
  TEST_CASE("effectiveness arithmetic") {
    const auto e = effectiveness(0.7, 10.0, 0.0, 3);
    CHECK(e.E == doctest::Approx(0.07));
    CHECK(e.TE == e.E);
    CHECK(effectiveness(0.75, 10.0, 5.0, 10).LE == doctest::Approx(0.075));
    CHECK(effectiveness(0.75, 10.0, 5.0, 10).TE == doctest::Approx(0.05));
    CHECK(effectiveness(0.6, 10.0, 0.0, 0).LE == 0.6);
    CHECK(effectiveness(0.6, 10.0, 0.0, 1).LE == 0.6);
    CHECK_THROWS_AS(effectiveness(0.5, 0.0, 1.0, 0), Error);
    CHECK_THROWS_AS(effectiveness(0.5, -1.0, 1.0, 0), Error);
    CHECK_THROWS_AS(effectiveness(0.5, 1.0, -1.0, 0), Error);
  }

  TEST_CASE("effectiveness orderings hold for random inputs") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> acc(0.0, 1.0), t(0.1, 60.0);
    for (int i = 0; i < 1000; ++i) {
      const double a = acc(rng), rt = t(rng), ct = t(rng);
      const auto skips = static_cast<std::size_t>(i % 7);
      const auto e = effectiveness(a, rt, ct, skips);
      CHECK(e.TE <= e.E);
      CHECK(e.E == doctest::Approx(a / rt));
      CHECK(e.TE == doctest::Approx(a / (rt + ct)));
      CHECK(e.LE == doctest::Approx(a / std::max<double>(1.0, static_cast<double>(skips))));
    }
  }

  TEST_CASE("consistency counts agreements and skip pairs") {
    std::vector<Answer> same;
    for (int i = 0; i < 20; ++i) same.push_back(i % 5 == 0 ? Answer{} : Answer{i % 4});
    CHECK(consistency(repeat_log(same, same)) == 1.0);

    std::vector<Answer> differ;
    for (const auto& a : same) differ.push_back(a ? Answer{(*a + 1) % 4} : Answer{0});
    CHECK(consistency(repeat_log(same, differ)) == 0.0);

    std::vector<Answer> half = same;
    for (std::size_t i = 0; i < 10; ++i) half[i] = differ[i];
    CHECK(consistency(repeat_log(same, half)) == 0.5);

    CHECK(consistency(repeat_log({Answer{}, Answer{1}}, {Answer{}, Answer{}})) == 0.5);
    CHECK_THROWS_AS(consistency(repeat_log(same, {})), Error);
  }

  TEST_CASE("consistency and reliability ignore on-screen body order") {
    std::mt19937_64 rng(3);
    for (int rep = 0; rep < 50; ++rep) {
      const auto r1 = random_answers(rng, 20);
      auto r2 = r1;
      for (std::size_t i = 0; i < r2.size(); i += 3) r2[i] = random_answers(rng, 1)[0];
      const auto log = repeat_log(r1, r2);
      const auto other = repeat_log(random_answers(rng, 20), {});
      const auto shuffled = shuffle_bodies(log, rng);
      CHECK(consistency(shuffled) == consistency(log));
      CHECK(reliability(shuffled, other) == reliability(log, other));
    }
  }

  TEST_CASE("reliability") {
    std::mt19937_64 rng(4);
    const auto a = repeat_log(random_answers(rng, 20), {});
    CHECK(reliability(a, a) == 1.0);
    std::vector<Answer> x(20, Answer{0}), y(20, Answer{1}), z(20, Answer{});
    CHECK(reliability(repeat_log(x, {}), repeat_log(y, {})) == 0.0);
    // A skip is an outcome of its own.
    CHECK(reliability(repeat_log(x, {}), repeat_log(z, {})) == 0.0);
    CHECK(reliability(repeat_log(z, {}), repeat_log(z, {})) == 1.0);
    for (int rep = 0; rep < 50; ++rep) {
      const auto p = repeat_log(random_answers(rng, 20), {}), q = repeat_log(random_answers(rng, 15), {});
      CHECK(reliability(p, q) == reliability(q, p));
      const double r = reliability(p, q);
      CHECK(r >= 0.0);
      CHECK(r <= 1.0);
    }
    std::vector<Event> empty;
    make_event(empty, "session_created", {{"annotator_id", "e"}});
    CHECK_THROWS_AS(reliability(a, empty), Error);
  }

  TEST_CASE("triplet accuracy") {
    // One-dimensional embedding that reproduces the ground truth exactly.
    Eigen::MatrixXd e(1, 6);
    e << 0, 1, 3, 6, 10, 15;
    TripletSet truth;
    for (std::size_t a = 0; a < 6; ++a)
      for (std::size_t p = 0; p < 6; ++p)
        for (std::size_t n = 0; n < 6; ++n)
          if (a != p && a != n && p != n && std::abs(e(0, a) - e(0, p)) < std::abs(e(0, a) - e(0, n)))
            truth.push_back({a, p, n});
    CHECK(triplet_accuracy(e, truth) == 1.0);
    TripletSet flipped;
    for (const auto& t : truth) flipped.push_back({t.a, t.n, t.p});
    CHECK(triplet_accuracy(e, flipped) == 0.0);
    // Ties count as errors.
    Eigen::MatrixXd flat = Eigen::MatrixXd::Zero(2, 6);
    CHECK(triplet_accuracy(flat, truth) == 0.0);
    CHECK_THROWS_AS(triplet_accuracy(e, {}), Error);

    std::mt19937_64 rng(5);
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd r(4, 200);
    for (Eigen::Index i = 0; i < r.size(); ++i) r.data()[i] = normal(rng);
    std::uniform_int_distribution<std::size_t> pick(0, 199);
    TripletSet random;
    while (random.size() < 20000) {
      const Triplet t{pick(rng), pick(rng), pick(rng)};
      if (t.a != t.p && t.a != t.n && t.p != t.n) random.push_back(t);
    }
    CHECK(triplet_accuracy(r, random) == doctest::Approx(0.5).epsilon(0.04));
  }

  TEST_CASE("model accuracy matches accuracy on its embeddings") {
    const auto ctx = tiny_context();
    std::mt19937_64 rng(6);
    std::uniform_int_distribution<std::size_t> pick(0, ctx->dataset.size() - 1);
    TripletSet t;
    while (t.size() < 300) {
      const Triplet x{pick(rng), pick(rng), pick(rng)};
      if (x.a != x.p && x.a != x.n && x.p != x.n) t.push_back(x);
    }
    CHECK(triplet_accuracy(ctx->base, ctx->dataset.inputs, t) == triplet_accuracy(ctx->base_store.embeddings(), t));
  }
}

TEST_SUITE("cluster") {
  TEST_CASE("complete linkage matches the brute-force computation") {
    std::mt19937_64 rng(7);
    for (int rep = 0; rep < 30; ++rep) {
      const auto D = random_symmetric(rng, 6);
      const auto tree = complete_linkage(D);
      const auto naive = naive_complete_linkage(D);
      REQUIRE(tree.merges.size() == 5);
      for (std::size_t i = 0; i < 5; ++i) {
        CHECK(tree.merges[i].height == naive[i].height);
        CHECK(leaves(tree, 6 + i) == naive[i].members);
        CHECK(tree.merges[i].size == naive[i].members.size());
      }
    }
  }

  TEST_CASE("identical raters merge at zero") {
    Eigen::MatrixXd R(3, 3);
    R << 1.0, 1.0, 0.4,  //
        1.0, 1.0, 0.5,   //
        0.4, 0.5, 1.0;
    const auto c = cluster_annotators(R);
    CHECK(c.tree.merges[0].height == 0.0);
    CHECK(leaves(c.tree, 3) == std::set<std::size_t>{0, 1});
    CHECK(c.tree.merges[1].height == doctest::Approx(0.6));
    CHECK(c.labels == std::vector<std::size_t>{0, 0, 1});
  }

  TEST_CASE("two perfect blocks give two clusters at any cut between the block linkages") {
    const std::vector<int> block = {0, 1, 0, 1, 1, 0, 0};
    Eigen::MatrixXd R(7, 7);
    for (Eigen::Index i = 0; i < 7; ++i)
      for (Eigen::Index j = 0; j < 7; ++j) R(i, j) = block[i] == block[j] ? 1.0 : 0.3;
    for (double cut : {0.0, 0.2, 0.37, 0.69}) {
      const auto c = cluster_annotators(R, cut);
      CHECK(std::set<std::size_t>(c.labels.begin(), c.labels.end()).size() == 2);
      for (std::size_t i = 0; i < 7; ++i)
        for (std::size_t j = 0; j < 7; ++j) CHECK((c.labels[i] == c.labels[j]) == (block[i] == block[j]));
    }
    CHECK(cluster_annotators(R, 0.7).labels == std::vector<std::size_t>(7, 0));
  }

  TEST_CASE("cut labels follow first leaf order and heights never decrease") {
    std::mt19937_64 rng(8);
    for (int rep = 0; rep < 20; ++rep) {
      const auto D = random_symmetric(rng, 9);
      const auto tree = complete_linkage(D);
      for (std::size_t i = 1; i < tree.merges.size(); ++i) CHECK(tree.merges[i].height >= tree.merges[i - 1].height);
      const auto labels = cut_tree(tree, 0.5);
      std::size_t next = 0;
      for (auto l : labels) {
        CHECK(l <= next);
        if (l == next) ++next;
      }
      CHECK(cut_tree(tree, -1.0) == std::vector<std::size_t>{0, 1, 2, 3, 4, 5, 6, 7, 8});
      CHECK(cut_tree(tree, 2.0) == std::vector<std::size_t>(9, 0));
    }
  }

  TEST_CASE("dendrogram json nests every leaf once") {
    std::mt19937_64 rng(9);
    const auto tree = complete_linkage(random_symmetric(rng, 5));
    const auto j = dendrogram_json(tree, {"a", "b", "c", "d", "e"});
    CHECK(j["size"] == 5);
    std::multiset<std::string> seen;
    auto walk = [&](auto&& self, const nlohmann::json& node) -> void {
      if (node.contains("leaf")) {
        seen.insert(node["label"].get<std::string>());
        return;
      }
      for (const auto& c : node["children"]) self(self, c);
    };
    walk(walk, j);
    CHECK(seen == std::multiset<std::string>{"a", "b", "c", "d", "e"});
    CHECK_THROWS_AS(dendrogram_json(tree, {"a"}), Error);
  }

  TEST_CASE("clustering rejects unusable matrices") {
    Eigen::MatrixXd R = Eigen::MatrixXd::Identity(3, 3);
    R(0, 1) = 0.5;
    CHECK_THROWS_AS(cluster_annotators(R), Error);
    CHECK_THROWS_AS(cluster_annotators(Eigen::MatrixXd::Ones(2, 3)), Error);
    const auto one = cluster_annotators(Eigen::MatrixXd::Ones(1, 1));
    CHECK(one.labels == std::vector<std::size_t>{0});
  }
}

TEST_SUITE("report") {
  TEST_CASE("report layout and value ranges") {
    const auto& logs = scripted_logs();
    const auto report = build_report(logs);
    CHECK(report["schema"] == kReportSchema);
    REQUIRE(report["annotators"].size() == logs.size());
    for (const auto& a : report["annotators"]) {
      CHECK(a["complete"] == true);
      const double c = a["consistency"];
      CHECK(c >= 0.0);
      CHECK(c <= 1.0);
      for (const auto& [name, p] : a["phases"].items()) {
        CHECK(p["skip_rate"].get<double>() >= 0.0);
        CHECK(p["skip_rate"].get<double>() <= 1.0);
        CHECK(p["skips"].get<std::size_t>() <= p["queries"].get<std::size_t>());
      }
      for (const char* s : {"random", "random_nn", "nn", "active_nn", "infotuple"}) {
        REQUIRE(a["effectiveness"].contains(s));
        const auto& e = a["effectiveness"][s];
        const auto eff = effectiveness(e["accuracy"], e["response_s"], e["compute_s"], e["skips"]);
        CHECK(e["E"] == eff.E);
        CHECK(e["TE"] == eff.TE);
        CHECK(e["LE"] == eff.LE);
        CHECK(e["accuracy"] == a["final_accuracy"][s]);
        CHECK(e["accuracy"] == a["curves"][s].back());
      }
      for (const char* p : {"base", "warm_start", "all_tuples"}) CHECK(a["accuracy"].contains(p));
    }
    const auto& R = report["reliability"]["matrix"];
    REQUIRE(R.size() == logs.size());
    for (std::size_t i = 0; i < R.size(); ++i) {
      CHECK(R[i][i] == 1.0);
      for (std::size_t j = 0; j < R.size(); ++j) {
        CHECK(R[i][j] == R[j][i]);
        CHECK(R[i][j] == (i == j ? 1.0 : reliability(logs[i], logs[j])));
      }
    }
    CHECK(report["clusters"]["labels"].size() == logs.size());
    CHECK(report["clusters"]["threshold"] == 0.37);
    CHECK(report["strategies"].size() == 5);
  }

  TEST_CASE("compute time adds query selection and retraining once") {
    const auto& log = scripted_logs()[0];
    const auto report = build_report({log});
    double query_ms = 0.0, retrain_ms = 0.0;
    std::size_t queries = 0;
    for (const auto& e : log) {
      if (e.type == "query" && e.data["phase"] == "rq3_infotuple") {
        query_ms += e.data["compute_ms"].get<double>();
        ++queries;
      }
      if (e.type == "retrain" && e.data["phase"] == "rq3_infotuple") retrain_ms += e.data["compute_ms"].get<double>();
    }
    const double expected = (query_ms + retrain_ms) / static_cast<double>(queries) / 1000.0;
    CHECK(report["annotators"][0]["phases"]["rq3_infotuple"]["compute_s"].get<double>() == doctest::Approx(expected));
  }

  TEST_CASE("reports are a pure function of the logs") {
    const auto& logs = scripted_logs();
    const auto report = build_report(logs);
    CHECK(build_report(logs) == report);
    TempDir dir("report");
    std::vector<std::vector<Event>> reread;
    for (std::size_t i = 0; i < logs.size(); ++i) {
      const auto path = (dir.path() / ("log" + std::to_string(i) + ".jsonl")).string();
      write_event_log(path, logs[i]);
      reread.push_back(read_event_log(path));
      CHECK(reread.back() == logs[i]);
    }
    CHECK(build_report(reread).dump() == report.dump());
    // Wall-clock fields do not enter the report.
    auto shifted = logs;
    for (auto& log : shifted)
      for (auto& e : log) {
        e.ts_ms += 12345;
        if (e.data.contains("created_at_ms")) e.data["created_at_ms"] = 0;
      }
    CHECK(build_report(shifted) == report);
  }

  TEST_CASE("report of partial logs") {
    const auto& full = scripted_logs()[1];
    std::vector<Event> partial;
    for (const auto& e : full) {
      partial.push_back(e);
      if (e.type == "phase_completed" && e.data["phase"] == "rq2_rnd") break;
    }
    const auto report = build_report({partial, scripted_logs()[0]});
    CHECK(report["annotators"][0]["complete"] == false);
    CHECK(report["annotators"][0]["consistency"].is_null());
    CHECK(report["reliability"]["annotators"].size() == 2);
  }

  TEST_CASE("csv exports") {
    const auto report = build_report(scripted_logs());
    std::ostringstream acc, rt, eff;
    write_accuracy_csv(acc, report);
    write_response_time_csv(rt, report);
    write_effectiveness_csv(eff, report);
    CHECK(acc.str().rfind("annotator,strategy,step,accuracy\n", 0) == 0);
    CHECK(rt.str().rfind("annotator,phase,queries,skips,skip_rate,mean_response_s,compute_s\n", 0) == 0);
    CHECK(eff.str().rfind("annotator,strategy,accuracy,response_s,compute_s,skips,E,TE,LE\n", 0) == 0);
    std::size_t points = 0;
    for (const auto& a : report["annotators"]) {
      for (const auto& [s, c] : a["curves"].items()) points += c.size();
      points += a["accuracy"].size();
    }
    CHECK(count_lines(acc.str()) == 1 + points);
    CHECK(count_lines(rt.str()) == 1 + 8 * scripted_logs().size());
    CHECK(count_lines(eff.str()) == 1 + 5 * scripted_logs().size());
  }

  TEST_CASE("combined warm start") {
    const auto ctx = tiny_context();
    const auto& logs = scripted_logs();
    const auto own = repeat1_triplets(logs[0], ctx->dataset);
    CHECK(combine_warmstart({&logs[0]}, ctx->dataset) == own);
    std::size_t warm = 0;
    for (const auto& e : logs[0])
      if (e.type == "retrain" && e.data["phase"] == "repeat1") warm = e.data["triplets"];
    CHECK(own.size() == warm);
    const auto both = combine_warmstart({&logs[0], &logs[1]}, ctx->dataset);
    CHECK(both.size() == own.size() + repeat1_triplets(logs[1], ctx->dataset).size());
    CHECK_THROWS_AS(combine_warmstart({}, ctx->dataset), Error);
    CHECK_THROWS_AS(combine_warmstart({&logs[0]}, Dataset{}), Error);
    std::vector<Event> early(logs[0].begin(), logs[0].begin() + 4);
    CHECK_THROWS_AS(combine_warmstart({&early}, ctx->dataset), Error);
  }

  TEST_CASE("two full repeat rounds without skips combine to 280 triplets") {
    // Twenty 9-tuples answered by two annotators over the same scenes.
    Dataset ds;
    for (int i = 0; i < 30; ++i) {
      Scene s;
      s.id = "s" + std::to_string(i);
      ds.by_id[s.id] = ds.scenes.size();
      ds.scenes.push_back(s);
    }
    auto annotator = [&](int shift) {
      std::vector<Event> log;
      make_event(log, "session_created", {{"annotator_id", "a"}});
      for (int q = 0; q < 20; ++q) {
        std::vector<std::string> body;
        for (int b = 1; b <= 8; ++b) body.push_back("s" + std::to_string((q + b) % 30));
        const std::string id = "repeat-" + std::to_string(q);
        make_event(log, "query",
                   {{"query_id", id}, {"phase", "repeat1"}, {"head", "s" + std::to_string((q + 20) % 30)},
                    {"body", body}, {"repeat_of", id}});
        make_event(log, "response",
                   {{"query_id", id}, {"choice", (q + shift) % 8}, {"chosen", body[(q + shift) % 8]},
                    {"response_ms", 1.0}});
      }
      make_event(log, "phase_completed", {{"phase", "repeat1"}});
      return log;
    };
    const auto a = annotator(0), b = annotator(3);
    CHECK(repeat1_triplets(a, ds).size() == 140);
    CHECK(combine_warmstart({&a, &b}, ds).size() == 280);
  }

  TEST_CASE("strategy phases") {
    CHECK(strategy_phase("random") == "rq2_rnd");
    CHECK(strategy_phase("random_nn") == "rq2_mixed");
    CHECK(strategy_phase("nn") == "rq2_nn");
    CHECK(strategy_phase("active_nn") == "rq3_active_nn");
    CHECK(strategy_phase("infotuple") == "rq3_infotuple");
    CHECK_THROWS_AS(strategy_phase("base"), Error);
  }
}

TEST_SUITE("simulate") {
  TEST_CASE("a one-oracle study with unit quotas completes") {
    SimulationConfig cfg;
    cfg.n_scenes = 40;
    cfg.synth = tiny_profile();
    cfg.arch = tiny_arch();
    cfg.pretrain.pair_budget = 200;
    cfg.pretrain.epochs = 2;
    cfg.study = simulation_study_defaults(cfg.n_scenes);
    cfg.study.quotas = {1, 1, 1, 1, 1, 1};
    cfg.study.posterior.B = 2;
    cfg.cohort.n = 1;
    cfg.random_calibration_queries = 100;
    cfg.seed = 3;
    const auto result = simulate(cfg);
    REQUIRE(result.logs.size() == 1);
    REQUIRE(result.report["annotators"].size() == 1);
    CHECK(result.report["annotators"][0]["complete"] == true);
    CHECK(result.cohort.size() == 1);
    CHECK(result.report == build_report(result.logs));
  }

  TEST_CASE("simulated studies meet quotas, are reproducible and carry error context") {
    SimulationConfig cfg;
    cfg.n_scenes = 40;
    cfg.synth = tiny_profile();
    cfg.arch = tiny_arch();
    cfg.pretrain.pair_budget = 200;
    cfg.pretrain.epochs = 2;
    cfg.study = simulation_study_defaults(cfg.n_scenes);
    cfg.study.k = 5;
    cfg.study.quotas = {2, 3, 6, 3, 2, 3};
    cfg.study.posterior.B = 2;
    cfg.random_calibration_queries = 100;
    cfg.seed = 4;
    const auto world = build_world(cfg);
    CohortSpec spec;
    spec.n = 3;
    spec.seed = 4;
    const auto cohort = make_cohort(spec, world.cohort_context);
    const auto a = run_simulated_study(world, cohort, 4);
    const auto b = run_simulated_study(world, cohort, 4);
    // Measured compute times differ between runs; everything else agrees.
    REQUIRE(a.logs.size() == b.logs.size());
    for (std::size_t i = 0; i < a.logs.size(); ++i) CHECK(equivalent_modulo_time(a.logs[i], b.logs[i]));
    for (std::size_t i = 0; i < a.logs.size(); ++i)
      CHECK(a.report["annotators"][i]["final_accuracy"] == b.report["annotators"][i]["final_accuracy"]);
    CHECK(a.report["reliability"] == b.report["reliability"]);
    const auto& qt = cfg.study.quotas;
    for (const auto& log : a.logs) {
      std::map<std::string, std::size_t> nonskip, test;
      for (const auto& ans : logged_answers(log))
        if (ans.chosen) ++(ans.test ? test : nonskip)[ans.phase];
      CHECK(nonskip["warmup"] == qt.warmup);
      CHECK(nonskip["repeat1"] <= qt.repeat);
      for (const char* p : {"rq2_rnd", "rq2_mixed", "rq2_nn"}) {
        CHECK(nonskip[p] == qt.rq2_train);
        CHECK(test[p] == qt.rq2_test);
      }
      CHECK(nonskip["rq3_active_nn"] == qt.rq3);
      CHECK(nonskip["rq3_infotuple"] == qt.rq3);
    }
    // Logical clock: timestamps advance by the simulated response times.
    CHECK(a.logs[0].front().ts_ms == 0);
    CHECK(a.logs[0].back().ts_ms > 0);

    // An oracle that only knows the first ten scenes fails mid-session.
    const std::vector<Scene> few(world.scenes.begin(), world.scenes.begin() + 10);
    const DistanceTable small(few);
    Oracle partial(cohort[0], LatentMetric(small, std::vector<std::optional<Archetype>>(10), cohort[0]));
    try {
      run_oracle_session(world, partial, 1);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find("oracle-0") != std::string::npos);
    }
  }
}
