#include "simtuple/checkpoint.hpp"
#include "simtuple/error.hpp"
#include "simtuple/report.hpp"
#include "simtuple/scene_distance.hpp"
#include "simtuple/scene_io.hpp"
#include "simtuple/service/config.hpp"
#include "simtuple/service/server.hpp"
#include "simtuple/simulate.hpp"
#include "simtuple/tracking.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace simtuple;

namespace {

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::parse, path + ": " + e.what());
  }
}

void write_json(const fs::path& path, const nlohmann::json& doc) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  out << doc.dump(2) << '\n';
  if (!out) fail(ErrorCode::io, "cannot write " + path.string());
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) fail(ErrorCode::io, "cannot write " + path.string());
  return out;
}

/// Logs in a directory are read in file name order.
std::vector<std::vector<Event>> read_logs(const std::vector<std::string>& paths) {
  std::vector<std::string> files;
  for (const auto& p : paths) {
    if (fs::is_directory(p)) {
      std::vector<std::string> dir;
      for (const auto& f : fs::directory_iterator(p))
        if (f.path().extension() == ".jsonl") dir.push_back(f.path().string());
      std::sort(dir.begin(), dir.end());
      files.insert(files.end(), dir.begin(), dir.end());
    } else {
      files.push_back(p);
    }
  }
  if (files.empty()) fail(ErrorCode::invalid_input, "no session logs found");
  std::vector<std::vector<Event>> logs;
  for (const auto& f : files) logs.push_back(read_event_log(f));
  return logs;
}

service::Service* g_service = nullptr;

void on_signal(int) {
  if (g_service) g_service->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scene similarity annotation: data, training, simulated studies and the annotation service"};
  app.require_subcommand(1);
  std::string log_level = "info";
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error or off")->envname("SIMTUPLE_LOG_LEVEL");

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Cut scenes out of a tracking CSV");
  std::string tracking_path, ingest_out;
  ExtractOptions extract;
  ingest->add_option("--tracking", tracking_path, "CSV with frame,agent_id,team,x,y")->required()->check(CLI::ExistingFile);
  ingest->add_option("--out", ingest_out, "Scene archive to write")->required();
  ingest->add_option("--window", extract.window_s, "Window length in seconds")->capture_default_str();
  ingest->add_option("--overlap", extract.overlap, "Window overlap fraction")->capture_default_str();
  ingest->add_option("--hz", extract.hz, "Frame rate")->capture_default_str();
  ingest->add_option("--team-size", extract.team_size, "Players per team (0 accepts any)")->capture_default_str();
  ingest->add_option("--source", extract.source, "Source tag stored in scene metadata")->capture_default_str();

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic scene archive");
  std::uint64_t synth_seed = 0;
  std::size_t synth_n = 1000;
  std::string synth_out;
  synth->add_option("--seed", synth_seed)->capture_default_str();
  synth->add_option("--n", synth_n, "Number of scenes")->capture_default_str()->check(CLI::PositiveNumber);
  synth->add_option("--out", synth_out, "Scene archive to write")->required();

  // pretrain
  auto* pre = app.add_subcommand("pretrain", "Pretrain the embedding network on the exact scene distance");
  std::string pre_dataset, pre_out;
  Architecture arch;
  PretrainConfig pcfg;
  double pre_scale = 4.0;
  pre->add_option("--dataset", pre_dataset, "Scene archive")->required()->check(CLI::ExistingFile);
  pre->add_option("--out", pre_out, "Checkpoint to write")->required();
  pre->add_option("--seed", pcfg.seed)->capture_default_str();
  pre->add_option("--pairs", pcfg.pair_budget, "Scene pairs")->capture_default_str();
  pre->add_option("--epochs", pcfg.epochs)->capture_default_str();
  pre->add_option("--batch", pcfg.batch)->capture_default_str();
  pre->add_option("--lr", pcfg.adam.lr)->capture_default_str();
  pre->add_option("--width", arch.width)->capture_default_str();
  pre->add_option("--kernel", arch.kernel)->capture_default_str();
  pre->add_option("--blocks", arch.blocks)->capture_default_str();
  pre->add_option("--dim", arch.m, "Embedding dimension")->capture_default_str();
  pre->add_option("--pool", arch.input_pool, "Temporal input pooling")->capture_default_str();
  pre->add_option("--scale", pre_scale, "Embedding units per mean scene distance")->capture_default_str();

  // simulate
  auto* sim = app.add_subcommand("simulate", "Run a simulated study with an oracle cohort");
  SimulationConfig scfg;
  std::string cohort_arg = "default18", sim_out = "simulation", sim_config;
  sim->add_option("--cohort", cohort_arg, "defaultN for a calibrated N-oracle cohort, or a cohort JSON file")
      ->capture_default_str();
  sim->add_option("--seed", scfg.seed)->capture_default_str()->envname("SIMTUPLE_SEED");
  sim->add_option("--n-scenes", scfg.n_scenes)->capture_default_str();
  sim->add_option("--out-dir", sim_out, "Receives report.json, cohort.json and logs/")->capture_default_str();
  sim->add_option("--config", sim_config, "JSON with study settings (k, quotas, finetune, ...)")
      ->check(CLI::ExistingFile);

  // evaluate
  auto* eval = app.add_subcommand("evaluate", "Recompute the metrics report from session logs");
  std::vector<std::string> eval_logs;
  std::string eval_out, eval_check;
  eval->add_option("--logs", eval_logs, "Log files or directories of .jsonl logs")->required();
  eval->add_option("--out", eval_out, "Report to write (stdout when omitted)");
  eval->add_option("--check", eval_check, "Fail unless the result equals this report")->check(CLI::ExistingFile);

  // serve
  auto* serve = app.add_subcommand("serve", "Run the HTTP annotation service");
  std::string serve_config;
  service::ServiceConfig svc;
  serve->add_option("--config", serve_config, "Service config JSON")->check(CLI::ExistingFile)->envname("SIMTUPLE_CONFIG");
  serve->add_option("--dataset", svc.dataset, "Scene archive")->envname("SIMTUPLE_DATASET");
  serve->add_option("--checkpoint", svc.checkpoint, "Model checkpoint")->envname("SIMTUPLE_CHECKPOINT");
  serve->add_option("--storage", svc.storage_dir, "Session log directory")->envname("SIMTUPLE_STORAGE");
  serve->add_option("--host", svc.host)->envname("SIMTUPLE_HOST");
  serve->add_option("--port", svc.port)->envname("SIMTUPLE_PORT");
  serve->add_option("--seed", svc.seed)->envname("SIMTUPLE_SEED");

  // export
  auto* exp = app.add_subcommand("export", "Write CSV tables of a report");
  std::string exp_report, exp_out = "export";
  std::vector<std::string> exp_logs;
  exp->add_option("--report", exp_report, "Report JSON")->check(CLI::ExistingFile);
  exp->add_option("--logs", exp_logs, "Build the report from these logs instead");
  exp->add_option("--out-dir", exp_out)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  spdlog::set_default_logger(spdlog::stderr_color_mt("simtuple"));
  spdlog::set_level(spdlog::level::from_str(log_level));

  try {
    if (*ingest) {
      ExtractStats stats;
      const auto table = read_tracking_csv_file(tracking_path);
      const auto scenes = extract_scenes(table, extract, &stats);
      write_scene_archive(ingest_out, scenes);
      std::cout << nlohmann::json{{"windows", stats.windows},
                                  {"kept", stats.kept},
                                  {"missing_agents", stats.missing_agents},
                                  {"paused", stats.paused},
                                  {"unclear_possession", stats.unclear_possession}}
                       .dump()
                << '\n';
    } else if (*synth) {
      write_scene_archive(synth_out, synth_generate(synth_seed, synth_n));
    } else if (*pre) {
      const auto scenes = read_scene_archive(pre_dataset);
      const Dataset ds = make_dataset(scenes, arch.input_spec());
      const DistanceTable table(scenes);
      if (pre_scale > 0.0 && table.mean_distance() > 0.0) pcfg.distance_unit = table.mean_distance() / pre_scale;
      EmbeddingModel model = make_model(arch, pcfg.seed);
      TrainLog log;
      pretrain(model, ds.inputs, [&](std::size_t i, std::size_t j) { return table.distance(i, j); }, pcfg, &log);
      save_checkpoint(model, pre_out);
      if (!log.epoch_loss.empty()) spdlog::info("pretrain: final epoch loss {:.5f}", log.epoch_loss.back());
    } else if (*sim) {
      scfg.study = simulation_study_defaults(scfg.n_scenes);
      if (!sim_config.empty()) scfg.study = service::study_config_from_json(read_json(sim_config), scfg.study);
      const SimulationWorld world = build_world(scfg);
      std::vector<OracleProfile> cohort;
      if (cohort_arg.rfind("default", 0) == 0) {
        CohortSpec spec = scfg.cohort;
        spec.seed = scfg.seed;
        try {
          spec.n = std::stoul(cohort_arg.substr(7));
        } catch (const std::exception&) {
          fail(ErrorCode::invalid_input, "--cohort: expected defaultN or a file, got '" + cohort_arg + "'");
        }
        cohort = make_cohort(spec, world.cohort_context);
      } else {
        cohort = cohort_from_json(read_json(cohort_arg));
      }
      const SimulationResult result = run_simulated_study(world, cohort, scfg.seed);
      const fs::path out(sim_out);
      fs::create_directories(out / "logs");
      for (std::size_t i = 0; i < result.logs.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "%03zu-", i);
        write_event_log((out / "logs" / (name + cohort[i].id + ".jsonl")).string(), result.logs[i]);
      }
      write_json(out / "cohort.json", cohort_to_json(cohort));
      write_json(out / "report.json", result.report);
      std::cout << result.report["strategies"].dump(2) << '\n';
    } else if (*eval) {
      const auto report = build_report(read_logs(eval_logs));
      if (!eval_out.empty())
        write_json(eval_out, report);
      else
        std::cout << report.dump(2) << '\n';
      if (!eval_check.empty() && read_json(eval_check) != report) {
        std::cerr << "evaluate: report differs from " << eval_check << '\n';
        return 1;
      }
    } else if (*serve) {
      if (!serve_config.empty()) {
        // Flags given explicitly win over the file.
        const service::ServiceConfig from_file = service::service_config_from_json(read_json(serve_config));
        service::ServiceConfig merged = from_file;
        if (serve->count("--dataset")) merged.dataset = svc.dataset;
        if (serve->count("--checkpoint")) merged.checkpoint = svc.checkpoint;
        if (serve->count("--storage")) merged.storage_dir = svc.storage_dir;
        if (serve->count("--host")) merged.host = svc.host;
        if (serve->count("--port")) merged.port = svc.port;
        if (serve->count("--seed")) merged.seed = svc.seed;
        svc = merged;
      }
      service::Service server(service::load_study_context(svc), svc.storage_dir, svc.seed);
      g_service = &server;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      const int port = server.start(svc.host, svc.port);
      std::cout << "listening on " << svc.host << ':' << port << std::endl;
      server.wait();
      g_service = nullptr;
    } else if (*exp) {
      nlohmann::json report;
      if (!exp_logs.empty())
        report = build_report(read_logs(exp_logs));
      else if (!exp_report.empty())
        report = read_json(exp_report);
      else
        fail(ErrorCode::invalid_input, "export: give --report or --logs");
      const fs::path out(exp_out);
      auto acc = open_out(out / "accuracy.csv");
      write_accuracy_csv(acc, report);
      auto rt = open_out(out / "response_times.csv");
      write_response_time_csv(rt, report);
      auto eff = open_out(out / "effectiveness.csv");
      write_effectiveness_csv(eff, report);
      write_json(out / "report.json", report);
    }
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
