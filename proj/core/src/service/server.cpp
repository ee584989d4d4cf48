#include "simtuple/service/server.hpp"

#include "simtuple/error.hpp"
#include "simtuple/events.hpp"
#include "simtuple/report.hpp"
#include "simtuple/scene_io.hpp"

#include <httplib.h>
#include <spdlog/spdlog.h>

#include <fstream>
#include <map>
#include <mutex>
#include <random>
#include <regex>
#include <thread>

namespace simtuple::service {

namespace fs = std::filesystem;

int http_status(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::not_found: return 404;
    case ErrorCode::conflict:
    case ErrorCode::out_of_order:
    case ErrorCode::not_ready:
    case ErrorCode::stale_model: return 409;
    case ErrorCode::invalid_input:
    case ErrorCode::parse: return 400;
    default: return 500;
  }
}

namespace {

struct Entry {
  std::mutex mutex;
  std::ofstream log;
  std::unique_ptr<Session> session;
};

ApiResponse error_response(ErrorCode code, const std::string& message) {
  return {http_status(code), {{"code", std::string(to_string(code))}, {"message", message}}};
}

nlohmann::json parse_body(const std::string& body) {
  if (body.empty()) return nlohmann::json::object();
  try {
    return nlohmann::json::parse(body);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::parse, std::string("request body is not JSON: ") + e.what());
  }
}

std::string phase_name(Phase p) { return std::string(to_string(p)); }

}  // namespace

struct Service::Impl {
  std::shared_ptr<const StudyContext> ctx;
  fs::path storage;
  std::mt19937_64 rng;
  mutable std::mutex map_mutex;
  std::map<std::string, std::shared_ptr<Entry>> sessions;
  httplib::Server http;
  std::thread thread;

  Session::Sink sink_for(Entry& e) {
    return [&e](const Event& ev) {
      write_event(e.log, ev);
      e.log.flush();
      if (!e.log) fail(ErrorCode::io, "session log write failed");
    };
  }

  std::shared_ptr<Entry> find(const std::string& id) const {
    std::lock_guard lock(map_mutex);
    const auto it = sessions.find(id);
    if (it == sessions.end()) fail(ErrorCode::not_found, "unknown session '" + id + "'");
    return it->second;
  }

  void restore() {
    std::vector<fs::path> files;
    for (const auto& f : fs::directory_iterator(storage))
      if (f.is_regular_file() && f.path().extension() == ".jsonl") files.push_back(f.path());
    std::sort(files.begin(), files.end());
    for (const auto& path : files) {
      const auto log = read_event_log(path.string());
      if (log.empty()) continue;
      auto entry = std::make_shared<Entry>();
      entry->log.open(path, std::ios::app);
      if (!entry->log) fail(ErrorCode::io, "cannot append to " + path.string());
      auto* raw = entry.get();
      entry->session = Session::replay(ctx, log, sink_for(*raw));
      sessions.emplace(path.stem().string(), std::move(entry));
    }
    if (!sessions.empty()) spdlog::info("service: restored {} session(s) from {}", sessions.size(), storage.string());
  }

  ApiResponse create(const nlohmann::json& req) {
    std::lock_guard lock(map_mutex);
    std::string id;
    do {
      id = fmt::format("s{:016x}", rng());
    } while (sessions.count(id) != 0);
    const std::string annotator = req.value("annotator_id", id);
    require(!annotator.empty(), "annotator_id must not be empty");
    const std::uint64_t seed = req.contains("seed") ? req["seed"].get<std::uint64_t>() : rng();
    auto entry = std::make_shared<Entry>();
    const fs::path path = storage / (id + ".jsonl");
    entry->log.open(path, std::ios::trunc);
    if (!entry->log) fail(ErrorCode::io, "cannot create " + path.string());
    entry->session = std::make_unique<Session>(ctx, annotator, seed, sink_for(*entry));
    sessions.emplace(id, entry);
    return {201, {{"session_id", id}, {"annotator_id", annotator}, {"seed", seed}}};
  }

  nlohmann::json scene_payload(std::size_t index) const { return scene_to_json(ctx->dataset.scenes.at(index)); }

  ApiResponse query(Entry& e, const std::string& id) {
    Session& s = *e.session;
    const NextQuery next = s.next_query();
    if (std::holds_alternative<StudyComplete>(next)) return {200, {{"status", "complete"}, {"session_id", id}}};
    if (const auto* pc = std::get_if<PhaseComplete>(&next)) {
      nlohmann::json j = {{"status", "phase_complete"}, {"session_id", id}, {"finished", phase_name(pc->finished)}};
      j["next"] = pc->next ? nlohmann::json(phase_name(*pc->next)) : nlohmann::json(nullptr);
      return {200, j};
    }
    const auto& q = std::get<TupleQuery>(next);
    nlohmann::json info;
    for (auto it = s.events().rbegin(); it != s.events().rend(); ++it)
      if (it->type == "query" && it->data.value("query_id", "") == q.id) {
        info = it->data;
        break;
      }
    nlohmann::json body = nlohmann::json::array();
    for (auto b : q.body) body.push_back(scene_payload(b));
    nlohmann::json out = {{"status", "query"},
                          {"session_id", id},
                          {"phase", phase_name(s.phase())},
                          {"phase_index", static_cast<int>(s.phase())},
                          {"phase_count", kPhaseCount},
                          {"query_id", q.id},
                          {"strategy", std::string(to_string(q.strategy))},
                          {"model_version", q.model_version},
                          {"head", scene_payload(q.head)},
                          {"body", body}};
    if (info.contains("test")) out["test"] = info["test"];
    return {200, out};
  }

  ApiResponse respond(Entry& e, const nlohmann::json& req) {
    require(req.contains("query_id") && req["query_id"].is_string(), "response: query_id is required");
    require(req.contains("response_ms") && req["response_ms"].is_number(), "response: response_ms is required");
    require(req.contains("choice") && (req["choice"].is_null() || req["choice"].is_number_unsigned()),
            "response: choice must be a body index or null");
    TupleResponse r;
    r.query_id = req["query_id"].get<std::string>();
    if (!req["choice"].is_null()) r.choice = req["choice"].get<std::size_t>();
    r.response_ms = req["response_ms"].get<double>();
    e.session->record_response(r);
    return {200, {{"status", "recorded"}, {"query_id", r.query_id}, {"phase", phase_name(e.session->phase())}}};
  }

  ApiResponse metrics(Entry& e, const std::string& id) {
    const auto report = build_report({e.session->events()});
    nlohmann::json out = report["annotators"][0];
    out["session_id"] = id;
    out["phase"] = phase_name(e.session->phase());
    out["events"] = e.session->events().size();
    return {200, out};
  }

  ApiResponse export_report() {
    std::vector<std::shared_ptr<Entry>> entries;
    {
      std::lock_guard lock(map_mutex);
      for (const auto& [id, entry] : sessions) entries.push_back(entry);
    }
    std::vector<std::vector<Event>> logs;
    for (const auto& entry : entries) {
      std::lock_guard lock(entry->mutex);
      logs.push_back(entry->session->events());
    }
    return {200, build_report(logs)};
  }

  ApiResponse route(const std::string& method, const std::string& path, const std::string& body) {
    static const std::regex session_re(R"(^/sessions/([^/]+)/(query|response|survey|metrics)$)");
    static const std::regex scene_re(R"(^/scenes/([^/]+)$)");
    std::smatch m;
    if (path == "/sessions") {
      if (method != "POST") return error_response(ErrorCode::not_found, "use POST /sessions");
      return create(parse_body(body));
    }
    if (path == "/export/report" && method == "GET") return export_report();
    if (std::regex_match(path, m, scene_re) && method == "GET")
      return {200, scene_payload(ctx->dataset.index_of(m[1].str()))};
    if (std::regex_match(path, m, session_re)) {
      const std::string id = m[1].str(), action = m[2].str();
      const bool post = action == "response" || action == "survey";
      if ((method == "POST") != post) return error_response(ErrorCode::not_found, method + " " + path + " is not routed");
      const nlohmann::json req = post ? parse_body(body) : nlohmann::json();
      auto entry = find(id);
      std::lock_guard lock(entry->mutex);
      if (action == "query") return query(*entry, id);
      if (action == "response") return respond(*entry, req);
      if (action == "metrics") return metrics(*entry, id);
      entry->session->record_survey(req.contains("answers") ? req["answers"] : req);
      return {200, {{"status", "recorded"}}};
    }
    return error_response(ErrorCode::not_found, method + " " + path + " is not routed");
  }
};

Service::Service(std::shared_ptr<const StudyContext> ctx, fs::path storage_dir, std::uint64_t seed)
    : impl_(std::make_unique<Impl>()) {
  require(ctx != nullptr, "service: missing study context");
  impl_->ctx = std::move(ctx);
  impl_->storage = std::move(storage_dir);
  impl_->rng.seed(seed ^ static_cast<std::uint64_t>(std::random_device{}()));
  std::error_code ec;
  fs::create_directories(impl_->storage, ec);
  if (ec) fail(ErrorCode::io, "cannot create storage directory " + impl_->storage.string());
  impl_->restore();

  auto handler = [this](const httplib::Request& req, httplib::Response& res) {
    const ApiResponse r = handle(req.method, req.path, req.body);
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
  };
  impl_->http.Get(".*", handler);
  impl_->http.Post(".*", handler);
}

Service::~Service() { stop(); }

ApiResponse Service::handle(const std::string& method, const std::string& path, const std::string& body) {
  try {
    return impl_->route(method, path, body);
  } catch (const Error& e) {
    return error_response(e.code(), e.what());
  } catch (const nlohmann::json::exception& e) {
    return error_response(ErrorCode::invalid_input, e.what());
  } catch (const std::exception& e) {
    spdlog::error("service: {} {}: {}", method, path, e.what());
    return {500, {{"code", "internal"}, {"message", e.what()}}};
  }
}

int Service::start(const std::string& host, int port) {
  const int bound = port == 0 ? impl_->http.bind_to_any_port(host) : (impl_->http.bind_to_port(host, port) ? port : -1);
  if (bound < 0) fail(ErrorCode::io, "cannot bind " + host + ":" + std::to_string(port));
  impl_->thread = std::thread([this] { impl_->http.listen_after_bind(); });
  impl_->http.wait_until_ready();
  spdlog::info("service: listening on {}:{}", host, bound);
  return bound;
}

void Service::wait() {
  if (impl_->thread.joinable()) impl_->thread.join();
}

void Service::stop() {
  if (!impl_) return;
  impl_->http.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

std::size_t Service::session_count() const {
  std::lock_guard lock(impl_->map_mutex);
  return impl_->sessions.size();
}

}  // namespace simtuple::service
