#pragma once

// HTTP API used by the repair editor. All dataset mutations go through
// the owning Pipeline under one mutex.

#include <algorithm>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>

#include "httplib.h"
#include "json.hpp"
#include "roomforge/pipeline.hpp"

namespace roomforge {

class RepairServer {
 public:
  explicit RepairServer(Pipeline& pipeline, std::optional<std::filesystem::path> static_dir = std::nullopt)
      : pipeline_(pipeline) {
    if (static_dir) server_.set_mount_point("/", static_dir->string());
    routes();
  }

  // Binds to an ephemeral port and returns it; then call listen().
  int bind_any(const std::string& host = "127.0.0.1") { return server_.bind_to_any_port(host); }
  bool bind(const std::string& host, int port) { return server_.bind_to_port(host, port); }
  bool listen() { return server_.listen_after_bind(); }
  void stop() { server_.stop(); }
  void wait_until_ready() { server_.wait_until_ready(); }

 private:
  using Json = nlohmann::ordered_json;

  static void reply(httplib::Response& res, int status, const Json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
  }

  static void error(httplib::Response& res, int status, const std::string& message) {
    Json j;
    j["error"] = message;
    reply(res, status, j);
  }

  // Body is either raw level text or {"grid": "<level text>"}.
  static std::optional<Grid> body_grid(const httplib::Request& req, httplib::Response& res) {
    std::string text = req.body;
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
      const auto j = nlohmann::json::parse(text, nullptr, false);
      if (j.is_discarded() || !j.contains("grid") || !j["grid"].is_string()) {
        error(res, 400, "expected {\"grid\": \"<level text>\"}");
        return std::nullopt;
      }
      text = j["grid"].get<std::string>();
    }
    try {
      return parse_level(text);
    } catch (const LevelError& e) {
      Json j;
      j["error"] = e.what();
      j["row"] = e.row();
      j["col"] = e.col();
      reply(res, 400, j);
      return std::nullopt;
    }
  }

  static Json wide_region_json(const Grid& grid) { return cells_to_json(wide_walkable_region(grid).cells()); }

  template <typename Fn>
  void guarded(httplib::Response& res, Fn&& fn) {
    std::lock_guard lock(mu_);
    try {
      fn();
    } catch (const PipelineError& e) {
      switch (e.kind()) {
        case PipelineError::Kind::UnknownTicket: error(res, 404, e.what()); break;
        case PipelineError::Kind::TicketClosed: error(res, 409, e.what()); break;
        default: error(res, 500, e.what()); break;
      }
    } catch (const std::exception& e) {
      error(res, 500, e.what());
    }
  }

  void routes() {
    server_.Get("/tickets", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const bool all = req.has_param("status") && req.get_param_value("status") == "all";
        std::vector<const RepairTicket*> list;
        for (const auto& t : pipeline_.tickets()) {
          if (all || t.status == TicketStatus::Pending) list.push_back(&t);
        }
        std::stable_sort(list.begin(), list.end(), [](const RepairTicket* a, const RepairTicket* b) {
          return a->report.repairability < b->report.repairability;
        });
        Json arr = Json::array();
        for (const auto* t : list) arr.push_back(to_json(*t, false));
        Json j;
        j["tickets"] = std::move(arr);
        reply(res, 200, j);
      });
    });

    server_.Get(R"(/tickets/([A-Za-z0-9_-]+))", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const auto& t = pipeline_.ticket(req.matches[1].str());
        Json j = to_json(t, true);
        j["wide_region"] = wide_region_json(t.original_grid);
        reply(res, 200, j);
      });
    });

    server_.Put(R"(/tickets/([A-Za-z0-9_-]+)/grid)", [this](const httplib::Request& req, httplib::Response& res) {
      const auto grid = body_grid(req, res);
      if (!grid) return;
      guarded(res, [&] {
        Json j = to_json(pipeline_.check_repair(req.matches[1].str(), *grid));
        j["wide_region"] = wide_region_json(*grid);
        reply(res, 200, j);
      });
    });

    server_.Post(R"(/tickets/([A-Za-z0-9_-]+)/submit)", [this](const httplib::Request& req, httplib::Response& res) {
      const auto grid = body_grid(req, res);
      if (!grid) return;
      guarded(res, [&] { reply(res, 200, to_json(pipeline_.submit_repair(req.matches[1].str(), *grid))); });
    });

    server_.Get("/dataset/stats", [this](const httplib::Request&, httplib::Response& res) {
      guarded(res, [&] {
        std::map<std::string, int> by_origin;
        for (const auto& e : pipeline_.dataset().entries()) ++by_origin[std::string(to_string(e.provenance.origin))];
        Json j;
        j["entries"] = pipeline_.dataset().size();
        j["by_provenance"] = by_origin;
        j["pending_tickets"] = pipeline_.pending_tickets().size();
        j["stage1_accepted"] = pipeline_.state().stage1_accepted;
        j["stage1_target"] = pipeline_.config().stage1_target_new;
        j["stage1_rounds"] = pipeline_.state().stage1_rounds;
        j["stage2_rounds"] = pipeline_.state().stage2_rounds;
        j["augmented"] = pipeline_.state().augmented;
        reply(res, 200, j);
      });
    });

    server_.Get(R"(/levels/([A-Za-z0-9_-]+))", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const auto* e = pipeline_.dataset().find(req.matches[1].str());
        if (!e) {
          error(res, 404, "no level " + req.matches[1].str());
          return;
        }
        Json j;
        j["id"] = e->id;
        j["grid"] = serialize_level(e->grid);
        j["prompt"] = build_prompt(e->spec);
        j["provenance"] = to_string(e->provenance.origin);
        if (e->provenance.origin == Origin::Augmented) {
          j["transform"] = to_string(e->provenance.transform);
          j["parent"] = e->provenance.parent;
        }
        j["round_added"] = e->round_added;
        reply(res, 200, j);
      });
    });
  }

  Pipeline& pipeline_;
  httplib::Server server_;
  std::mutex mu_;
};

}  // namespace roomforge
