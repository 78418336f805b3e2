#pragma once

// OpenAI-compatible fine-tune and completion client. Define
// CPPHTTPLIB_OPENSSL_SUPPORT (and link OpenSSL) for https base URLs.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <random>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "roomforge/backend.hpp"

namespace roomforge {

struct RemoteSettings {
  std::string api_base = "https://api.openai.com/v1";
  std::string api_key;
  std::string base_model = "davinci-002";
  std::chrono::milliseconds poll_interval{10'000};
  std::chrono::milliseconds poll_jitter{2'000};
  std::chrono::seconds job_timeout{2 * 60 * 60};
  std::filesystem::path audit_log;  // JSONL of every completion request, when set

  // ROOMFORGE_API_KEY and ROOMFORGE_API_BASE.
  static RemoteSettings from_env() {
    RemoteSettings s;
    if (const char* key = std::getenv("ROOMFORGE_API_KEY")) s.api_key = key;
    if (const char* base = std::getenv("ROOMFORGE_API_BASE")) s.api_base = base;
    return s;
  }
};

class RemoteBackend final : public Backend {
 public:
  explicit RemoteBackend(RemoteSettings settings) : settings_(std::move(settings)) {
    const auto& base = settings_.api_base;
    const auto scheme_end = base.find("://");
    if (scheme_end == std::string::npos) {
      throw BackendError(BackendError::Kind::Transport, "API base must include a scheme: " + base);
    }
    const auto path_start = base.find('/', scheme_end + 3);
    origin_ = base.substr(0, path_start);
    if (path_start != std::string::npos) prefix_ = base.substr(path_start);
    while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
    if (base.starts_with("https://")) {
      throw BackendError(BackendError::Kind::Transport, "this build has no TLS support; use an http:// API base");
    }
#endif
  }

  BackendKind kind() const override { return BackendKind::Remote; }

  ModelRef fine_tune(const std::optional<ModelRef>& base, const std::filesystem::path& records,
                     int epochs) override {
    read_records(records);
    std::string bytes;
    {
      std::ifstream in(records, std::ios::binary);
      std::ostringstream ss;
      ss << in.rdbuf();
      bytes = ss.str();
    }

    httplib::MultipartFormDataItems form = {
        {"purpose", "fine-tune", "", ""},
        {"file", bytes, records.filename().string(), "application/jsonl"},
    };
    auto client = make_client();
    auto upload = client.Post(prefix_ + "/files", form);
    const auto file = check(upload, "file upload");

    nlohmann::ordered_json job_req;
    job_req["training_file"] = file.at("id").get<std::string>();
    job_req["model"] = base ? base->handle : settings_.base_model;
    job_req["hyperparameters"] = {{"n_epochs", epochs}};
    auto created = client.Post(prefix_ + "/fine_tuning/jobs", job_req.dump(), "application/json");
    auto job = check(created, "fine-tune job submission");
    const std::string job_id = job.at("id").get<std::string>();

    const auto deadline = std::chrono::steady_clock::now() + settings_.job_timeout;
    std::mt19937 jitter_rng{std::random_device{}()};
    while (true) {
      const std::string status = job.value("status", std::string{});
      if (status == "succeeded") break;
      if (status == "failed" || status == "cancelled") {
        std::string why = status;
        if (job.contains("error") && job["error"].is_object()) {
          why += ": " + job["error"].value("message", std::string{});
        }
        throw BackendError(BackendError::Kind::JobFailed, "fine-tune job " + job_id + " " + why);
      }
      if (std::chrono::steady_clock::now() > deadline) {
        throw BackendError(BackendError::Kind::JobFailed, "fine-tune job " + job_id + " timed out");
      }
      auto wait = settings_.poll_interval;
      if (settings_.poll_jitter.count() > 0) {
        wait += std::chrono::milliseconds(jitter_rng() % settings_.poll_jitter.count());
      }
      std::this_thread::sleep_for(wait);
      job = check(client.Get(prefix_ + "/fine_tuning/jobs/" + job_id), "fine-tune job status");
    }

    ModelRef ref;
    ref.kind = BackendKind::Remote;
    ref.handle = job.at("fine_tuned_model").get<std::string>();
    ref.trained_on = hex64(fnv1a64(bytes));
    ref.epochs = epochs;
    ref.parent = base ? base->handle : settings_.base_model;
    return ref;
  }

  std::vector<std::string> generate(const GenerationRequest& request) override {
    if (request.n <= 0) return {};
    int max_tokens = request.max_tokens;
    if (max_tokens <= 0) {
      try {
        max_tokens = default_max_tokens(parse_prompt(request.prompt));
      } catch (const PromptError&) {
        max_tokens = 2048;
      }
    }
    const auto body = completion_body(request, max_tokens);
    audit(body);
    auto client = make_client();
    const auto resp = check(client.Post(prefix_ + "/completions", body.dump(), "application/json"), "completion");

    std::vector<std::pair<int, std::string>> choices;
    for (const auto& c : resp.at("choices")) {
      choices.emplace_back(c.value("index", static_cast<int>(choices.size())), c.at("text").get<std::string>());
    }
    std::stable_sort(choices.begin(), choices.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<std::string> out;
    for (auto& [i, text] : choices) out.push_back(detail::strip_stops(std::move(text), request.stop));
    return out;
  }

  // Request body for the completions endpoint. Sampling settings other
  // than temperature are left to the server.
  static nlohmann::ordered_json completion_body(const GenerationRequest& request, int max_tokens) {
    nlohmann::ordered_json body;
    body["model"] = request.model.handle;
    body["prompt"] = request.prompt;
    body["temperature"] = request.temperature;
    body["n"] = request.n;
    body["stop"] = request.stop;
    body["max_tokens"] = max_tokens;
    return body;
  }

 private:
  httplib::Client make_client() const {
    httplib::Client client(origin_);
    client.set_connection_timeout(30);
    client.set_read_timeout(300);
    if (!settings_.api_key.empty()) client.set_bearer_token_auth(settings_.api_key);
    return client;
  }

  static nlohmann::json check(const httplib::Result& res, const std::string& what) {
    if (!res) {
      throw BackendError(BackendError::Kind::Transport, what + ": " + httplib::to_string(res.error()));
    }
    if (res->status < 200 || res->status >= 300) {
      throw BackendError(BackendError::Kind::RemoteRejected,
                         what + " rejected (HTTP " + std::to_string(res->status) + "): " + res->body);
    }
    auto j = nlohmann::json::parse(res->body, nullptr, false);
    if (j.is_discarded()) {
      throw BackendError(BackendError::Kind::RemoteRejected, what + " returned non-JSON: " + res->body);
    }
    return j;
  }

  void audit(const nlohmann::ordered_json& body) {
    if (settings_.audit_log.empty()) return;
    std::lock_guard lock(audit_mu_);
    std::ofstream out(settings_.audit_log, std::ios::app | std::ios::binary);
    out << body.dump() << '\n';
  }

  RemoteSettings settings_;
  std::string origin_;
  std::string prefix_;
  std::mutex audit_mu_;
};

}  // namespace roomforge
