#pragma once

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "roomforge/backend.hpp"
#include "roomforge/config.hpp"
#include "roomforge/constraints.hpp"
#include "roomforge/dataset.hpp"
#include "roomforge/metrics.hpp"

namespace roomforge {

class PipelineError : public std::runtime_error {
 public:
  enum class Kind { UnknownTicket, TicketClosed, Locked, Precondition, StateCorrupt };

  PipelineError(Kind kind, std::string message) : std::runtime_error(std::move(message)), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

// Exclusive ownership of a dataset directory for the lifetime of the object.
class DirectoryLock {
 public:
  explicit DirectoryLock(std::filesystem::path dir) : path_(std::move(dir) / ".lock") {
    fd_ = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd_ < 0) {
      if (errno == EEXIST) {
        throw PipelineError(PipelineError::Kind::Locked,
                            "dataset is in use by another run (remove " + path_.string() + " if stale)");
      }
      throw PipelineError(PipelineError::Kind::Locked,
                          "cannot create " + path_.string() + ": " + std::strerror(errno));
    }
    const auto pid = std::to_string(::getpid()) + "\n";
    [[maybe_unused]] auto n = ::write(fd_, pid.data(), pid.size());
  }
  ~DirectoryLock() {
    if (fd_ >= 0) {
      ::close(fd_);
      std::error_code ec;
      std::filesystem::remove(path_, ec);
    }
  }
  DirectoryLock(const DirectoryLock&) = delete;
  DirectoryLock& operator=(const DirectoryLock&) = delete;

 private:
  std::filesystem::path path_;
  int fd_ = -1;
};

enum class TicketStatus { Pending, Repaired, Discarded };

constexpr std::string_view to_string(TicketStatus s) noexcept {
  switch (s) {
    case TicketStatus::Pending: return "pending";
    case TicketStatus::Repaired: return "repaired";
    case TicketStatus::Discarded: return "discarded";
  }
  return "?";
}

struct RepairTicket {
  std::string id;
  int round = 0;
  std::string prompt;
  Grid original_grid;
  PlayabilityReport report;
  TicketStatus status = TicketStatus::Pending;
  std::optional<Grid> repaired_grid;
};

struct RepairOutcome {
  bool accepted = false;
  PlayabilityReport report;
  std::optional<NoveltyResult> novelty;
  std::string message;
};

struct PipelineState {
  int stage1_rounds = 0;
  int stage1_accepted = 0;
  int stage2_rounds = 0;
  bool augmented = false;
  int next_ticket = 1;
  std::optional<ModelRef> model;
};

inline nlohmann::ordered_json to_json(const NoveltyResult& n) {
  nlohmann::ordered_json j;
  auto dist = [](const std::optional<std::size_t>& d) {
    return d ? nlohmann::ordered_json(*d) : nlohmann::ordered_json("incomparable");
  };
  j["min_distance_raw"] = dist(n.min_distance_raw);
  j["min_distance_swapped"] = dist(n.min_distance_swapped);
  j["threshold_cells"] = n.threshold_cells;
  j["is_novel"] = n.is_novel;
  j["nearest_entry_id"] = n.nearest_entry_id ? nlohmann::ordered_json(*n.nearest_entry_id) : nullptr;
  return j;
}

inline nlohmann::ordered_json to_json(const RepairOutcome& o) {
  nlohmann::ordered_json j;
  j["accepted"] = o.accepted;
  j["report"] = to_json(o.report);
  j["novelty"] = o.novelty ? to_json(*o.novelty) : nlohmann::ordered_json(nullptr);
  j["message"] = o.message;
  return j;
}

inline nlohmann::ordered_json to_json(const RepairTicket& t, bool with_grid) {
  nlohmann::ordered_json j;
  j["id"] = t.id;
  j["round"] = t.round;
  j["status"] = to_string(t.status);
  j["repairability"] = t.report.repairability;
  auto failed = nlohmann::ordered_json::array();
  for (const auto& c : t.report.constraints) {
    if (!c.pass) failed.push_back(constraint_name(c.id));
  }
  j["failed"] = std::move(failed);
  j["width"] = t.original_grid.width();
  j["height"] = t.original_grid.height();
  if (with_grid) {
    j["prompt"] = t.prompt;
    j["grid"] = serialize_level(t.original_grid);
    j["report"] = to_json(t.report);
    j["repaired_grid"] = t.repaired_grid ? nlohmann::ordered_json(serialize_level(*t.repaired_grid))
                                         : nlohmann::ordered_json(nullptr);
  }
  return j;
}

// The two-stage bootstrapping loop over one dataset directory.
//
// Stage 1 generates rooms, keeps the playable-novel ones and queues the
// most repairable failures for a human. Stage 2 (after augmentation)
// repeatedly fine-tunes, generates and keeps playable-novel rooms with
// no human involved. Everything is persisted under the directory:
// the dataset files, state.json, tickets.jsonl, stage1.csv, report.csv.
class Pipeline {
 public:
  Pipeline(std::filesystem::path dir, PipelineConfig config, Backend& backend)
      : dir_(std::move(dir)), config_(config), backend_(backend) {
    config_.check();
    std::filesystem::create_directories(dir_);
    lock_.emplace(dir_);
    if (std::filesystem::exists(dir_ / "manifest.jsonl")) dataset_ = load(dir_);
    load_state();
    load_tickets();
  }

  // Creates a fresh dataset directory from hand-made rooms. Returns
  // warnings for rooms that were skipped or are not playable.
  static std::vector<std::string> init(const std::filesystem::path& dir, const std::vector<Grid>& rooms) {
    if (std::filesystem::exists(dir / "manifest.jsonl")) {
      throw PipelineError(PipelineError::Kind::Precondition, dir.string() + " already holds a dataset");
    }
    std::filesystem::create_directories(dir);
    DirectoryLock lock(dir);
    std::vector<std::string> warnings;
    Dataset dataset;
    for (std::size_t i = 0; i < rooms.size(); ++i) {
      if (!validate(rooms[i]).pass) warnings.push_back("room " + std::to_string(i) + " is not playable");
      try {
        if (!dataset.add_if_new(rooms[i], Provenance::handmade(), 0)) {
          warnings.push_back("room " + std::to_string(i) + " duplicates an earlier room");
        }
      } catch (const LevelError& e) {
        warnings.push_back("room " + std::to_string(i) + " skipped: " + e.what());
      }
    }
    save(dataset, dir);
    return warnings;
  }

  const Dataset& dataset() const noexcept { return dataset_; }
  const PipelineState& state() const noexcept { return state_; }
  const PipelineConfig& config() const noexcept { return config_; }
  const std::filesystem::path& directory() const noexcept { return dir_; }
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

  const std::vector<RepairTicket>& tickets() const noexcept { return tickets_; }

  std::vector<const RepairTicket*> pending_tickets() const {
    std::vector<const RepairTicket*> out;
    for (const auto& t : tickets_) {
      if (t.status == TicketStatus::Pending) out.push_back(&t);
    }
    return out;
  }

  const RepairTicket& ticket(std::string_view id) const {
    for (const auto& t : tickets_) {
      if (t.id == id) return t;
    }
    throw PipelineError(PipelineError::Kind::UnknownTicket, "no ticket " + std::string(id));
  }

  // One stage-1 round. Returns the tickets it opened.
  std::vector<RepairTicket> stage1_round() {
    require_data();
    ensure_model(config_.stage1_epochs);
    const int round = ++state_.stage1_rounds;
    const auto specs = sample_specs(dataset_, config_.gen_per_round, derive_seed(config_.seed, 1, round));
    const auto generated = generate_batch(specs);

    std::vector<Classification> results;
    std::vector<PlayabilityReport> reports;
    std::vector<std::size_t> report_source;
    for (std::size_t i = 0; i < generated.size(); ++i) {
      auto c = classify(generated[i].second, generated[i].first, dataset_, config_);
      if (c.playable_novel && admit(*c.grid, Provenance::generated(), round)) {
        ++state_.stage1_accepted;
      } else {
        c.playable_novel = false;
      }
      if (c.parse_ok && !c.report->pass) {
        reports.push_back(*c.report);
        report_source.push_back(i);
      }
      results.push_back(std::move(c));
    }

    std::vector<RepairTicket> opened;
    for (std::size_t k : repairability_order(reports, config_.repair_per_round)) {
      const auto& c = results[report_source[k]];
      RepairTicket t{ticket_id(state_.next_ticket++), round, build_prompt(generated[report_source[k]].first),
                     *c.grid, *c.report, TicketStatus::Pending, std::nullopt};
      tickets_.push_back(t);
      opened.push_back(std::move(t));
    }

    append_csv(dir_ / "stage1.csv", aggregate_round(results, round, config_.seed));
    persist();
    return opened;
  }

  // Validation and novelty of a candidate repair, without committing it.
  RepairOutcome check_repair(std::string_view id, const Grid& grid) const {
    ticket(id);
    return evaluate(grid);
  }

  RepairOutcome submit_repair(std::string_view id, const Grid& grid) {
    auto& t = find_ticket(id);
    if (t.status != TicketStatus::Pending) {
      throw PipelineError(PipelineError::Kind::TicketClosed, "ticket " + t.id + " is " + std::string(to_string(t.status)));
    }
    auto outcome = evaluate(grid);
    if (outcome.accepted) {
      if (admit(grid, Provenance::repaired(), t.round)) {
        t.status = TicketStatus::Repaired;
        t.repaired_grid = grid;
        ++state_.stage1_accepted;
        outcome.message = "added to the dataset";
        persist();
      } else {
        outcome.accepted = false;
        outcome.message = "room cannot be stored: it has no census";
      }
    }
    return outcome;
  }

  void discard_ticket(std::string_view id) {
    auto& t = find_ticket(id);
    if (t.status != TicketStatus::Pending) {
      throw PipelineError(PipelineError::Kind::TicketClosed, "ticket " + t.id + " is " + std::string(to_string(t.status)));
    }
    t.status = TicketStatus::Discarded;
    persist();
  }

  bool stage1_complete() const { return state_.stage1_accepted >= config_.stage1_target_new; }

  // Repeats stage-1 rounds, handing each batch of tickets to `repairer`,
  // until the target number of accepted rooms is reached or max_rounds
  // rounds have run. Returns the number of rounds run.
  int run_stage1(const std::function<void(Pipeline&, const std::vector<RepairTicket>&)>& repairer,
                 int max_rounds) {
    int rounds = 0;
    while (!stage1_complete() && rounds < max_rounds) {
      const auto opened = stage1_round();
      ++rounds;
      if (repairer) repairer(*this, opened);
    }
    return rounds;
  }

  std::vector<std::string> augment() {
    require_data();
    std::vector<std::string> warnings;
    dataset_ = augment_all(dataset_, &warnings);
    state_.augmented = true;
    persist();
    return warnings;
  }

  RoundStats stage2_round(int round_index) {
    require_data();
    if (!state_.augmented) {
      throw PipelineError(PipelineError::Kind::Precondition, "stage 2 needs an augmented dataset; run augment first");
    }
    ensure_model(config_.stage2_epochs);
    const auto specs = sample_specs(dataset_, config_.gen_per_round, derive_seed(config_.seed, 2, round_index));
    const auto generated = generate_batch(specs);

    std::vector<Classification> results;
    results.reserve(generated.size());
    for (const auto& [spec, text] : generated) {
      // The live dataset already holds this round's earlier additions.
      auto c = classify(text, spec, dataset_, config_);
      if (c.playable_novel && !admit(*c.grid, Provenance::generated(), round_index)) c.playable_novel = false;
      results.push_back(std::move(c));
    }
    const auto stats = aggregate_round(results, round_index, config_.seed);
    append_csv(dir_ / "report.csv", stats);
    state_.stage2_rounds = std::max(state_.stage2_rounds, round_index);
    persist();
    return stats;
  }

  std::vector<RoundStats> run_stage2() {
    std::vector<RoundStats> out;
    const int first = state_.stage2_rounds + 1;
    for (int r = first; r < first + config_.stage2_rounds; ++r) out.push_back(stage2_round(r));
    return out;
  }

 private:
  static std::string ticket_id(int n) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "T%04d", n);
    return buf;
  }

  void require_data() const {
    if (dataset_.empty()) {
      throw PipelineError(PipelineError::Kind::Precondition, "dataset at " + dir_.string() + " is empty; run init");
    }
  }

  RepairTicket& find_ticket(std::string_view id) { return const_cast<RepairTicket&>(ticket(id)); }

  RepairOutcome evaluate(const Grid& grid) const {
    RepairOutcome o;
    o.report = validate(grid);
    o.novelty = is_novel(grid, dataset_, config_.novelty_fraction);
    o.accepted = o.report.pass && o.novelty->is_novel;
    if (!o.report.pass) {
      o.message = "room is not playable";
    } else if (!o.novelty->is_novel) {
      o.message = "room is too close to " + o.novelty->nearest_entry_id.value_or("an existing room");
    }
    return o;
  }

  bool admit(const Grid& grid, Provenance provenance, int round) {
    try {
      return dataset_.add_if_new(grid, std::move(provenance), round);
    } catch (const LevelError& e) {
      warnings_.push_back(std::string("room not stored: ") + e.what());
      return false;
    }
  }

  // Fine-tunes when the stored model was not trained on the current data.
  // The mock keeps models in memory only, so it is always refreshed.
  void ensure_model(int epochs) {
    save(dataset_, dir_);
    const auto records = dir_ / "finetune.jsonl";
    const auto fingerprint = hex64(fnv1a64(detail::read_file(records)));
    const bool stale = !state_.model || state_.model->trained_on != fingerprint ||
                       state_.model->kind != backend_.kind() || backend_.kind() == BackendKind::Mock;
    if (!stale) return;
    std::optional<ModelRef> base;
    if (state_.model && state_.model->kind == backend_.kind()) base = state_.model;
    state_.model = backend_.fine_tune(base, records, epochs);
    persist_state();
  }

  // One request per distinct prompt, n = its multiplicity, in order of
  // first appearance. Failed requests yield empty completions.
  std::vector<std::pair<PromptSpec, std::string>> generate_batch(const std::vector<PromptSpec>& specs) {
    std::vector<std::string> order;
    std::map<std::string, std::pair<PromptSpec, int>> groups;
    for (const auto& s : specs) {
      auto prompt = build_prompt(s);
      auto [it, fresh] = groups.try_emplace(prompt, s, 0);
      ++it->second.second;
      if (fresh) order.push_back(std::move(prompt));
    }
    std::vector<std::pair<PromptSpec, std::string>> out;
    std::size_t failures = 0;
    for (const auto& prompt : order) {
      const auto& [spec, count] = groups.at(prompt);
      GenerationRequest req;
      req.model = *state_.model;
      req.prompt = prompt;
      req.temperature = config_.temperature;
      req.n = count;
      req.max_tokens = default_max_tokens(spec);
      std::vector<std::string> texts;
      try {
        texts = backend_.generate(req);
      } catch (const BackendError& e) {
        warnings_.push_back(std::string("generation failed: ") + e.what());
        ++failures;
      }
      texts.resize(static_cast<std::size_t>(count));
      for (auto& t : texts) out.emplace_back(spec, std::move(t));
    }
    if (!order.empty() && failures == order.size()) {
      throw BackendError(BackendError::Kind::Transport, "every generation request failed: " + warnings_.back());
    }
    return out;
  }

  static void append_csv(const std::filesystem::path& path, const RoundStats& stats) {
    const bool fresh = !std::filesystem::exists(path);
    std::ofstream out(path, std::ios::app | std::ios::binary);
    if (fresh) out << kRoundCsvHeader << '\n';
    out << to_csv_row(stats) << '\n';
  }

  void persist() {
    save(dataset_, dir_);
    persist_state();
    std::string lines;
    for (const auto& t : tickets_) {
      nlohmann::ordered_json j;
      j["id"] = t.id;
      j["round"] = t.round;
      j["status"] = to_string(t.status);
      j["prompt"] = t.prompt;
      j["original"] = serialize_level(t.original_grid);
      j["repaired"] = t.repaired_grid ? nlohmann::ordered_json(serialize_level(*t.repaired_grid))
                                      : nlohmann::ordered_json(nullptr);
      lines += j.dump();
      lines += '\n';
    }
    detail::write_file_atomic(dir_ / "tickets.jsonl", lines);
  }

  void persist_state() {
    nlohmann::ordered_json j;
    j["stage1_rounds"] = state_.stage1_rounds;
    j["stage1_accepted"] = state_.stage1_accepted;
    j["stage2_rounds"] = state_.stage2_rounds;
    j["augmented"] = state_.augmented;
    j["next_ticket"] = state_.next_ticket;
    j["model"] = state_.model ? to_json(*state_.model) : nlohmann::ordered_json(nullptr);
    detail::write_file_atomic(dir_ / "state.json", j.dump(2) + "\n");
  }

  void load_state() {
    const auto path = dir_ / "state.json";
    if (!std::filesystem::exists(path)) return;
    try {
      const auto j = nlohmann::json::parse(detail::read_file(path));
      state_.stage1_rounds = j.value("stage1_rounds", 0);
      state_.stage1_accepted = j.value("stage1_accepted", 0);
      state_.stage2_rounds = j.value("stage2_rounds", 0);
      state_.augmented = j.value("augmented", false);
      state_.next_ticket = j.value("next_ticket", 1);
      if (j.contains("model") && !j["model"].is_null()) state_.model = model_ref_from_json(j["model"]);
    } catch (const nlohmann::json::exception& e) {
      throw PipelineError(PipelineError::Kind::StateCorrupt, "state.json: " + std::string(e.what()));
    }
  }

  void load_tickets() {
    const auto path = dir_ / "tickets.jsonl";
    if (!std::filesystem::exists(path)) return;
    std::istringstream in(detail::read_file(path));
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      try {
        const auto j = nlohmann::json::parse(line);
        Grid original = parse_level(j.at("original").get<std::string>());
        RepairTicket t{j.at("id").get<std::string>(), j.value("round", 0), j.value("prompt", std::string{}),
                       original, validate(original), TicketStatus::Pending, std::nullopt};
        const auto status = j.value("status", std::string("pending"));
        if (status == "repaired") t.status = TicketStatus::Repaired;
        if (status == "discarded") t.status = TicketStatus::Discarded;
        if (j.contains("repaired") && j["repaired"].is_string()) {
          t.repaired_grid = parse_level(j["repaired"].get<std::string>());
        }
        tickets_.push_back(std::move(t));
      } catch (const std::exception& e) {
        throw PipelineError(PipelineError::Kind::StateCorrupt, "tickets.jsonl: " + std::string(e.what()));
      }
    }
  }

  std::filesystem::path dir_;
  PipelineConfig config_;
  Backend& backend_;
  std::optional<DirectoryLock> lock_;
  Dataset dataset_;
  PipelineState state_;
  std::vector<RepairTicket> tickets_;
  std::vector<std::string> warnings_;
};

// Report rows from any number of report.csv files, in file order.
inline std::vector<RoundStats> read_report(const std::filesystem::path& csv) {
  std::vector<RoundStats> rows;
  std::istringstream in(detail::read_file(csv));
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line.starts_with("round,")) continue;
    rows.push_back(parse_csv_row(line));
  }
  return rows;
}

// Per-round summary across seeds: the data behind a playable-novel-per-
// round curve with its spread.
struct RoundSummary {
  int round_index = 0;
  int seeds = 0;
  double mean_playable_novel = 0.0;
  int min_playable_novel = 0;
  int max_playable_novel = 0;
  double mean_accuracy = 0.0;
};

inline std::vector<RoundSummary> summarize(const std::vector<RoundStats>& rows) {
  std::map<int, std::vector<const RoundStats*>> by_round;
  for (const auto& r : rows) by_round[r.round_index].push_back(&r);
  std::vector<RoundSummary> out;
  for (const auto& [round, group] : by_round) {
    RoundSummary s;
    s.round_index = round;
    s.seeds = static_cast<int>(group.size());
    s.min_playable_novel = group.front()->n_playable_novel;
    s.max_playable_novel = group.front()->n_playable_novel;
    for (const auto* r : group) {
      s.mean_playable_novel += r->n_playable_novel;
      s.mean_accuracy += r->mean_accuracy;
      s.min_playable_novel = std::min(s.min_playable_novel, r->n_playable_novel);
      s.max_playable_novel = std::max(s.max_playable_novel, r->n_playable_novel);
    }
    s.mean_playable_novel /= s.seeds;
    s.mean_accuracy /= s.seeds;
    out.push_back(s);
  }
  return out;
}

}  // namespace roomforge
