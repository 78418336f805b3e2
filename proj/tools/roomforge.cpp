// roomforge: command-line driver for the room generation pipeline.

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "roomforge/remote.hpp"
#include "roomforge/roomforge.hpp"
#include "roomforge/server.hpp"

namespace fs = std::filesystem;
using namespace roomforge;

namespace {

struct Options {
  fs::path dataset = "dataset";
  std::string backend = "mock";
  std::uint64_t seed = 0;
  double temperature = 0.4;
  double novelty_fraction = 0.10;
  int rounds = 0;
  int gen_per_round = 0;
  int epochs = 0;
  std::string model;

  // init
  fs::path from;
  int synthetic = 0;
  // repair-export / repair-import
  fs::path repair_dir = "repairs";
  // serve
  std::string host = "127.0.0.1";
  int port = 8080;
  fs::path static_dir;
  // validate / novelty / report
  std::vector<fs::path> files;
};

PipelineConfig make_config(const Options& o, bool stage2) {
  PipelineConfig c;
  c.seed = o.seed;
  c.temperature = o.temperature;
  c.novelty_fraction = o.novelty_fraction;
  if (stage2 && o.rounds > 0) c.stage2_rounds = o.rounds;
  if (o.gen_per_round > 0) c.gen_per_round = o.gen_per_round;
  if (o.epochs > 0) (stage2 ? c.stage2_epochs : c.stage1_epochs) = o.epochs;
  return c;
}

std::unique_ptr<Backend> make_backend(const Options& o) {
  if (o.backend == "mock") return std::make_unique<MockBackend>(o.seed);
  if (o.backend == "remote") {
    auto settings = RemoteSettings::from_env();
    if (!o.model.empty()) settings.base_model = o.model;
    settings.audit_log = o.dataset / "requests.jsonl";
    return std::make_unique<RemoteBackend>(settings);
  }
  throw CLI::ValidationError("--backend", "must be mock or remote");
}

Grid read_level(const fs::path& path) { return parse_level(detail::read_file(path)); }

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

int cmd_init(const Options& o) {
  std::vector<Grid> rooms;
  if (!o.from.empty()) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(o.from)) {
      const auto ext = e.path().extension();
      if (e.is_regular_file() && (ext == ".lvl" || ext == ".txt")) files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      try {
        rooms.push_back(read_level(f));
      } catch (const LevelError& e) {
        throw std::runtime_error(f.string() + ": " + e.what());
      }
    }
  }
  if (o.synthetic > 0) {
    Rng rng(derive_seed(o.seed, 0));
    for (int i = 0; i < o.synthetic; ++i) rooms.push_back(sample_room(rng));
  }
  if (rooms.empty()) throw std::runtime_error("init needs --from <dir> or --synthetic N");
  print_warnings(Pipeline::init(o.dataset, rooms));
  MockBackend unused;
  Pipeline p(o.dataset, PipelineConfig{}, unused);
  std::cout << "initialised " << o.dataset.string() << " with " << p.dataset().size() << " rooms\n";
  return 0;
}

int cmd_stage1(const Options& o) {
  auto backend = make_backend(o);
  Pipeline p(o.dataset, make_config(o, false), *backend);
  if (p.stage1_complete()) {
    std::cout << "stage 1 complete: " << p.state().stage1_accepted << " rooms accepted\n";
    return 0;
  }
  // Repairs made between invocations count toward the target, so the loop
  // also stops after --rounds rounds (default 100).
  const int max_rounds = o.rounds > 0 ? o.rounds : 100;
  std::size_t shown = 0;
  p.run_stage1(
      [&](Pipeline& pl, const std::vector<RepairTicket>& opened) {
        const auto& w = pl.warnings();
        print_warnings({w.begin() + static_cast<std::ptrdiff_t>(shown), w.end()});
        shown = w.size();
        std::cout << "round " << pl.state().stage1_rounds << ": " << opened.size() << " tickets opened, "
                  << pl.state().stage1_accepted << " / " << pl.config().stage1_target_new << " accepted\n";
        for (const auto& t : opened) {
          std::cout << "  " << t.id << "  repairability " << t.report.repairability << "  failed";
          for (const auto& c : t.report.constraints) {
            if (!c.pass) std::cout << ' ' << constraint_name(c.id);
          }
          std::cout << '\n';
        }
      },
      max_rounds);
  std::cout << "accepted " << p.state().stage1_accepted << " / " << p.config().stage1_target_new << '\n';
  return 0;
}

int cmd_repair_export(const Options& o) {
  MockBackend unused;
  Pipeline p(o.dataset, make_config(o, false), unused);
  fs::create_directories(o.repair_dir);
  int n = 0;
  for (const auto* t : p.pending_tickets()) {
    detail::write_file_atomic(o.repair_dir / (t->id + ".lvl"), serialize_level(t->original_grid));
    detail::write_file_atomic(o.repair_dir / (t->id + ".report.json"), to_json(t->report).dump(2) + "\n");
    ++n;
  }
  std::cout << "exported " << n << " pending tickets to " << o.repair_dir.string() << '\n';
  return 0;
}

int cmd_repair_import(const Options& o) {
  MockBackend unused;
  Pipeline p(o.dataset, make_config(o, false), unused);
  int accepted = 0;
  for (const auto* t : p.pending_tickets()) {
    const auto path = o.repair_dir / (t->id + ".lvl");
    if (!fs::exists(path)) continue;
    Grid grid = read_level(path);
    if (grid == t->original_grid) continue;
    const auto id = t->id;
    const auto outcome = p.submit_repair(id, grid);
    std::cout << id << ": " << (outcome.accepted ? "accepted" : "rejected");
    if (!outcome.message.empty()) std::cout << " (" << outcome.message << ")";
    std::cout << '\n';
    accepted += outcome.accepted;
  }
  std::cout << accepted << " repairs accepted; stage 1 total " << p.state().stage1_accepted << " / "
            << p.config().stage1_target_new << '\n';
  return 0;
}

int cmd_augment(const Options& o) {
  MockBackend unused;
  Pipeline p(o.dataset, make_config(o, false), unused);
  const auto before = p.dataset().size();
  print_warnings(p.augment());
  std::cout << "augmented " << before << " -> " << p.dataset().size() << " rooms\n";
  return 0;
}

int cmd_stage2(const Options& o) {
  auto backend = make_backend(o);
  Pipeline p(o.dataset, make_config(o, true), *backend);
  std::cout << kRoundCsvHeader << '\n';
  const int first = p.state().stage2_rounds + 1;
  for (int r = first; r < first + p.config().stage2_rounds; ++r) {
    std::cout << to_csv_row(p.stage2_round(r)) << '\n' << std::flush;
  }
  print_warnings(p.warnings());
  std::cout << "dataset now holds " << p.dataset().size() << " rooms\n";
  return 0;
}

int cmd_report(const Options& o) {
  std::vector<RoundStats> rows;
  std::vector<fs::path> sources = {o.dataset / "report.csv"};
  sources.insert(sources.end(), o.files.begin(), o.files.end());
  for (const auto& f : sources) {
    if (!fs::exists(f)) throw std::runtime_error("no report at " + f.string());
    const auto part = read_report(f);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  std::cout << kRoundCsvHeader << '\n';
  for (const auto& r : rows) std::cout << to_csv_row(r) << '\n';
  std::cout << "\n# round,seeds,mean_playable_novel,min_playable_novel,max_playable_novel,mean_accuracy\n";
  for (const auto& s : summarize(rows)) {
    char line[160];
    std::snprintf(line, sizeof line, "# %d,%d,%.2f,%d,%d,%.6f", s.round_index, s.seeds, s.mean_playable_novel,
                  s.min_playable_novel, s.max_playable_novel, s.mean_accuracy);
    std::cout << line << '\n';
  }
  return 0;
}

int cmd_serve(const Options& o) {
  MockBackend unused;
  Pipeline p(o.dataset, make_config(o, false), unused);
  std::optional<fs::path> static_dir;
  if (!o.static_dir.empty()) static_dir = o.static_dir;
  RepairServer server(p, static_dir);
  if (!server.bind(o.host, o.port)) throw std::runtime_error("cannot listen on " + o.host + ":" + std::to_string(o.port));
  std::cout << "serving " << o.dataset.string() << " on http://" << o.host << ":" << o.port << '\n' << std::flush;
  return server.listen() ? 0 : 2;
}

int cmd_validate(const Options& o) {
  const auto report = validate(read_level(o.files.at(0)));
  std::cout << to_json(report).dump(2) << '\n';
  return report.pass ? 0 : 1;
}

int cmd_novelty(const Options& o) {
  const Grid grid = read_level(o.files.at(0));
  const Dataset dataset = load(o.dataset);
  const auto result = is_novel(grid, dataset, o.novelty_fraction);
  std::cout << to_json(result).dump(2) << '\n';
  return result.is_novel ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"roomforge: prompt-controlled room generation with bootstrapped fine-tuning"};
  app.require_subcommand(1);
  Options o;

  app.add_option("--dataset", o.dataset, "dataset directory")->capture_default_str();
  app.add_option("--backend", o.backend, "mock or remote")->check(CLI::IsMember({"mock", "remote"}))->capture_default_str();
  app.add_option("--seed", o.seed, "sampling and generation seed")->capture_default_str();
  app.add_option("--temperature", o.temperature, "sampling temperature")->capture_default_str();
  app.add_option("--novelty-fraction", o.novelty_fraction, "novelty threshold as a fraction of the room's tiles")
      ->capture_default_str();
  app.add_option("--rounds", o.rounds, "stage-2 rounds (default 5); cap on stage-1 rounds (default 100)");
  app.add_option("--gen-per-round", o.gen_per_round, "rooms generated per round (default 100)");
  app.add_option("--epochs", o.epochs, "fine-tune epochs (default 5 in stage 1, 2 in stage 2)");
  app.add_option("--model", o.model, "remote base model for the first fine-tune");

  auto* init = app.add_subcommand("init", "create a dataset from hand-made rooms");
  init->add_option("--from", o.from, "directory of .lvl/.txt room files");
  init->add_option("--synthetic", o.synthetic, "add N generated sample rooms");
  app.add_subcommand("stage1", "generate rounds until the stage-1 target is met, queueing repair tickets");
  app.add_subcommand("repair-export", "write pending repair tickets as editable files")
      ->add_option("--dir", o.repair_dir)
      ->capture_default_str();
  app.add_subcommand("repair-import", "submit edited ticket files")->add_option("--dir", o.repair_dir)->capture_default_str();
  app.add_subcommand("augment", "add flipped, rotated and pattern-swapped variants");
  app.add_subcommand("stage2", "run automated generation rounds");
  app.add_subcommand("report", "print round statistics and a per-round summary")
      ->add_option("csv", o.files, "extra report.csv files, e.g. from other seeds");
  auto* serve = app.add_subcommand("serve", "serve the repair API");
  serve->add_option("--host", o.host)->capture_default_str();
  serve->add_option("--port", o.port)->capture_default_str();
  serve->add_option("--static-dir", o.static_dir, "directory of editor assets to serve at /");
  app.add_subcommand("validate", "check a room file against the playability constraints")
      ->add_option("file", o.files)
      ->required();
  app.add_subcommand("novelty", "check a room file for novelty against the dataset")->add_option("file", o.files)->required();
  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  const std::string cmd = app.get_subcommands().front()->get_name();
  try {
    if (cmd == "init") return cmd_init(o);
    if (cmd == "stage1") return cmd_stage1(o);
    if (cmd == "repair-export") return cmd_repair_export(o);
    if (cmd == "repair-import") return cmd_repair_import(o);
    if (cmd == "augment") return cmd_augment(o);
    if (cmd == "stage2") return cmd_stage2(o);
    if (cmd == "report") return cmd_report(o);
    if (cmd == "serve") return cmd_serve(o);
    if (cmd == "validate") return cmd_validate(o);
    if (cmd == "novelty") return cmd_novelty(o);
  } catch (const std::exception& e) {
    nlohmann::ordered_json err;
    err["error"] = e.what();
    std::cerr << err.dump() << '\n';
    return 2;
  }
  return 2;
}
