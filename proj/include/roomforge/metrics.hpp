#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "roomforge/config.hpp"
#include "roomforge/constraints.hpp"
#include "roomforge/dataset.hpp"

namespace roomforge {

// Number of differing cells, border included. Rooms of different size
// are incomparable (nullopt), which novelty treats as infinitely far.
inline std::optional<std::size_t> hamming_distance(const Grid& a, const Grid& b) {
  if (a.width() != b.width() || a.height() != b.height()) return std::nullopt;
  std::size_t d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += a.cells()[i] != b.cells()[i];
  return d;
}

// nullopt (incomparable) is at least any threshold.
inline bool meets_threshold(const std::optional<std::size_t>& distance, std::size_t threshold) {
  return !distance || *distance >= threshold;
}

struct NoveltyResult {
  std::optional<std::size_t> min_distance_raw;
  std::optional<std::size_t> min_distance_swapped;
  std::size_t threshold_cells = 0;
  bool is_novel = true;
  std::optional<std::string> nearest_entry_id;
};

inline std::size_t novelty_threshold(const Grid& candidate, double fraction) {
  // The epsilon keeps products like 0.1 * 120 = 12.000000000000002 at 12.
  return static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(candidate.size()) - 1e-9));
}

// Novel when both the room and its pattern-swapped recolouring are at
// least the threshold away from every stored room.
inline NoveltyResult is_novel(const Grid& candidate, const Dataset& dataset, double novelty_fraction) {
  if (!(novelty_fraction > 0.0 && novelty_fraction <= 1.0)) {
    throw std::invalid_argument("novelty fraction must be in (0, 1]");
  }
  NoveltyResult result;
  result.threshold_cells = novelty_threshold(candidate, novelty_fraction);

  const Grid swapped = swap_patterns(candidate);
  const bool check_swap = !(swapped == candidate);
  for (const auto& entry : dataset.entries()) {
    const auto raw = hamming_distance(candidate, entry.grid);
    if (raw && (!result.min_distance_raw || *raw < *result.min_distance_raw)) {
      result.min_distance_raw = raw;
      result.nearest_entry_id = entry.id;
    }
    if (check_swap) {
      const auto sw = hamming_distance(swapped, entry.grid);
      if (sw && (!result.min_distance_swapped || *sw < *result.min_distance_swapped)) {
        result.min_distance_swapped = sw;
      }
    }
  }
  if (!check_swap) result.min_distance_swapped = result.min_distance_raw;
  result.is_novel = meets_threshold(result.min_distance_raw, result.threshold_cells) &&
                    meets_threshold(result.min_distance_swapped, result.threshold_cells);
  return result;
}

class MetricError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

inline double accuracy_from_percent(double prompt_percent, double generated_percent) {
  if (prompt_percent == 0.0) {
    throw MetricError("accuracy is undefined for a prompt with 0% pattern tiles");
  }
  return 1.0 - std::abs(prompt_percent - generated_percent) / prompt_percent;
}

// 1 - |P - G| / P, unclamped. P is the unrounded prompt percentage.
inline double accuracy(const PromptSpec& spec, const Grid& generated) {
  return accuracy_from_percent(spec.percent_pattern_tiles, pattern_percent(generated));
}

struct Classification {
  bool parse_ok = false;
  std::string parse_error;
  std::optional<Grid> grid;
  std::optional<PlayabilityReport> report;
  std::optional<NoveltyResult> novelty;
  std::optional<double> accuracy;
  bool playable_novel = false;
};

// Parse, then constraints, then (for playable rooms only) novelty.
// Accuracy is reported for every parsed room with a nonzero prompt
// percentage.
inline Classification classify(std::string_view candidate_text, const PromptSpec& spec,
                               const Dataset& dataset, const PipelineConfig& config) {
  Classification out;
  try {
    out.grid = parse_level(candidate_text);
  } catch (const LevelError& e) {
    out.parse_error = e.what();
    return out;
  }
  out.parse_ok = true;
  if (spec.percent_pattern_tiles > 0.0) out.accuracy = accuracy(spec, *out.grid);
  out.report = validate(*out.grid);
  if (out.report->pass) {
    out.novelty = is_novel(*out.grid, dataset, config.novelty_fraction);
    out.playable_novel = out.novelty->is_novel;
  }
  return out;
}

struct RoundStats {
  int round_index = 0;
  std::uint64_t seed = 0;
  int n_generated = 0;
  int n_parsed = 0;
  int n_playable = 0;
  int n_novel = 0;
  int n_playable_novel = 0;
  double mean_accuracy = 0.0;  // over parsed rooms with defined accuracy, clamped at 0

  friend bool operator==(const RoundStats&, const RoundStats&) = default;
};

inline RoundStats aggregate_round(const std::vector<Classification>& results, int round_index,
                                  std::uint64_t seed) {
  RoundStats s;
  s.round_index = round_index;
  s.seed = seed;
  s.n_generated = static_cast<int>(results.size());
  double acc_sum = 0.0;
  int acc_n = 0;
  for (const auto& r : results) {
    if (!r.parse_ok) continue;
    ++s.n_parsed;
    if (r.report && r.report->pass) ++s.n_playable;
    if (r.novelty && r.novelty->is_novel) ++s.n_novel;
    if (r.playable_novel) ++s.n_playable_novel;
    if (r.accuracy) {
      acc_sum += std::max(0.0, *r.accuracy);
      ++acc_n;
    }
  }
  s.mean_accuracy = acc_n > 0 ? acc_sum / acc_n : 0.0;
  return s;
}

inline constexpr std::string_view kRoundCsvHeader =
    "round,seed,n_generated,n_parsed,n_playable,n_novel,n_playable_novel,mean_accuracy";

inline std::string to_csv_row(const RoundStats& s) {
  char acc[32];
  std::snprintf(acc, sizeof acc, "%.6f", s.mean_accuracy);
  return std::to_string(s.round_index) + "," + std::to_string(s.seed) + "," +
         std::to_string(s.n_generated) + "," + std::to_string(s.n_parsed) + "," +
         std::to_string(s.n_playable) + "," + std::to_string(s.n_novel) + "," +
         std::to_string(s.n_playable_novel) + "," + acc;
}

inline RoundStats parse_csv_row(std::string_view row) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : row) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  fields.push_back(cur);
  if (fields.size() != 8) throw std::invalid_argument("report row must have 8 fields");
  RoundStats s;
  s.round_index = std::stoi(fields[0]);
  s.seed = std::stoull(fields[1]);
  s.n_generated = std::stoi(fields[2]);
  s.n_parsed = std::stoi(fields[3]);
  s.n_playable = std::stoi(fields[4]);
  s.n_novel = std::stoi(fields[5]);
  s.n_playable_novel = std::stoi(fields[6]);
  s.mean_accuracy = std::stod(fields[7]);
  return s;
}

}  // namespace roomforge
