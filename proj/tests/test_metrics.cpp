#include <gtest/gtest.h>

#include "support.hpp"

using namespace roomforge;

namespace {

Dataset one_entry(const Grid& g) {
  Dataset d;
  d.add_if_new(g, Provenance::handmade(), 0);
  return d;
}

// 10x10 all-E border; interior filled row-major with 24 A, 21 B, 19 C.
Grid ten_by_ten() {
  Grid g(10, 10, Tile::E);
  int k = 0;
  for (int r = 1; r < 9; ++r) {
    for (int c = 1; c < 9; ++c, ++k) g.set(r, c, k < 24 ? Tile::A : k < 45 ? Tile::B : Tile::C);
  }
  return g;
}

// Changes the first n interior A cells (row-major) to F.
Grid with_changes(Grid g, int n) {
  for (int r = 1; r < 9 && n > 0; ++r) {
    for (int c = 1; c < 9 && n > 0; ++c) {
      if (g.at(r, c) == Tile::A) {
        g.set(r, c, Tile::F);
        --n;
      }
    }
  }
  return g;
}

PipelineConfig defaults() { return PipelineConfig{}; }

}  // namespace

TEST(Hamming, Basics) {
  const Grid a = ten_by_ten();
  EXPECT_EQ(hamming_distance(a, a), 0u);
  EXPECT_FALSE(hamming_distance(Grid(8, 8, Tile::E), Grid(10, 8, Tile::E)).has_value());
}

TEST(Hamming, FiveListedCells) {
  Grid a(6, 6, Tile::E);
  Grid b = a;
  for (Cell c : {Cell{0, 0}, Cell{1, 4}, Cell{2, 2}, Cell{5, 5}, Cell{3, 1}}) b.set(c, Tile::A);
  EXPECT_EQ(hamming_distance(a, b), 5u);
  EXPECT_EQ(hamming_distance(b, a), 5u);
}

TEST(Hamming, IsAMetric) {
  Rng rng(41);
  for (int i = 0; i < 200; ++i) {
    const Grid a = support::random_grid(rng, 6, 6, "ABCEF");
    const Grid b = support::random_grid(rng, 6, 6, "ABCEF");
    const Grid c = support::random_grid(rng, 6, 6, "ABCEF");
    const auto ab = *hamming_distance(a, b);
    EXPECT_EQ(ab, *hamming_distance(b, a));
    EXPECT_LE(*hamming_distance(a, c), ab + *hamming_distance(b, c));
    EXPECT_EQ(ab == 0, a == b);
  }
}

TEST(Novelty, ThresholdUsesWholeRoom) {
  EXPECT_EQ(novelty_threshold(Grid(10, 10, Tile::E), 0.10), 10u);
  EXPECT_EQ(novelty_threshold(Grid(12, 10, Tile::E), 0.10), 12u);
  EXPECT_EQ(novelty_threshold(Grid(14, 10, Tile::E), 0.10), 14u);
  EXPECT_EQ(novelty_threshold(Grid(6, 6, Tile::E), 0.10), 4u);  // 3.6 rounds up
}

TEST(Novelty, IdenticalIsNotNovel) {
  const Grid g = ten_by_ten();
  const auto r = is_novel(g, one_entry(g), 0.10);
  EXPECT_EQ(r.min_distance_raw, 0u);
  EXPECT_FALSE(r.is_novel);
}

TEST(Novelty, Boundary) {
  const Grid base = ten_by_ten();
  const Dataset d = one_entry(base);
  const auto ten = is_novel(with_changes(base, 10), d, 0.10);
  EXPECT_EQ(ten.threshold_cells, 10u);
  EXPECT_EQ(ten.min_distance_raw, 10u);
  EXPECT_GE(*ten.min_distance_swapped, 10u);
  EXPECT_TRUE(ten.is_novel);
  const auto nine = is_novel(with_changes(base, 9), d, 0.10);
  EXPECT_EQ(nine.min_distance_raw, 9u);
  EXPECT_FALSE(nine.is_novel);
}

TEST(Novelty, SwapCatchesRecolouredCopies) {
  const Grid base = ten_by_ten();
  const Grid recoloured = swap_patterns(base);
  const auto r = is_novel(recoloured, one_entry(base), 0.10);
  EXPECT_EQ(r.min_distance_raw, 40u);  // every B and C cell
  EXPECT_EQ(r.min_distance_swapped, 0u);
  EXPECT_FALSE(r.is_novel);
}

TEST(Novelty, EmptyDatasetAndSizeMismatchAreNovel) {
  const Grid g = ten_by_ten();
  const auto empty = is_novel(g, Dataset{}, 0.10);
  EXPECT_TRUE(empty.is_novel);
  EXPECT_FALSE(empty.min_distance_raw.has_value());
  EXPECT_FALSE(empty.min_distance_swapped.has_value());
  const auto other = is_novel(g, one_entry(support::passing_room()), 0.10);
  EXPECT_TRUE(other.is_novel);
  EXPECT_FALSE(other.min_distance_raw.has_value());
}

TEST(Novelty, MonotoneInFraction) {
  const Grid base = ten_by_ten();
  const Dataset d = one_entry(base);
  for (int n = 0; n <= 30; n += 3) {
    const Grid cand = with_changes(base, n);
    bool prev = true;
    for (double f = 0.01; f <= 0.5; f += 0.01) {
      const bool now = is_novel(cand, d, f).is_novel;
      EXPECT_TRUE(prev || !now) << "novel again at fraction " << f;
      prev = now;
    }
  }
}

TEST(Accuracy, Equation) {
  EXPECT_EQ(accuracy_from_percent(31.25, 31.25), 1.0);
  EXPECT_DOUBLE_EQ(accuracy_from_percent(40, 30), 0.75);
  EXPECT_EQ(accuracy_from_percent(20, 0), 0.0);
  EXPECT_DOUBLE_EQ(accuracy_from_percent(20, 50), -0.5);
  EXPECT_THROW(accuracy_from_percent(0, 10), MetricError);
}

TEST(Accuracy, FromGrid) {
  const Grid g = ten_by_ten();  // 40 pattern cells of 100
  PromptSpec s = derive_spec(g);
  EXPECT_DOUBLE_EQ(s.percent_pattern_tiles, 40.0);
  EXPECT_EQ(accuracy(s, g), 1.0);
  s.percent_pattern_tiles = 50.0;
  EXPECT_DOUBLE_EQ(accuracy(s, g), 0.8);
}

TEST(Classify, Unparseable) {
  const auto c = classify("EEEE\nEAE\nEEEE", derive_spec(ten_by_ten()), Dataset{}, defaults());
  EXPECT_FALSE(c.parse_ok);
  EXPECT_FALSE(c.playable_novel);
  EXPECT_FALSE(c.parse_error.empty());
}

TEST(Classify, DuplicateIsNotNovel) {
  const Grid g = support::passing_room();
  const auto c = classify(serialize_level(g), PromptSpec{12, 10, Tile::A, Tile::E, {Tile::B}, 10}, one_entry(g),
                          defaults());
  EXPECT_TRUE(c.parse_ok);
  EXPECT_TRUE(c.report->pass);
  EXPECT_EQ(c.novelty->min_distance_raw, 0u);
  EXPECT_FALSE(c.playable_novel);
}

TEST(Classify, PassingRoomAgainstOtherData) {
  const auto c = classify(" " + serialize_level(support::passing_room(), true), derive_spec(ten_by_ten()),
                          one_entry(ten_by_ten()), defaults());
  EXPECT_TRUE(c.parse_ok);
  EXPECT_TRUE(c.playable_novel);
  ASSERT_TRUE(c.accuracy.has_value());
  EXPECT_EQ(*c.accuracy, 0.0);  // asked for 40%, has none
}

TEST(Classify, ZeroPercentPromptHasNoAccuracy) {
  const Grid g = support::passing_room();
  const auto c = classify(serialize_level(g), derive_spec(g), Dataset{}, defaults());
  EXPECT_FALSE(c.accuracy.has_value());
}

namespace {

Classification fake(bool parsed, bool playable, bool novel, std::optional<double> acc) {
  Classification c;
  c.parse_ok = parsed;
  if (parsed) {
    PlayabilityReport r;
    r.pass = playable;
    c.report = r;
    if (playable) {
      NoveltyResult n;
      n.is_novel = novel;
      c.novelty = n;
    }
  }
  c.accuracy = acc;
  c.playable_novel = parsed && playable && novel;
  return c;
}

}  // namespace

TEST(Aggregate, Empty) {
  const auto s = aggregate_round({}, 1, 7);
  EXPECT_EQ(s.n_generated, 0);
  EXPECT_EQ(s.n_playable_novel, 0);
  EXPECT_EQ(s.mean_accuracy, 0.0);
}

TEST(Aggregate, CountsAndClamp) {
  std::vector<Classification> results;
  for (int i = 0; i < 37; ++i) results.push_back(fake(true, true, true, std::nullopt));
  for (int i = 0; i < 63; ++i) results.push_back(fake(i % 2 == 0, i % 3 == 0, false, std::nullopt));
  const auto s = aggregate_round(results, 5, 1);
  EXPECT_EQ(s.n_generated, 100);
  EXPECT_EQ(s.n_playable_novel, 37);
  EXPECT_LE(s.n_playable_novel, s.n_playable);
  EXPECT_LE(s.n_playable, s.n_parsed);
  EXPECT_LE(s.n_parsed, s.n_generated);

  const auto acc = aggregate_round({fake(true, false, false, 1.0), fake(true, false, false, 0.5),
                                    fake(true, false, false, -0.2)},
                                   1, 0);
  EXPECT_DOUBLE_EQ(acc.mean_accuracy, 0.5);
}

TEST(Aggregate, CsvRoundTrip) {
  RoundStats s{3, 42, 100, 98, 40, 12, 11, 0.731234};
  EXPECT_EQ(to_csv_row(s), "3,42,100,98,40,12,11,0.731234");
  EXPECT_EQ(parse_csv_row(to_csv_row(s)), s);
  EXPECT_THROW(parse_csv_row("1,2,3"), std::invalid_argument);
}
