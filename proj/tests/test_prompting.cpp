#include <gtest/gtest.h>

#include "support.hpp"

using namespace roomforge;

namespace {

PromptSpec spec_16x12() {
  return PromptSpec{16, 12, Tile::A, Tile::E, {Tile::B, Tile::C}, 31.25};
}

}  // namespace

TEST(BuildPrompt, TwoPatterns) {
  EXPECT_EQ(build_prompt(spec_16x12()),
            "The size of the level is 16x12, the base tile is \"A\", and the border tile is \"E\". "
            "There are 2 pattern tiles, \"B\" and \"C\", \"F\" is the water tile, \"J\" is the door tile, "
            "and the percentage of pattern tiles is 31%.->");
}

TEST(BuildPrompt, OneAndZeroPatterns) {
  PromptSpec s{10, 10, Tile::A, Tile::Hash, {Tile::B}, 20.0};
  const auto one = build_prompt(s);
  EXPECT_NE(one.find("There is 1 pattern tile, \"B\", \"F\" is the water tile"), std::string::npos);
  s.pattern_tiles.clear();
  s.percent_pattern_tiles = 0;
  const auto zero = build_prompt(s);
  EXPECT_NE(zero.find("There are 0 pattern tiles, \"F\" is the water tile"), std::string::npos);
  EXPECT_TRUE(zero.ends_with("is 0%.->"));
}

TEST(BuildPrompt, PercentRoundsHalfUp) {
  EXPECT_EQ(rendered_percent(31.25), 31);
  EXPECT_EQ(rendered_percent(12.5), 13);
  EXPECT_EQ(rendered_percent(12.4999), 12);
  EXPECT_EQ(rendered_percent(0.5), 1);
  EXPECT_EQ(rendered_percent(99.5), 100);
}

TEST(ParsePrompt, TemplateInstance) {
  const std::string text =
      "The size of the level is 10x10, the base tile is \"A\", and the border tile is \"#\". "
      "There is 1 pattern tile, \"B\", \"F\" is the water tile, \"J\" is the door tile, and the "
      "percentage of pattern tiles is 20%.->";
  const auto s = parse_prompt(text);
  EXPECT_EQ(s.width, 10);
  EXPECT_EQ(s.height, 10);
  EXPECT_EQ(s.base_tile, Tile::A);
  EXPECT_EQ(s.border_tile, Tile::Hash);
  EXPECT_EQ(s.pattern_tiles, std::vector<Tile>{Tile::B});
  EXPECT_EQ(s.percent_pattern_tiles, 20.0);
}

TEST(ParsePrompt, MissingArrowIsTemplateMismatch) {
  auto text = build_prompt(spec_16x12());
  text.resize(text.size() - 2);
  try {
    parse_prompt(text);
    FAIL();
  } catch (const PromptError& e) {
    EXPECT_EQ(e.position(), text.size());  // the text stops where "->" should start
  }
}

TEST(ParsePrompt, ReportsFirstDivergentPosition) {
  auto text = build_prompt(spec_16x12());
  const auto at = text.find("base tile");
  text[at] = 'B';
  try {
    parse_prompt(text);
    FAIL();
  } catch (const PromptError& e) {
    EXPECT_EQ(e.position(), at);
  }
  EXPECT_THROW(parse_prompt(build_prompt(spec_16x12()) + " "), PromptError);
  EXPECT_THROW(parse_prompt(""), PromptError);
}

TEST(ParsePrompt, RoundTripsRandomSpecs) {
  Rng rng(31);
  for (int i = 0; i < 500; ++i) {
    PromptSpec s = support::random_spec(rng);
    const auto back = parse_prompt(build_prompt(s));
    s.percent_pattern_tiles = rendered_percent(s.percent_pattern_tiles);
    EXPECT_EQ(back, s);
    EXPECT_EQ(build_prompt(back), build_prompt(s));
  }
}

TEST(DeriveSpec, CensusRoom) {
  Grid g(8, 12, Tile::E);
  std::size_t k = 0;
  for (int r = 1; r < 11; ++r) {
    for (int c = 1; c < 7; ++c, ++k) g.set(r, c, k < 30 ? Tile::A : k < 50 ? Tile::B : Tile::C);
  }
  const auto s = derive_spec(g);
  EXPECT_EQ(s.width, 8);
  EXPECT_EQ(s.height, 12);
  EXPECT_EQ(s.base_tile, Tile::A);
  EXPECT_EQ(s.border_tile, Tile::E);
  EXPECT_EQ(s.pattern_tiles, (std::vector<Tile>{Tile::B, Tile::C}));
  EXPECT_DOUBLE_EQ(s.percent_pattern_tiles, 31.25);
  EXPECT_EQ(derive_spec(flip_horizontal(g)), s);
  EXPECT_EQ(derive_spec(flip_vertical(g)), s);
}

TEST(DeriveSpec, NoPatterns) {
  const auto s = derive_spec(support::passing_room());
  EXPECT_TRUE(s.pattern_tiles.empty());
  EXPECT_EQ(s.percent_pattern_tiles, 0.0);
}

TEST(Record, CompletionFormat) {
  const Grid g = support::passing_room();
  const auto rec = make_record(g);
  EXPECT_EQ(rec.completion, " " + serialize_level(g) + ". XUT");
  EXPECT_EQ(rec.prompt, build_prompt(derive_spec(g)));
  EXPECT_EQ(completion_grid(rec.completion), g);
  EXPECT_EQ(to_jsonl(rec).find('\n'), std::string::npos);
  EXPECT_TRUE(to_jsonl(rec).starts_with("{\"prompt\":"));
}

TEST(Record, JsonlRoundTrip) {
  Rng rng(32);
  for (int i = 0; i < 100; ++i) {
    const Grid g = support::roomish_grid(rng, 2 * rng.range(2, 8), 2 * rng.range(2, 8));
    FinetuneRecord rec{build_prompt(support::random_spec(rng)), " " + serialize_level(g, true)};
    EXPECT_EQ(parse_record(to_jsonl(rec)), rec);
  }
}

TEST(Record, Errors) {
  auto kind_of = [](std::string_view line) {
    try {
      parse_record(line);
    } catch (const RecordError& e) {
      return static_cast<int>(e.kind());
    }
    return -1;
  };
  EXPECT_EQ(kind_of("{\"prompt\": \"x->\"}"), static_cast<int>(RecordError::Kind::MissingField));
  EXPECT_EQ(kind_of("{\"prompt\": \"x->\", "), static_cast<int>(RecordError::Kind::MalformedJson));
  EXPECT_EQ(kind_of("[1,2]"), static_cast<int>(RecordError::Kind::MalformedJson));
  EXPECT_EQ(kind_of("{\"prompt\": \"x->\", \"completion\": \" EEE\\nEE\\n. XUT\"}"),
            static_cast<int>(RecordError::Kind::CompletionUnparseable));
  try {
    parse_record("{\"prompt\": \"x->\"}");
  } catch (const RecordError& e) {
    EXPECT_NE(std::string(e.what()).find("completion"), std::string::npos);
  }
}
