#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "roomforge/census.hpp"
#include "roomforge/grid.hpp"

namespace roomforge {

struct PromptSpec {
  int width = 0;
  int height = 0;
  Tile base_tile = Tile::A;
  Tile border_tile = Tile::E;
  std::vector<Tile> pattern_tiles;
  double percent_pattern_tiles = 0.0;

  friend bool operator==(const PromptSpec&, const PromptSpec&) = default;
};

// Percent as written into the prompt: nearest integer, halves up.
inline int rendered_percent(double percent) { return static_cast<int>(std::floor(percent + 0.5)); }

inline PromptSpec derive_spec(const Grid& grid) {
  const auto census = tile_census(grid);
  return PromptSpec{grid.width(),         grid.height(),          census.base_tile,
                    census.border_tile,   census.pattern_tiles,   census.percent_pattern};
}

inline std::string build_prompt(const PromptSpec& spec) {
  auto quoted = [](Tile t) { return std::string("\"") + to_char(t) + "\""; };
  std::string out = "The size of the level is " + std::to_string(spec.width) + "x" +
                    std::to_string(spec.height) + ", the base tile is " + quoted(spec.base_tile) +
                    ", and the border tile is " + quoted(spec.border_tile) + ". ";
  switch (spec.pattern_tiles.size()) {
    case 0:
      out += "There are 0 pattern tiles, ";
      break;
    case 1:
      out += "There is 1 pattern tile, " + quoted(spec.pattern_tiles[0]) + ", ";
      break;
    default:
      out += "There are 2 pattern tiles, " + quoted(spec.pattern_tiles[0]) + " and " +
             quoted(spec.pattern_tiles[1]) + ", ";
      break;
  }
  out += "\"F\" is the water tile, \"J\" is the door tile, and the percentage of pattern tiles is " +
         std::to_string(rendered_percent(spec.percent_pattern_tiles)) + "%.->";
  return out;
}

class PromptError : public std::runtime_error {
 public:
  PromptError(std::string message, std::size_t position)
      : std::runtime_error(std::move(message)), position_(position) {}

  // Offset of the first character that does not fit the template.
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

namespace detail {

class PromptReader {
 public:
  explicit PromptReader(std::string_view text) : text_(text) {}

  void expect(std::string_view literal) {
    for (std::size_t i = 0; i < literal.size(); ++i) {
      if (pos_ + i >= text_.size() || text_[pos_ + i] != literal[i]) {
        fail("expected \"" + std::string(literal) + "\"", pos_ + i);
      }
    }
    pos_ += literal.size();
  }

  bool accept(std::string_view literal) {
    if (text_.substr(pos_).starts_with(literal)) {
      pos_ += literal.size();
      return true;
    }
    return false;
  }

  int integer() {
    const std::size_t start = pos_;
    long value = 0;
    while (pos_ < text_.size() && text_[pos_] >= '0' && text_[pos_] <= '9' && pos_ - start < 9) {
      value = value * 10 + (text_[pos_] - '0');
      ++pos_;
    }
    if (pos_ == start) fail("expected a number", start);
    return static_cast<int>(value);
  }

  Tile quoted_tile() {
    expect("\"");
    if (pos_ >= text_.size()) fail("expected a tile symbol", pos_);
    const auto t = tile_from_char(text_[pos_]);
    if (!t) fail("expected a tile symbol", pos_);
    ++pos_;
    expect("\"");
    return *t;
  }

  void finish() {
    if (pos_ != text_.size()) fail("unexpected text after \"->\"", pos_);
  }

 private:
  [[noreturn]] void fail(const std::string& what, std::size_t at) {
    throw PromptError("prompt does not match template at offset " + std::to_string(at) + ": " + what,
                      at);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace detail

// Inverse of build_prompt. The percentage comes back as the rendered
// integer.
inline PromptSpec parse_prompt(std::string_view text) {
  detail::PromptReader in(text);
  PromptSpec spec;
  in.expect("The size of the level is ");
  spec.width = in.integer();
  in.expect("x");
  spec.height = in.integer();
  in.expect(", the base tile is ");
  spec.base_tile = in.quoted_tile();
  in.expect(", and the border tile is ");
  spec.border_tile = in.quoted_tile();
  in.expect(". ");
  if (in.accept("There are 0 pattern tiles, ")) {
  } else if (in.accept("There is 1 pattern tile, ")) {
    spec.pattern_tiles.push_back(in.quoted_tile());
    in.expect(", ");
  } else {
    in.expect("There are 2 pattern tiles, ");
    spec.pattern_tiles.push_back(in.quoted_tile());
    in.expect(" and ");
    spec.pattern_tiles.push_back(in.quoted_tile());
    in.expect(", ");
  }
  in.expect("\"F\" is the water tile, \"J\" is the door tile, and the percentage of pattern tiles is ");
  spec.percent_pattern_tiles = in.integer();
  in.expect("%.->");
  in.finish();
  return spec;
}

struct FinetuneRecord {
  std::string prompt;
  std::string completion;

  friend bool operator==(const FinetuneRecord&, const FinetuneRecord&) = default;
};

class RecordError : public std::runtime_error {
 public:
  enum class Kind { MalformedJson, MissingField, CompletionUnparseable };

  RecordError(Kind kind, std::string message) : std::runtime_error(std::move(message)), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

inline FinetuneRecord make_record(const Grid& grid) {
  return {build_prompt(derive_spec(grid)), " " + serialize_level(grid, true)};
}

// Level carried by a completion (leading space and terminator removed).
inline Grid completion_grid(std::string_view completion) { return parse_level(completion); }

// One JSONL line, without the trailing newline.
inline std::string to_jsonl(const FinetuneRecord& record) {
  nlohmann::ordered_json j;
  j["prompt"] = record.prompt;
  j["completion"] = record.completion;
  return j.dump();
}

inline FinetuneRecord parse_record(std::string_view line) {
  const auto j = nlohmann::json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw RecordError(RecordError::Kind::MalformedJson, "record is not a JSON object");
  }
  FinetuneRecord record;
  for (const char* key : {"prompt", "completion"}) {
    const auto it = j.find(key);
    if (it == j.end()) {
      throw RecordError(RecordError::Kind::MissingField, std::string("record has no \"") + key + "\"");
    }
    if (!it->is_string()) {
      throw RecordError(RecordError::Kind::MalformedJson, std::string("\"") + key + "\" is not a string");
    }
    (std::string_view(key) == "prompt" ? record.prompt : record.completion) = it->get<std::string>();
  }
  try {
    completion_grid(record.completion);
  } catch (const LevelError& e) {
    throw RecordError(RecordError::Kind::CompletionUnparseable,
                      std::string("completion does not hold a level: ") + e.what());
  }
  return record;
}

}  // namespace roomforge
