#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <map>
#include <set>

#include "oracles.hpp"
#include "pace/shapes.hpp"

using namespace pace;

TEST_CASE("builtin library provides 31 valid letter shapes") {
  const std::vector<Shape> shapes = builtin_shape_library();
  REQUIRE(shapes.size() == 31);

  std::set<Footprint> footprints;
  for (const Shape& s : shapes) {
    CHECK(s.blocks.size() >= 2);
    CHECK(s.footprint.width() <= 4);
    CHECK(s.footprint.height() <= 9);
    footprints.insert(s.footprint);

    // Canonical order: column-major, bottom to top.
    for (std::size_t i = 1; i < s.blocks.size(); ++i) {
      CHECK(s.blocks[i - 1].anchor < s.blocks[i].anchor);
    }
  }
  CHECK(footprints.size() == 31);
}

TEST_CASE("tower sub-shape recurs and recurrence is plentiful") {
  const std::vector<Shape> shapes = builtin_shape_library();
  const PrimSeq tower{{Orientation::Vertical, {0, 0}}, {Orientation::Vertical, {0, 2}}};

  std::map<PrimSeq, std::set<int>> owners;
  for (const Shape& s : shapes) {
    for (std::size_t start = 0; start < s.blocks.size(); ++start) {
      for (std::size_t len = 2; start + len <= s.blocks.size(); ++len) {
        std::span<const PrimitiveBlock> window(s.blocks.data() + start, len);
        owners[normalize_prim_seq(window)].insert(s.id);
      }
    }
  }
  REQUIRE(owners.count(tower) == 1);
  CHECK(owners[tower].size() >= 2);

  int recurring = 0;
  for (const auto& [key, ids] : owners) {
    if (ids.size() >= 2) ++recurring;
  }
  CHECK(recurring >= 8);

  // The reduced 12-shape prefix keeps enough shared structure too.
  const std::vector<Shape> reduced = builtin_shape_library(12);
  CHECK(reduced.size() == 12);
}

TEST_CASE("duplicate footprints are rejected") {
  std::vector<Shape> shapes = builtin_shape_library();
  shapes[1].blocks = shapes[0].blocks;  // same footprint, different id
  CHECK_THROWS_AS(build_shape_library(std::move(shapes)), InvalidShapeSpec);
}

TEST_CASE("overlapping blocks are rejected") {
  std::vector<Shape> shapes = builtin_shape_library();
  shapes[0].blocks = {{Orientation::Horizontal, {0, 0}}, {Orientation::Horizontal, {1, 0}}};
  CHECK_THROWS_AS(build_shape_library(std::move(shapes)), InvalidShapeSpec);
}

TEST_CASE("961 scenes with valid side-by-side goals") {
  const Dataset d = make_dataset(builtin_shape_library(), 0);
  REQUIRE(d.scenes.size() == 961);

  for (const Scene& s : d.scenes) {
    CHECK(s.goal.popcount() % 2 == 0);
    CHECK(s.left_anchor == Cell{0, 0});
    CHECK(s.right_anchor.col == d.shapes[static_cast<std::size_t>(s.left)].width() + 1);
    CHECK(execute(s.canonical_program, initial_lexicon()) == s.goal);
  }

  // A same-shape pair stays disjoint thanks to the gap column.
  const Scene& diagonal = d.scene(0 * 31 + 0);
  CHECK(diagonal.left == diagonal.right);
  CHECK(diagonal.goal.popcount() ==
        2 * 2 * d.shapes[0].block_count());

  const double mean = d.mean_canonical_length();
  CHECK(mean >= 8.0);
  CHECK(mean <= 12.0);
}

TEST_CASE("split is a deterministic permutation matching") {
  const std::vector<Shape> shapes = builtin_shape_library();
  const std::vector<Scene> scenes = compose_scenes(shapes);

  const Split a = split_scenes(scenes, 0);
  const Split b = split_scenes(scenes, 0);
  CHECK(a.train == b.train);
  CHECK(a.test == b.test);
  CHECK(split_scenes(scenes, 1).test != a.test);

  REQUIRE(a.train.size() == 930);
  REQUIRE(a.test.size() == 31);

  std::set<int> train_ids(a.train.begin(), a.train.end());
  std::map<int, int> left_count, right_count, train_left;
  for (int id : a.test) {
    CHECK(train_ids.count(id) == 0);
    left_count[id / 31] += 1;
    right_count[id % 31] += 1;
  }
  for (int id : a.train) train_left[id / 31] += 1;
  for (int s = 0; s < 31; ++s) {
    CHECK(left_count[s] == 1);
    CHECK(right_count[s] == 1);
    CHECK(train_left[s] == 30);
  }
}

TEST_CASE("dataset files round-trip") {
  const Dataset d = make_dataset(builtin_shape_library(12), 3);
  const std::filesystem::path file =
      std::filesystem::temp_directory_path() / "pace_test_dataset.json";
  save_dataset(d, file);
  const Dataset loaded = load_dataset(file);

  CHECK(loaded.seed == d.seed);
  REQUIRE(loaded.shapes.size() == d.shapes.size());
  for (std::size_t i = 0; i < d.shapes.size(); ++i) {
    CHECK(loaded.shapes[i].blocks == d.shapes[i].blocks);
    CHECK(loaded.shapes[i].footprint == d.shapes[i].footprint);
  }
  REQUIRE(loaded.scenes.size() == d.scenes.size());
  for (std::size_t i = 0; i < d.scenes.size(); ++i) {
    CHECK(loaded.scenes[i].goal == d.scenes[i].goal);
    CHECK(loaded.scenes[i].canonical_program == d.scenes[i].canonical_program);
  }
  CHECK(loaded.split.train == d.split.train);
  CHECK(loaded.split.test == d.split.test);
  CHECK(dataset_fingerprint(loaded) == dataset_fingerprint(d));
  std::filesystem::remove(file);
}
