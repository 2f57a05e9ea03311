// Letter-like shape library, two-shape goal scenes and the train/test split.
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pace/grid.hpp"
#include "pace/symlang.hpp"

namespace pace {

struct InvalidShapeSpec : GridError {
  using GridError::GridError;
};
struct InsufficientRecurrence : GridError {
  using GridError::GridError;
};
struct ShapeTooWide : GridError {
  using GridError::GridError;
};

struct Shape {
  int id = 0;
  std::string name;
  std::vector<PrimitiveBlock> blocks;  // canonical build order: column-major, bottom-up
  Footprint footprint;

  int width() const { return footprint.width(); }
  int block_count() const { return static_cast<int>(blocks.size()); }
};

struct Scene {
  int id = 0;
  int left = 0;
  int right = 0;
  Cell left_anchor;
  Cell right_anchor;
  Grid goal;
  Program canonical_program;
};

struct Split {
  std::vector<int> train;  // scene ids
  std::vector<int> test;
};

struct Dataset {
  std::uint64_t seed = 0;
  std::vector<Shape> shapes;
  std::vector<Scene> scenes;
  Split split;

  const Scene& scene(int id) const { return scenes.at(static_cast<std::size_t>(id)); }
  double mean_canonical_length() const;
};

// The shipped 31-shape library. `count` may trim it to a prefix (>= 2 shapes)
// for reduced-scale experiments.
std::vector<Shape> builtin_shape_library(int count = 31);

// Validates and canonicalizes a shape list: blocks sorted column-major
// bottom-up, footprints pairwise distinct, each at most 4 columns wide and 9
// rows tall, at least 2 blocks, and at least `min_recurring` multi-block
// sub-sequences shared by two or more shapes.
std::vector<Shape> build_shape_library(std::vector<Shape> shapes, int min_recurring = 8);

// Loads {id, name, blocks} records from a JSON spec file.
std::vector<Shape> load_shape_spec(const std::filesystem::path& file);

// One scene per ordered shape pair: left at column 0, right separated by one
// empty column, both resting on row 0.
std::vector<Scene> compose_scenes(const std::vector<Shape>& shapes);

// Test set = one random permutation sigma, scenes (i, sigma(i)); the rest train.
Split split_scenes(const std::vector<Scene>& scenes, std::uint64_t seed);

Dataset make_dataset(std::vector<Shape> shapes, std::uint64_t seed);

void save_dataset(const Dataset& dataset, const std::filesystem::path& file);
Dataset load_dataset(const std::filesystem::path& file);

// Stable content hash used in run manifests.
std::uint64_t dataset_fingerprint(const Dataset& dataset);

}  // namespace pace
