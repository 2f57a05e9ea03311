#include "pace/shapes.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include "pace/json_io.hpp"

namespace pace {

namespace {

constexpr int kMaxShapeWidth = 4;

struct ShapeDef {
  const char* name;
  std::vector<PrimitiveBlock> blocks;
};

PrimitiveBlock hb(int col, int row) { return {Orientation::Horizontal, {col, row}}; }
PrimitiveBlock vb(int col, int row) { return {Orientation::Vertical, {col, row}}; }

// Letter-like shapes built from 2x1 and 1x2 blocks, at most 4 columns wide.
// The 12-shape prefix doubles as the reduced-scale dataset, so it mixes sizes.
std::vector<ShapeDef> builtin_defs() {
  return {
      {"I", {vb(0, 0), vb(0, 2)}},
      {"l", {vb(0, 0), vb(0, 2), vb(0, 4)}},
      {"L", {hb(0, 0), vb(0, 1), vb(0, 3)}},
      {"J", {hb(0, 0), vb(1, 1), vb(1, 3)}},
      {"c", {hb(0, 0), vb(0, 1), hb(0, 3)}},
      {"T", {hb(0, 4), vb(1, 0), vb(1, 2), hb(2, 4)}},
      {"b", {vb(0, 0), vb(0, 2), vb(0, 4), vb(1, 0)}},
      {"h", {vb(0, 0), vb(0, 2), vb(0, 4), vb(1, 0), vb(1, 2)}},
      {"U", {hb(0, 0), vb(0, 1), vb(0, 3), vb(2, 0), vb(2, 2)}},
      {"E", {vb(0, 0), vb(0, 2), vb(0, 4), hb(1, 0), hb(1, 2), hb(1, 5)}},
      {"O", {vb(0, 0), vb(0, 2), hb(1, 0), hb(1, 3), vb(3, 0), vb(3, 2)}},
      {"D", {vb(0, 0), vb(0, 2), vb(0, 4), hb(1, 0), hb(1, 5), vb(2, 1), vb(2, 3)}},
      {"r", {vb(0, 0), vb(0, 2), hb(1, 3)}},
      {"u", {vb(0, 0), vb(0, 2), vb(1, 0)}},
      {"v", {vb(0, 1), vb(1, 0), vb(2, 1)}},
      {"S", {hb(0, 0), vb(0, 2), vb(1, 1), hb(0, 4)}},
      {"Z", {hb(0, 0), vb(0, 1), vb(1, 2), hb(0, 4)}},
      {"t", {vb(0, 0), vb(0, 2), vb(0, 4), hb(1, 4)}},
      {"P", {vb(0, 0), vb(0, 2), vb(0, 4), vb(1, 4)}},
      {"d", {vb(0, 0), vb(1, 0), vb(1, 2), vb(1, 4)}},
      {"o", {hb(0, 0), vb(0, 1), hb(0, 3), vb(1, 1)}},
      {"C", {vb(0, 0), vb(0, 2), vb(0, 4), hb(1, 0), hb(1, 5)}},
      {"F", {vb(0, 0), vb(0, 2), vb(0, 4), hb(1, 3), hb(1, 5)}},
      {"R", {vb(0, 0), vb(0, 2), vb(0, 4), vb(1, 0), hb(1, 4)}},
      {"H", {vb(0, 0), vb(0, 2), hb(1, 2), vb(3, 0), vb(3, 2)}},
      {"N", {vb(0, 0), vb(0, 2), vb(1, 1), vb(2, 0), vb(2, 2)}},
      {"n", {vb(0, 0), vb(0, 2), hb(0, 4), hb(2, 4), vb(3, 0), vb(3, 2)}},
      {"M", {vb(0, 0), vb(0, 2), vb(1, 2), vb(2, 2), vb(3, 0), vb(3, 2)}},
      {"W", {vb(0, 0), vb(0, 2), vb(1, 0), vb(2, 0), vb(3, 0), vb(3, 2)}},
      {"A", {vb(0, 0), vb(0, 2), hb(1, 1), hb(1, 3), vb(3, 0), vb(3, 2)}},
      {"G", {vb(0, 0), vb(0, 2), vb(0, 4), hb(1, 0), hb(1, 5), vb(2, 1)}},
  };
}

std::vector<Cell> covered_cells(const std::vector<PrimitiveBlock>& blocks) {
  std::vector<Cell> cells;
  for (const PrimitiveBlock& b : blocks) {
    for (Cell c : b.cells()) cells.push_back(c);
  }
  return cells;
}

// Keys of every contiguous multi-block window of every shape, mapped to the
// shapes they occur in; drives the recurrence check.
std::map<PrimSeq, std::set<int>> window_keys(const std::vector<Shape>& shapes) {
  std::map<PrimSeq, std::set<int>> keys;
  for (const Shape& shape : shapes) {
    const std::size_t n = shape.blocks.size();
    for (std::size_t start = 0; start < n; ++start) {
      for (std::size_t len = 2; start + len <= n; ++len) {
        std::span<const PrimitiveBlock> window(shape.blocks.data() + start, len);
        keys[normalize_prim_seq(window)].insert(shape.id);
      }
    }
  }
  return keys;
}

}  // namespace

double Dataset::mean_canonical_length() const {
  if (scenes.empty()) return 0.0;
  double total = 0.0;
  for (const Scene& s : scenes) total += s.canonical_program.length();
  return total / static_cast<double>(scenes.size());
}

std::vector<Shape> builtin_shape_library(int count) {
  const std::vector<ShapeDef> defs = builtin_defs();
  if (count < 2 || count > static_cast<int>(defs.size())) {
    throw InvalidShapeSpec("builtin library supports between 2 and 31 shapes");
  }
  std::vector<Shape> shapes;
  for (int i = 0; i < count; ++i) {
    Shape s;
    s.id = i;
    s.name = defs[static_cast<std::size_t>(i)].name;
    s.blocks = defs[static_cast<std::size_t>(i)].blocks;
    shapes.push_back(std::move(s));
  }
  return build_shape_library(std::move(shapes), 8);
}

std::vector<Shape> build_shape_library(std::vector<Shape> shapes, int min_recurring) {
  if (shapes.size() < 2) throw InvalidShapeSpec("a shape library needs at least 2 shapes");

  std::set<Footprint> seen;
  for (Shape& shape : shapes) {
    if (shape.blocks.size() < 2) {
      throw InvalidShapeSpec("shape '" + shape.name + "' has fewer than 2 blocks");
    }

    // Canonical build order: column-major, bottom to top.
    std::sort(shape.blocks.begin(), shape.blocks.end(),
              [](const PrimitiveBlock& a, const PrimitiveBlock& b) { return a.anchor < b.anchor; });

    // Translate so the minimal covered cell is the origin.
    std::vector<Cell> cells = covered_cells(shape.blocks);
    Cell base = *std::min_element(cells.begin(), cells.end());
    for (PrimitiveBlock& b : shape.blocks) {
      b.anchor = Cell{b.anchor.col - base.col, b.anchor.row - base.row};
    }
    cells = covered_cells(shape.blocks);

    std::set<Cell> unique_cells(cells.begin(), cells.end());
    if (unique_cells.size() != cells.size()) {
      throw InvalidShapeSpec("shape '" + shape.name + "' has overlapping blocks");
    }
    shape.footprint = Footprint::from_cells(cells);
    if (shape.footprint.width() > kMaxShapeWidth || shape.footprint.height() > Grid::kSide) {
      throw InvalidShapeSpec("shape '" + shape.name + "' exceeds 4 columns x 9 rows");
    }
    if (!seen.insert(shape.footprint).second) {
      throw InvalidShapeSpec("duplicate footprint for shape '" + shape.name + "'");
    }
  }

  int recurring = 0;
  for (const auto& [key, owners] : window_keys(shapes)) {
    if (owners.size() >= 2) ++recurring;
  }
  if (recurring < min_recurring) {
    throw InsufficientRecurrence("only " + std::to_string(recurring) +
                                 " multi-block sub-sequences recur across shapes");
  }
  return shapes;
}

std::vector<Shape> load_shape_spec(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw InvalidShapeSpec("cannot open shape spec " + file.string());
  nlohmann::json j;
  in >> j;
  std::vector<Shape> shapes;
  for (const nlohmann::json& js : j) {
    Shape s;
    s.id = js.at("id").get<int>();
    s.name = js.at("name").get<std::string>();
    js.at("blocks").get_to(s.blocks);
    shapes.push_back(std::move(s));
  }
  return build_shape_library(std::move(shapes), 8);
}

std::vector<Scene> compose_scenes(const std::vector<Shape>& shapes) {
  const int n = static_cast<int>(shapes.size());
  std::vector<Scene> scenes;
  scenes.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
  for (int left = 0; left < n; ++left) {
    for (int right = 0; right < n; ++right) {
      const Shape& ls = shapes[static_cast<std::size_t>(left)];
      const Shape& rs = shapes[static_cast<std::size_t>(right)];
      const int right_col = ls.width() + 1;
      if (right_col + rs.width() > Grid::kSide) {
        throw ShapeTooWide("shapes '" + ls.name + "' and '" + rs.name + "' do not fit");
      }
      Scene scene;
      scene.id = left * n + right;
      scene.left = left;
      scene.right = right;
      scene.left_anchor = {0, 0};
      scene.right_anchor = {right_col, 0};

      Program p;
      for (const PrimitiveBlock& b : ls.blocks) {
        p.steps.push_back({b.orientation == Orientation::Horizontal ? kHorizontalId : kVerticalId,
                           Cell{b.anchor.col, b.anchor.row}});
      }
      for (const PrimitiveBlock& b : rs.blocks) {
        p.steps.push_back({b.orientation == Orientation::Horizontal ? kHorizontalId : kVerticalId,
                           Cell{b.anchor.col + right_col, b.anchor.row}});
      }
      scene.canonical_program = std::move(p);
      scene.goal = execute(scene.canonical_program, initial_lexicon());
      scenes.push_back(std::move(scene));
    }
  }
  return scenes;
}

Split split_scenes(const std::vector<Scene>& scenes, std::uint64_t seed) {
  const std::size_t total = scenes.size();
  const int n = static_cast<int>(std::lround(std::sqrt(static_cast<double>(total))));
  if (static_cast<std::size_t>(n) * static_cast<std::size_t>(n) != total) {
    throw GridError("scene list is not a full ordered-pair square");
  }
  std::vector<int> sigma(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) sigma[static_cast<std::size_t>(i)] = i;
  Rng rng(seed);
  std::shuffle(sigma.begin(), sigma.end(), rng);

  Split split;
  std::set<int> test_ids;
  for (int i = 0; i < n; ++i) {
    test_ids.insert(i * n + sigma[static_cast<std::size_t>(i)]);
  }
  for (const Scene& s : scenes) {
    if (test_ids.count(s.id)) {
      split.test.push_back(s.id);
    } else {
      split.train.push_back(s.id);
    }
  }
  return split;
}

Dataset make_dataset(std::vector<Shape> shapes, std::uint64_t seed) {
  Dataset d;
  d.seed = seed;
  d.shapes = std::move(shapes);
  d.scenes = compose_scenes(d.shapes);
  d.split = split_scenes(d.scenes, seed);
  return d;
}

namespace {

nlohmann::json dataset_to_json(const Dataset& d) {
  nlohmann::json j;
  j["seed"] = d.seed;
  j["shapes"] = nlohmann::json::array();
  for (const Shape& s : d.shapes) {
    j["shapes"].push_back({{"id", s.id}, {"name", s.name}, {"blocks", s.blocks}});
  }
  j["scenes"] = nlohmann::json::array();
  for (const Scene& s : d.scenes) {
    j["scenes"].push_back({{"id", s.id},
                           {"left", s.left},
                           {"right", s.right},
                           {"left_anchor", s.left_anchor},
                           {"right_anchor", s.right_anchor},
                           {"goal", s.goal.to_string()},
                           {"canonical_program", s.canonical_program}});
  }
  j["split"] = {{"train", d.split.train}, {"test", d.split.test}};
  return j;
}

}  // namespace

void save_dataset(const Dataset& dataset, const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out) throw GridError("cannot write dataset file " + file.string());
  out << dataset_to_json(dataset).dump(1) << "\n";
}

Dataset load_dataset(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw GridError("cannot open dataset file " + file.string());
  nlohmann::json j;
  in >> j;

  Dataset d;
  d.seed = j.at("seed").get<std::uint64_t>();
  for (const nlohmann::json& js : j.at("shapes")) {
    Shape s;
    s.id = js.at("id").get<int>();
    s.name = js.at("name").get<std::string>();
    js.at("blocks").get_to(s.blocks);
    s.footprint = Footprint::from_cells(covered_cells(s.blocks));
    d.shapes.push_back(std::move(s));
  }
  for (const nlohmann::json& js : j.at("scenes")) {
    Scene s;
    s.id = js.at("id").get<int>();
    s.left = js.at("left").get<int>();
    s.right = js.at("right").get<int>();
    js.at("left_anchor").get_to(s.left_anchor);
    js.at("right_anchor").get_to(s.right_anchor);
    s.goal = Grid::from_string(js.at("goal").get<std::string>());
    js.at("canonical_program").get_to(s.canonical_program);
    d.scenes.push_back(std::move(s));
  }
  j.at("split").at("train").get_to(d.split.train);
  j.at("split").at("test").get_to(d.split.test);

  for (const Scene& s : d.scenes) {
    if (execute(s.canonical_program, initial_lexicon()) != s.goal) {
      throw GridError("dataset scene " + std::to_string(s.id) +
                      " goal does not match its canonical program");
    }
  }
  return d;
}

std::uint64_t dataset_fingerprint(const Dataset& dataset) {
  const std::string blob = dataset_to_json(dataset).dump();
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a
  for (unsigned char c : blob) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace pace
