#include <doctest.h>

#include <random>

#include "pace/grid.hpp"

using namespace pace;

TEST_CASE("horizontal placement fills the two expected cells") {
  Grid g = place_block(Grid{}, {Orientation::Horizontal, {0, 0}});
  CHECK(g.test({0, 0}));
  CHECK(g.test({1, 0}));
  CHECK(g.popcount() == 2);
}

TEST_CASE("vertical placement at the top row is out of bounds") {
  CHECK_THROWS_AS(place_block(Grid{}, {Orientation::Vertical, {0, 8}}), OutOfBounds);
  CHECK_THROWS_AS(place_block(Grid{}, {Orientation::Horizontal, {8, 0}}), OutOfBounds);
}

TEST_CASE("overlapping placement is rejected") {
  Grid g = place_block(Grid{}, {Orientation::Horizontal, {0, 0}});
  CHECK_THROWS_AS(place_block(g, {Orientation::Horizontal, {1, 0}}), CellOccupied);
}

TEST_CASE("placement leaves the input grid unchanged and adds two cells") {
  Grid g;
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> coord(0, 8);
  std::uniform_int_distribution<int> flip(0, 1);
  int placed = 0;
  for (int i = 0; i < 200 && placed < 20; ++i) {
    PrimitiveBlock b{flip(rng) ? Orientation::Vertical : Orientation::Horizontal,
                     {coord(rng), coord(rng)}};
    Grid before = g;
    try {
      g = place_block(g, b);
    } catch (const GridError&) {
      CHECK(before == g);
      continue;
    }
    ++placed;
    CHECK(g.popcount() == before.popcount() + 2);
  }
  CHECK(placed > 5);
}

TEST_CASE("non-overlapping placements commute") {
  PrimitiveBlock a{Orientation::Horizontal, {0, 0}};
  PrimitiveBlock b{Orientation::Vertical, {4, 3}};
  CHECK(place_block(place_block(Grid{}, a), b) == place_block(place_block(Grid{}, b), a));
}

TEST_CASE("grid_diff returns the added cells") {
  Grid before;
  Grid after = place_block(before, {Orientation::Horizontal, {0, 0}});
  CHECK(grid_diff(before, after) == std::vector<Cell>{{0, 0}, {1, 0}});
  CHECK(grid_diff(after, after).empty());
}

TEST_CASE("grid_diff rejects removed cells") {
  Grid before;
  before.set({0, 0});
  CHECK_THROWS_AS(grid_diff(before, Grid{}), NotMonotone);
}

TEST_CASE("grid string round-trips") {
  Grid g = place_block(Grid{}, {Orientation::Vertical, {3, 5}});
  const std::string s = g.to_string();
  CHECK(s.size() == 81);
  CHECK(Grid::from_string(s) == g);
  CHECK(Grid::from_string(std::string(81, '0')) == Grid{});
  CHECK_THROWS_AS(Grid::from_string("0101"), GridError);
}

TEST_CASE("footprint normalization is idempotent and translation invariant") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> coord(-3, 7);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Offset> offsets;
    const int n = 2 + static_cast<int>(rng() % 5);
    for (int i = 0; i < n; ++i) offsets.push_back({coord(rng), coord(rng)});

    Footprint f = Footprint::from_offsets(offsets);
    CHECK(Footprint::from_offsets(f.offsets()) == f);

    std::vector<Offset> shifted = offsets;
    for (Offset& o : shifted) o = o + Offset{5, -2};
    CHECK(Footprint::from_offsets(shifted) == f);
  }
}

TEST_CASE("footprints compare by offset sets") {
  Footprint tower = Footprint::from_offsets({{0, 0}, {0, 1}, {0, 2}, {0, 3}});
  Footprint shifted = Footprint::from_offsets({{2, 4}, {2, 5}, {2, 6}, {2, 7}});
  Footprint bar = Footprint::from_offsets({{0, 0}, {1, 0}, {2, 0}, {3, 0}});
  CHECK(tower == shifted);
  CHECK(tower != bar);
  CHECK(tower.width() == 1);
  CHECK(tower.height() == 4);
}
