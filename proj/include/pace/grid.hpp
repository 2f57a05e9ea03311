// 9x9 block grid: cells, primitive block placement, translation-invariant footprints.
#pragma once

#include <array>
#include <bitset>
#include <compare>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pace {

using Rng = std::mt19937_64;

struct GridError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct OutOfBounds : GridError {
  using GridError::GridError;
};
struct CellOccupied : GridError {
  using GridError::GridError;
};
struct NotMonotone : GridError {
  using GridError::GridError;
};

// Row 0 is the bottom row.
struct Cell {
  int col = 0;
  int row = 0;
  auto operator<=>(const Cell&) const = default;
};

struct Offset {
  int dcol = 0;
  int drow = 0;
  auto operator<=>(const Offset&) const = default;
};

inline Cell operator+(Cell c, Offset o) { return {c.col + o.dcol, c.row + o.drow}; }
inline Offset operator-(Cell a, Cell b) { return {a.col - b.col, a.row - b.row}; }
inline Offset operator+(Offset a, Offset b) { return {a.dcol + b.dcol, a.drow + b.drow}; }
inline Offset operator-(Offset a, Offset b) { return {a.dcol - b.dcol, a.drow - b.drow}; }

enum class Orientation : std::uint8_t { Horizontal, Vertical };

// A 2x1 (horizontal) or 1x2 (vertical) block; the anchor is its minimal cell.
struct PrimitiveBlock {
  Orientation orientation = Orientation::Horizontal;
  Cell anchor;

  std::array<Cell, 2> cells() const {
    if (orientation == Orientation::Horizontal) {
      return {anchor, Cell{anchor.col + 1, anchor.row}};
    }
    return {anchor, Cell{anchor.col, anchor.row + 1}};
  }
  auto operator<=>(const PrimitiveBlock&) const = default;
};

class Grid {
 public:
  static constexpr int kSide = 9;
  static constexpr int kCellCount = kSide * kSide;

  static bool in_bounds(Cell c) {
    return c.col >= 0 && c.col < kSide && c.row >= 0 && c.row < kSide;
  }

  bool test(Cell c) const { return bits_.test(index(c)); }
  void set(Cell c) { bits_.set(index(c)); }
  void reset(Cell c) { bits_.reset(index(c)); }
  int popcount() const { return static_cast<int>(bits_.count()); }
  bool empty() const { return bits_.none(); }

  // Row-major, bottom row first: '1' occupied, '0' free.
  std::string to_string() const;
  static Grid from_string(std::string_view s);

  std::vector<Cell> cells() const;

  bool operator==(const Grid&) const = default;

 private:
  static int index(Cell c) {
    if (!in_bounds(c)) throw OutOfBounds("cell out of bounds");
    return c.row * kSide + c.col;
  }
  std::bitset<kCellCount> bits_;
};

// Returns a copy of `grid` with the block's two cells set.
Grid place_block(const Grid& grid, const PrimitiveBlock& block);

// Cells set in `after` but not in `before`; requires before <= after cell-wise.
std::vector<Cell> grid_diff(const Grid& before, const Grid& after);

// A set of cell offsets normalized so the lexicographically minimal one is (0,0).
class Footprint {
 public:
  Footprint() = default;
  static Footprint from_cells(std::span<const Cell> cells);
  static Footprint from_offsets(std::vector<Offset> offsets);

  const std::vector<Offset>& offsets() const { return offsets_; }
  int size() const { return static_cast<int>(offsets_.size()); }
  int width() const;
  int height() const;

  auto operator<=>(const Footprint&) const = default;

 private:
  std::vector<Offset> offsets_;  // sorted, deduplicated, min element (0,0)
};

}  // namespace pace
