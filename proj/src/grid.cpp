#include "pace/grid.hpp"

#include <algorithm>

namespace pace {

std::string Grid::to_string() const {
  std::string s(kCellCount, '0');
  for (int i = 0; i < kCellCount; ++i) {
    if (bits_.test(i)) s[i] = '1';
  }
  return s;
}

Grid Grid::from_string(std::string_view s) {
  if (s.size() != kCellCount) throw GridError("grid string must have 81 characters");
  Grid g;
  for (int i = 0; i < kCellCount; ++i) {
    if (s[i] == '1') {
      g.bits_.set(i);
    } else if (s[i] != '0') {
      throw GridError("grid string may contain only '0'/'1'");
    }
  }
  return g;
}

std::vector<Cell> Grid::cells() const {
  std::vector<Cell> out;
  out.reserve(popcount());
  for (int row = 0; row < kSide; ++row) {
    for (int col = 0; col < kSide; ++col) {
      if (bits_.test(row * kSide + col)) out.push_back({col, row});
    }
  }
  return out;
}

Grid place_block(const Grid& grid, const PrimitiveBlock& block) {
  Grid out = grid;
  for (Cell c : block.cells()) {
    if (!Grid::in_bounds(c)) throw OutOfBounds("block cell out of bounds");
    if (out.test(c)) throw CellOccupied("block cell already occupied");
    out.set(c);
  }
  return out;
}

std::vector<Cell> grid_diff(const Grid& before, const Grid& after) {
  std::vector<Cell> out;
  for (int row = 0; row < Grid::kSide; ++row) {
    for (int col = 0; col < Grid::kSide; ++col) {
      Cell c{col, row};
      if (before.test(c) && !after.test(c)) {
        throw NotMonotone("cell set in before but unset in after");
      }
      if (after.test(c) && !before.test(c)) out.push_back(c);
    }
  }
  return out;
}

Footprint Footprint::from_offsets(std::vector<Offset> offsets) {
  if (offsets.empty()) throw GridError("footprint may not be empty");
  std::sort(offsets.begin(), offsets.end());
  offsets.erase(std::unique(offsets.begin(), offsets.end()), offsets.end());
  const Offset base = offsets.front();
  for (Offset& o : offsets) o = o - base;
  Footprint f;
  f.offsets_ = std::move(offsets);
  return f;
}

Footprint Footprint::from_cells(std::span<const Cell> cells) {
  std::vector<Offset> offsets;
  offsets.reserve(cells.size());
  for (Cell c : cells) offsets.push_back({c.col, c.row});
  return from_offsets(std::move(offsets));
}

int Footprint::width() const {
  int lo = 0, hi = 0;
  for (const Offset& o : offsets_) {
    lo = std::min(lo, o.dcol);
    hi = std::max(hi, o.dcol);
  }
  return hi - lo + 1;
}

int Footprint::height() const {
  int lo = 0, hi = 0;
  for (const Offset& o : offsets_) {
    lo = std::min(lo, o.drow);
    hi = std::max(hi, o.drow);
  }
  return hi - lo + 1;
}

}  // namespace pace
