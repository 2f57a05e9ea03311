#include "pace/symlang.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace pace {

namespace {

Cell min_covered_cell(std::span<const PrimitiveBlock> blocks) {
  // Each block's minimal cell is its anchor, so the minimum over anchors suffices.
  Cell best = blocks.front().anchor;
  for (const PrimitiveBlock& b : blocks) best = std::min(best, b.anchor);
  return best;
}

const Action& lookup(const Lexicon& lexicon, int id) {
  if (id < 0 || id >= static_cast<int>(lexicon.size())) {
    throw UnknownAction("action id " + std::to_string(id) + " not in lexicon");
  }
  return lexicon[static_cast<std::size_t>(id)];
}

// True when prims[at..at+|flat|) equals `flat` up to translation.
bool matches_at(std::span<const PrimitiveBlock> prims, std::size_t at, const PrimSeq& flat) {
  if (at + flat.size() > prims.size()) return false;
  const Offset delta = Offset{prims[at].anchor.col, prims[at].anchor.row} - flat.front().offset;
  for (std::size_t k = 0; k < flat.size(); ++k) {
    const PlacedBlock& want = flat[k];
    const PrimitiveBlock& got = prims[at + k];
    if (got.orientation != want.orientation) return false;
    if (got.anchor.col != want.offset.dcol + delta.dcol ||
        got.anchor.row != want.offset.drow + delta.drow) {
      return false;
    }
  }
  return true;
}

}  // namespace

PrimSeq normalize_prim_seq(std::span<const PrimitiveBlock> blocks) {
  if (blocks.empty()) throw GridError("cannot normalize an empty primitive sequence");
  const Cell base = min_covered_cell(blocks);
  PrimSeq out;
  out.reserve(blocks.size());
  for (const PrimitiveBlock& b : blocks) {
    out.push_back({b.orientation, b.anchor - base});
  }
  return out;
}

Lexicon initial_lexicon() {
  Lexicon lex(2);
  lex[0].id = kHorizontalId;
  lex[0].kind = ActionKind::Primitive;
  lex[0].name = "horizontal";
  lex[0].flat = {{Orientation::Horizontal, Offset{0, 0}}};
  lex[0].footprint = Footprint::from_offsets({{0, 0}, {1, 0}});
  lex[0].size = 1;

  lex[1].id = kVerticalId;
  lex[1].kind = ActionKind::Primitive;
  lex[1].name = "vertical";
  lex[1].flat = {{Orientation::Vertical, Offset{0, 0}}};
  lex[1].footprint = Footprint::from_offsets({{0, 0}, {0, 1}});
  lex[1].size = 1;
  return lex;
}

Action make_abstraction(int id, std::string name, std::vector<ExpansionStep> expansion,
                        const Lexicon& lexicon) {
  if (expansion.size() < 2) throw GridError("abstraction expansion must have at least 2 steps");
  std::vector<PrimitiveBlock> prims;
  for (const ExpansionStep& step : expansion) {
    if (step.action >= id) {
      throw GridError("abstraction expansion may only reference smaller action ids");
    }
    const Action& child = lookup(lexicon, step.action);
    for (const PlacedBlock& pb : child.flat) {
      prims.push_back({pb.orientation, Cell{step.offset.dcol + pb.offset.dcol,
                                            step.offset.drow + pb.offset.drow}});
    }
  }

  Action a;
  a.id = id;
  a.kind = ActionKind::Abstraction;
  a.name = std::move(name);
  a.flat = normalize_prim_seq(prims);
  a.size = static_cast<int>(a.flat.size());

  // Re-anchor expansion offsets to the normalized frame.
  const Cell base = min_covered_cell(prims);
  for (ExpansionStep& step : expansion) {
    step.offset = step.offset - Offset{base.col, base.row};
  }
  a.expansion = std::move(expansion);

  std::vector<Cell> cells;
  for (const PlacedBlock& pb : a.flat) {
    PrimitiveBlock b{pb.orientation, Cell{pb.offset.dcol, pb.offset.drow}};
    for (Cell c : b.cells()) cells.push_back(c);
  }
  a.footprint = Footprint::from_cells(cells);
  return a;
}

std::vector<PrimitiveBlock> flatten_step(const PlacedAction& step, const Lexicon& lexicon) {
  const Action& action = lookup(lexicon, step.action);
  std::vector<PrimitiveBlock> out;
  out.reserve(action.flat.size());
  for (const PlacedBlock& pb : action.flat) {
    out.push_back({pb.orientation, step.anchor + pb.offset});
  }
  return out;
}

std::vector<PrimitiveBlock> flatten(const Program& program, const Lexicon& lexicon) {
  std::vector<PrimitiveBlock> out;
  for (const PlacedAction& step : program.steps) {
    for (PrimitiveBlock b : flatten_step(step, lexicon)) out.push_back(b);
  }
  return out;
}

Grid execute(const Program& program, const Lexicon& lexicon) {
  Grid g;
  for (const PrimitiveBlock& b : flatten(program, lexicon)) g = place_block(g, b);
  return g;
}

int mdl_of_prims(std::span<const PrimitiveBlock> prims, const Lexicon& lexicon) {
  const int n = static_cast<int>(prims.size());
  constexpr int kInf = std::numeric_limits<int>::max() / 2;
  std::vector<int> dp(static_cast<std::size_t>(n) + 1, kInf);
  dp[0] = 0;
  for (int i = 1; i <= n; ++i) {
    for (const Action& a : lexicon) {
      const int len = static_cast<int>(a.flat.size());
      if (len > i) continue;
      if (matches_at(prims, static_cast<std::size_t>(i - len), a.flat)) {
        dp[i] = std::min(dp[i], dp[i - len] + 1);
      }
    }
  }
  return dp[n];
}

int mdl(const Program& program, const Lexicon& lexicon) {
  const std::vector<PrimitiveBlock> prims = flatten(program, lexicon);
  return mdl_of_prims(prims, lexicon);
}

std::optional<Program> rewrite_with(const Program& program, const Action& new_action,
                                    const Lexicon& lexicon) {
  const std::vector<PrimitiveBlock> prims = flatten(program, lexicon);
  const int n = static_cast<int>(prims.size());
  constexpr int kInf = std::numeric_limits<int>::max() / 2;

  // Suffix parse: cost[j] = min actions to cover prims[j..n); usable[j] marks
  // whether some min-cost parse of the suffix contains new_action.
  std::vector<int> cost(static_cast<std::size_t>(n) + 1, kInf);
  std::vector<char> usable(static_cast<std::size_t>(n) + 1, 0);
  cost[n] = 0;
  for (int j = n - 1; j >= 0; --j) {
    for (const Action& a : lexicon) {
      const int len = static_cast<int>(a.flat.size());
      if (j + len > n) continue;
      if (!matches_at(prims, static_cast<std::size_t>(j), a.flat)) continue;
      const int c = cost[j + len] + 1;
      if (c < cost[j]) {
        cost[j] = c;
        usable[j] = (a.id == new_action.id) || usable[j + len];
      } else if (c == cost[j]) {
        usable[j] = usable[j] || (a.id == new_action.id) || usable[j + len];
      }
    }
  }
  if (!usable[0]) return std::nullopt;

  // Walk left to right, preferring the longest optimal match at each boundary
  // while keeping a use of new_action reachable.
  Program out;
  int j = 0;
  bool need_use = true;
  while (j < n) {
    const Action* chosen = nullptr;
    int chosen_len = 0;
    for (const Action& a : lexicon) {
      const int len = static_cast<int>(a.flat.size());
      if (len <= chosen_len || j + len > n) continue;
      if (!matches_at(prims, static_cast<std::size_t>(j), a.flat)) continue;
      if (cost[j + len] + 1 != cost[j]) continue;
      if (need_use && a.id != new_action.id && !usable[j + len]) continue;
      chosen = &a;
      chosen_len = len;
    }
    if (chosen == nullptr) throw GridError("rewrite reconstruction failed");
    const Cell anchor = [&] {
      Cell best = prims[static_cast<std::size_t>(j)].anchor;
      for (int k = 1; k < chosen_len; ++k) {
        best = std::min(best, prims[static_cast<std::size_t>(j + k)].anchor);
      }
      return best;
    }();
    out.steps.push_back({chosen->id, anchor});
    if (chosen->id == new_action.id) need_use = false;
    j += chosen_len;
  }
  return out;
}

ProgramTable prune_table(const ProgramTable& table,
                         const std::function<double(const Program&)>& quality, int keep) {
  if (keep < 1) throw GridError("prune_table requires keep >= 1");
  ProgramTable out;
  out.by_scene.reserve(table.by_scene.size());
  for (const std::vector<Program>& programs : table.by_scene) {
    std::vector<std::size_t> order(programs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const double qa = quality(programs[a]);
      const double qb = quality(programs[b]);
      if (qa != qb) return qa > qb;
      return programs[a].length() < programs[b].length();
    });
    std::vector<Program> kept;
    const std::size_t limit = std::min<std::size_t>(order.size(), static_cast<std::size_t>(keep));
    // Preserve insertion order among survivors.
    std::vector<std::size_t> surviving(order.begin(), order.begin() + limit);
    std::sort(surviving.begin(), surviving.end());
    for (std::size_t idx : surviving) kept.push_back(programs[idx]);
    out.by_scene.push_back(std::move(kept));
  }
  return out;
}

}  // namespace pace
