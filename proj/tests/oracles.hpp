// Independent reference implementations used only by tests: exhaustive parse
// enumeration, naive occurrence counting, and random program generators.
#pragma once

#include <algorithm>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <vector>

#include "pace/abstraction.hpp"
#include "pace/grid.hpp"
#include "pace/symlang.hpp"

namespace pace::oracle {

inline bool segment_matches(std::span<const PrimitiveBlock> prims, std::size_t at,
                            const PrimSeq& flat) {
  if (at + flat.size() > prims.size()) return false;
  const Offset delta =
      Offset{prims[at].anchor.col, prims[at].anchor.row} - flat.front().offset;
  for (std::size_t k = 0; k < flat.size(); ++k) {
    if (prims[at + k].orientation != flat[k].orientation) return false;
    if (prims[at + k].anchor.col != flat[k].offset.dcol + delta.dcol ||
        prims[at + k].anchor.row != flat[k].offset.drow + delta.drow) {
      return false;
    }
  }
  return true;
}

// Exhaustive enumeration of every segmentation into lexicon actions; returns
// the minimum action count, and optionally whether some minimal parse uses
// `required_action`.
struct ParseSearch {
  int best = std::numeric_limits<int>::max() / 2;
  bool best_uses_required = false;
};

inline void enumerate_parses(std::span<const PrimitiveBlock> prims, const Lexicon& lexicon,
                             std::size_t at, int actions_used, bool used_required,
                             int required_action, ParseSearch& search) {
  if (at == prims.size()) {
    if (actions_used < search.best) {
      search.best = actions_used;
      search.best_uses_required = used_required;
    } else if (actions_used == search.best) {
      search.best_uses_required = search.best_uses_required || used_required;
    }
    return;
  }
  for (const Action& a : lexicon) {
    if (segment_matches(prims, at, a.flat)) {
      enumerate_parses(prims, lexicon, at + a.flat.size(), actions_used + 1,
                       used_required || a.id == required_action, required_action, search);
    }
  }
}

inline int brute_force_mdl(const Program& program, const Lexicon& lexicon) {
  const std::vector<PrimitiveBlock> prims = flatten(program, lexicon);
  ParseSearch search;
  enumerate_parses(prims, lexicon, 0, 0, false, -1, search);
  return search.best;
}

inline bool brute_force_optimal_parse_uses(const Program& program, const Lexicon& lexicon,
                                           int action_id) {
  const std::vector<PrimitiveBlock> prims = flatten(program, lexicon);
  ParseSearch search;
  enumerate_parses(prims, lexicon, 0, 0, false, action_id, search);
  return search.best_uses_required;
}

// Naive O(n^2) scan: occurrences of `key` as a contiguous action window across
// the programs, compared after flattening and normalization.
inline int naive_occurrences(const PrimSeq& key, std::span<const Program> programs,
                             const Lexicon& lexicon, int max_window) {
  int count = 0;
  for (const Program& p : programs) {
    const int n = p.length();
    for (int start = 0; start < n; ++start) {
      for (int len = 2; len <= max_window && start + len <= n; ++len) {
        std::vector<PrimitiveBlock> prims;
        for (int k = start; k < start + len; ++k) {
          for (PrimitiveBlock b : flatten_step(p.steps[static_cast<std::size_t>(k)], lexicon)) {
            prims.push_back(b);
          }
        }
        if (normalize_prim_seq(prims) == key) ++count;
      }
    }
  }
  return count;
}

// A random in-bounds program of primitive placements (never overlapping).
inline Program random_primitive_program(Rng& rng, int max_len = 8) {
  std::uniform_int_distribution<int> len_dist(1, max_len);
  std::uniform_int_distribution<int> coord(0, Grid::kSide - 1);
  std::uniform_int_distribution<int> flip(0, 1);
  const int target = len_dist(rng);
  Program p;
  Grid g;
  int guard = 0;
  while (p.length() < target && guard < 500) {
    ++guard;
    PrimitiveBlock b;
    b.orientation = flip(rng) == 0 ? Orientation::Horizontal : Orientation::Vertical;
    b.anchor = {coord(rng), coord(rng)};
    try {
      g = place_block(g, b);
    } catch (const GridError&) {
      continue;
    }
    p.steps.push_back(
        {b.orientation == Orientation::Horizontal ? kHorizontalId : kVerticalId, b.anchor});
  }
  return p;
}

// Extends a lexicon with a few random small abstractions built from windows of
// random programs, mirroring how candidates arise in training.
inline Lexicon random_lexicon(Rng& rng, int extra_actions, int source_programs = 6) {
  Lexicon lexicon = initial_lexicon();
  std::vector<Program> sources;
  for (int i = 0; i < source_programs; ++i) {
    sources.push_back(random_primitive_program(rng, 8));
  }
  std::vector<Candidate> candidates = extract_candidates(sources, lexicon, 4);
  std::shuffle(candidates.begin(), candidates.end(), rng);
  for (const Candidate& cand : candidates) {
    if (static_cast<int>(lexicon.size()) >= 2 + extra_actions) break;
    const bool duplicate = std::any_of(lexicon.begin(), lexicon.end(),
                                       [&](const Action& a) { return a.flat == cand.key; });
    if (duplicate) continue;
    lexicon.push_back(make_abstraction(static_cast<int>(lexicon.size()),
                                       "r" + std::to_string(lexicon.size()), cand.expansion,
                                       lexicon));
  }
  return lexicon;
}

}  // namespace pace::oracle
