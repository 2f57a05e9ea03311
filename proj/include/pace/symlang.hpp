// The architect's action language: primitives, offset-composed abstractions,
// programs of placed actions, shortest-parse length and rewriting.
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pace/grid.hpp"

namespace pace {

struct UnknownAction : GridError {
  using GridError::GridError;
};

// A primitive block position relative to an action's anchor.
struct PlacedBlock {
  Orientation orientation = Orientation::Horizontal;
  Offset offset;
  auto operator<=>(const PlacedBlock&) const = default;
};

// Ordered primitive sequence, translated so the minimal covered cell is (0,0).
// Two actions denote the same building behaviour iff their PrimSeqs are equal.
using PrimSeq = std::vector<PlacedBlock>;

PrimSeq normalize_prim_seq(std::span<const PrimitiveBlock> blocks);

enum class ActionKind : std::uint8_t { Primitive, Abstraction };

constexpr int kHorizontalId = 0;
constexpr int kVerticalId = 1;

struct ExpansionStep {
  int action = 0;
  Offset offset;  // child anchor relative to the abstraction's anchor
  auto operator<=>(const ExpansionStep&) const = default;
};

struct Action {
  int id = 0;
  ActionKind kind = ActionKind::Primitive;
  std::string name;
  std::vector<ExpansionStep> expansion;  // empty for primitives
  PrimSeq flat;                          // normalized flattened primitive sequence
  Footprint footprint;
  int size = 1;  // primitive blocks in the flattening
};

using Lexicon = std::vector<Action>;  // index == id

// The two primitives: horizontal (id 0) and vertical (id 1).
Lexicon initial_lexicon();

// Builds an abstraction action, flattening its expansion against `lexicon`.
// Requires at least two steps, all referencing ids smaller than `id`.
Action make_abstraction(int id, std::string name, std::vector<ExpansionStep> expansion,
                        const Lexicon& lexicon);

struct PlacedAction {
  int action = 0;
  Cell anchor;  // minimal cell of the action's absolute footprint
  auto operator<=>(const PlacedAction&) const = default;
};

struct Program {
  std::vector<PlacedAction> steps;
  int length() const { return static_cast<int>(steps.size()); }
  auto operator<=>(const Program&) const = default;
};

// Recursive expansion into primitives with absolute anchors, in build order.
std::vector<PrimitiveBlock> flatten(const Program& program, const Lexicon& lexicon);
std::vector<PrimitiveBlock> flatten_step(const PlacedAction& step, const Lexicon& lexicon);

// Sequential placement of the flattened primitives starting from an empty grid.
Grid execute(const Program& program, const Lexicon& lexicon);

// Length of the shortest program over `lexicon` with the same flattening.
int mdl(const Program& program, const Lexicon& lexicon);
int mdl_of_prims(std::span<const PrimitiveBlock> prims, const Lexicon& lexicon);

// Shortest parse of `program` that uses `new_action` at least once, if one of the
// minimum-length parses does; ties among optimal parses prefer leftmost-longest
// matches. Returns nothing when no optimal parse contains `new_action`.
std::optional<Program> rewrite_with(const Program& program, const Action& new_action,
                                    const Lexicon& lexicon);

// One program list per scene, indexed by scene id.
struct ProgramTable {
  std::vector<std::vector<Program>> by_scene;

  int scene_count() const { return static_cast<int>(by_scene.size()); }
};

// Keeps the `keep` highest-quality programs per scene; ties prefer shorter
// programs, then earlier insertion.
ProgramTable prune_table(const ProgramTable& table,
                         const std::function<double(const Program&)>& quality, int keep = 3);

}  // namespace pace
