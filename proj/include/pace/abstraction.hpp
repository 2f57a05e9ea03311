// Candidate mining over preferred programs and posterior-scored selection of
// the next abstraction.
#pragma once

#include <optional>
#include <set>
#include <span>
#include <vector>

#include "pace/symlang.hpp"

namespace pace {

struct Candidate {
  PrimSeq key;                          // translation-normalized flattened window
  std::vector<ExpansionStep> expansion; // as first extracted, anchored at the key origin
  int size = 0;                         // primitive blocks
  int frequency = 0;                    // occurrences across preferred programs
  std::set<int> sources;                // scene ids the window was seen in
};

// All contiguous action windows of length 2..max_window across the preferred
// programs, merged by key; windows that flatten to an existing lexicon action
// are dropped. `scene_ids` labels each program (defaults to its index).
std::vector<Candidate> extract_candidates(std::span<const Program> preferred,
                                          const Lexicon& lexicon, int max_window = 6,
                                          std::span<const int> scene_ids = {});

// Log-posterior of the lexicon extended with `cand`: -sum_i mdl(p_i | lexicon + cand).
double score_candidate(const Candidate& cand, std::span<const Program> preferred,
                       const Lexicon& lexicon);

// Best-scoring candidate materialized with the next id, or nothing when no
// candidate strictly improves on the current lexicon. Ties prefer higher
// frequency, then fewer blocks, then the lexicographically smaller key.
std::optional<Action> select_abstraction(std::span<const Candidate> candidates,
                                         std::span<const Program> preferred,
                                         const Lexicon& lexicon);

// Appends, per scene, the rewrite of every program that an optimal parse with
// `new_action` shortens; originals are kept.
ProgramTable apply_abstraction(const ProgramTable& table, const Action& new_action,
                               const Lexicon& lexicon);

}  // namespace pace
