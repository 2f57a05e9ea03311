#include "pace/abstraction.hpp"

#include <algorithm>
#include <map>

namespace pace {

namespace {

// True when `needle` occurs in `prims` at any alignment, up to translation.
bool occurs_in(std::span<const PrimitiveBlock> prims, const PrimSeq& needle) {
  if (needle.empty() || prims.size() < needle.size()) return false;
  for (std::size_t at = 0; at + needle.size() <= prims.size(); ++at) {
    const Offset delta =
        Offset{prims[at].anchor.col, prims[at].anchor.row} - needle.front().offset;
    bool ok = true;
    for (std::size_t k = 0; k < needle.size(); ++k) {
      const PlacedBlock& want = needle[k];
      const PrimitiveBlock& got = prims[at + k];
      if (got.orientation != want.orientation ||
          got.anchor.col != want.offset.dcol + delta.dcol ||
          got.anchor.row != want.offset.drow + delta.drow) {
        ok = false;
        break;
      }
    }
    if (ok) return true;
  }
  return false;
}

Action materialize(const Candidate& cand, const Lexicon& lexicon) {
  return make_abstraction(static_cast<int>(lexicon.size()),
                          "a" + std::to_string(lexicon.size()), cand.expansion, lexicon);
}

}  // namespace

std::vector<Candidate> extract_candidates(std::span<const Program> preferred,
                                          const Lexicon& lexicon, int max_window,
                                          std::span<const int> scene_ids) {
  std::map<PrimSeq, Candidate> merged;
  for (std::size_t pi = 0; pi < preferred.size(); ++pi) {
    const Program& p = preferred[pi];
    const int scene = scene_ids.empty() ? static_cast<int>(pi) : scene_ids[pi];
    const int n = p.length();
    for (int start = 0; start < n; ++start) {
      for (int len = 2; len <= max_window && start + len <= n; ++len) {
        std::vector<PrimitiveBlock> prims;
        for (int k = start; k < start + len; ++k) {
          for (PrimitiveBlock b : flatten_step(p.steps[static_cast<std::size_t>(k)], lexicon)) {
            prims.push_back(b);
          }
        }
        PrimSeq key = normalize_prim_seq(prims);

        auto it = merged.find(key);
        if (it == merged.end()) {
          Candidate cand;
          cand.size = static_cast<int>(key.size());
          cand.key = key;
          Cell base = prims.front().anchor;
          for (const PrimitiveBlock& b : prims) base = std::min(base, b.anchor);
          for (int k = start; k < start + len; ++k) {
            const PlacedAction& step = p.steps[static_cast<std::size_t>(k)];
            cand.expansion.push_back({step.action, step.anchor - base});
          }
          it = merged.emplace(std::move(key), std::move(cand)).first;
        }
        it->second.frequency += 1;
        it->second.sources.insert(scene);
      }
    }
  }

  std::vector<Candidate> out;
  out.reserve(merged.size());
  for (auto& [key, cand] : merged) {
    const bool known = std::any_of(lexicon.begin(), lexicon.end(),
                                   [&](const Action& a) { return a.flat == key; });
    if (!known) out.push_back(std::move(cand));
  }
  return out;
}

double score_candidate(const Candidate& cand, std::span<const Program> preferred,
                       const Lexicon& lexicon) {
  Lexicon extended = lexicon;
  extended.push_back(materialize(cand, lexicon));
  double score = 0.0;
  for (const Program& p : preferred) {
    score -= mdl(p, extended);
  }
  return score;
}

std::optional<Action> select_abstraction(std::span<const Candidate> candidates,
                                         std::span<const Program> preferred,
                                         const Lexicon& lexicon) {
  // Flatten once; candidates only change programs they actually occur in.
  std::vector<std::vector<PrimitiveBlock>> flats;
  flats.reserve(preferred.size());
  std::vector<int> baseline_mdl;
  baseline_mdl.reserve(preferred.size());
  double baseline = 0.0;
  for (const Program& p : preferred) {
    flats.push_back(flatten(p, lexicon));
    baseline_mdl.push_back(mdl_of_prims(flats.back(), lexicon));
    baseline -= baseline_mdl.back();
  }

  const Candidate* best = nullptr;
  double best_score = baseline;
  for (const Candidate& cand : candidates) {
    Lexicon extended = lexicon;
    extended.push_back(materialize(cand, lexicon));
    double score = 0.0;
    for (std::size_t i = 0; i < flats.size(); ++i) {
      if (occurs_in(flats[i], cand.key)) {
        score -= mdl_of_prims(flats[i], extended);
      } else {
        score -= baseline_mdl[i];
      }
    }
    const bool better =
        score > best_score ||
        (best != nullptr && score == best_score &&
         (cand.frequency > best->frequency ||
          (cand.frequency == best->frequency &&
           (cand.size < best->size || (cand.size == best->size && cand.key < best->key)))));
    if (better) {
      best = &cand;
      best_score = score;
    }
  }
  if (best == nullptr) return std::nullopt;
  return materialize(*best, lexicon);
}

ProgramTable apply_abstraction(const ProgramTable& table, const Action& new_action,
                               const Lexicon& lexicon) {
  ProgramTable out = table;
  for (std::vector<Program>& programs : out.by_scene) {
    const std::size_t original_count = programs.size();
    for (std::size_t i = 0; i < original_count; ++i) {
      std::optional<Program> rewritten = rewrite_with(programs[i], new_action, lexicon);
      if (!rewritten) continue;
      if (std::find(programs.begin(), programs.end(), *rewritten) == programs.end()) {
        programs.push_back(std::move(*rewritten));
      }
    }
  }
  return out;
}

}  // namespace pace
