#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ptsym/spectral.hpp"

namespace ptsym {

enum class EventKind { merge, reappear, step_collapse };

std::string to_string(EventKind kind);

struct TrackEvent {
  EventKind kind = EventKind::merge;
  double alpha = 0.0;
  double energy = 0.0;  // pair midpoint used to localize the event, or the last tracked E
  int partner = -1;     // level_index of the partner, -1 if untracked or none
};

struct TrackPoint {
  double alpha = 0.0;
  double energy = 0.0;
};

struct LevelTrack {
  FamilySelector family;
  int level_index = 0;  // 1-based, ascending E at the seed alpha
  std::vector<TrackPoint> points;
  std::vector<TrackEvent> events;
};

struct SweepOptions {
  double alpha_from = 2.0;
  double alpha_to = 1.0;
  double alpha_step = 0.01;
  int levels = 6;
  GridPolicy grid{8.0, 2000, std::nullopt};
  ScanOptions scan{};
  // Energy window; unset bounds are derived from the seed levels.
  std::optional<double> e_min;
  std::optional<double> e_max;
  double min_step = 1e-6;
  int max_refinements = 4;  // halvings tried before a lost pair is declared merged
};

// Number of real roots in the sweep window at one alpha.
struct RootCount {
  double alpha = 0.0;
  std::size_t count = 0;
};

struct SweepResult {
  std::vector<LevelTrack> tracks;
  std::vector<RootCount> counts;
  double e_min = 0.0;
  double e_max = 0.0;
};

// Follows the lowest `levels` real eigenvalues from alpha_from to alpha_to.
// The contour shift is recomputed at every alpha unless the grid policy fixes it.
SweepResult continuation_sweep(const FamilySelector& family, const PotentialParams& params_template,
                               const SweepOptions& options);

// The level that moves around alpha = 1: the highest-index track without a
// merge event, provided every merge paired adjacent levels.
std::optional<int> special_level(const SweepResult& sweep);

}  // namespace ptsym
