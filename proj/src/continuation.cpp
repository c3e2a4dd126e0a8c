#include "ptsym/continuation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ptsym/errors.hpp"

namespace ptsym {

namespace {

struct TrackState {
  bool active = true;
  std::size_t segment_start = 0;  // first point of the current real segment
};

double prediction(const LevelTrack& t, const TrackState& s, double alpha) {
  const auto& pts = t.points;
  const double e = pts.back().energy;
  if (pts.size() - s.segment_start < 2) return e;
  const TrackPoint& a = pts[pts.size() - 2];
  const TrackPoint& b = pts.back();
  if (a.alpha == b.alpha) return e;
  return b.energy + (b.energy - a.energy) * (alpha - b.alpha) / (b.alpha - a.alpha);
}

// Half the distance from e to its nearest neighbour among roots.
double half_gap(double e, const std::vector<double>& roots) {
  double gap = std::numeric_limits<double>::infinity();
  for (double r : roots) {
    const double d = std::abs(r - e);
    if (d > 1e-12 * std::max(1.0, std::abs(e))) gap = std::min(gap, d);
  }
  return std::isfinite(gap) ? 0.5 * gap : 1.0;
}

// Greedy nearest assignment of roots to predictions within per-track caps.
std::vector<int> assign(const std::vector<double>& roots, const std::vector<double>& preds,
                        const std::vector<double>& caps) {
  struct Candidate {
    double dist;
    std::size_t track;
    std::size_t root;
  };
  std::vector<Candidate> cands;
  for (std::size_t t = 0; t < preds.size(); ++t) {
    for (std::size_t r = 0; r < roots.size(); ++r) {
      const double d = std::abs(roots[r] - preds[t]);
      if (d <= caps[t]) cands.push_back({d, t, r});
    }
  }
  std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) { return a.dist < b.dist; });
  std::vector<int> out(preds.size(), -1);
  std::vector<bool> used(roots.size(), false);
  for (const Candidate& c : cands) {
    if (out[c.track] >= 0 || used[c.root]) continue;
    out[c.track] = static_cast<int>(c.root);
    used[c.root] = true;
  }
  return out;
}

void merge_roots(std::vector<double>& roots, const std::vector<double>& extra) {
  for (double e : extra) {
    const bool known = std::any_of(roots.begin(), roots.end(), [&](double r) {
      return std::abs(r - e) <= 1e-9 * std::max(1.0, std::abs(e));
    });
    if (!known) roots.push_back(e);
  }
  std::sort(roots.begin(), roots.end());
}

}  // namespace

std::string to_string(EventKind kind) {
  switch (kind) {
    case EventKind::merge:
      return "merge";
    case EventKind::reappear:
      return "reappear";
    case EventKind::step_collapse:
      return "step_collapse";
  }
  return "unknown";
}

SweepResult continuation_sweep(const FamilySelector& family, const PotentialParams& params_template,
                               const SweepOptions& options) {
  family.validate();
  if (!(options.alpha_step > 0.0)) throw DomainError("alpha step must be positive");
  if (options.levels < 1) throw DomainError("at least one level must be tracked");
  if (!(options.min_step > 0.0)) throw DomainError("minimum step must be positive");
  if (options.alpha_from == options.alpha_to) throw DomainError("sweep range is empty");

  PotentialParams params = params_template;
  auto op_at = [&](double alpha) {
    params.alpha = alpha;
    params.validate();
    return operator_for(params, family, options.grid);
  };

  SweepResult result;
  result.e_min = options.e_min.value_or(-5.0);
  double e_max = options.e_max.value_or(10.0);
  auto seed_op = op_at(options.alpha_from);
  auto seeds = find_real_eigenvalues(seed_op, result.e_min, e_max, options.scan);
  while (!options.e_max && static_cast<int>(seeds.size()) < options.levels && e_max < 2000.0) {
    e_max *= 2.0;
    seeds = find_real_eigenvalues(seed_op, result.e_min, e_max, options.scan);
  }
  if (static_cast<int>(seeds.size()) < options.levels) {
    throw NumericalError("only " + std::to_string(seeds.size()) + " real levels at the seed alpha");
  }
  if (!options.e_max) {
    const double top = seeds[static_cast<std::size_t>(options.levels) - 1];
    e_max = top + std::max(5.0, 0.5 * std::abs(top));
    seeds = find_real_eigenvalues(seed_op, result.e_min, e_max, options.scan);
  }
  result.e_max = e_max;

  auto& tracks = result.tracks;
  std::vector<TrackState> states(static_cast<std::size_t>(options.levels));
  for (int i = 0; i < options.levels; ++i) {
    LevelTrack t;
    t.family = family;
    t.level_index = i + 1;
    t.points.push_back({options.alpha_from, seeds[static_cast<std::size_t>(i)]});
    tracks.push_back(std::move(t));
  }
  result.counts.push_back({options.alpha_from, seeds.size()});

  const double dir = options.alpha_to > options.alpha_from ? 1.0 : -1.0;
  const double fine_step = std::max(options.scan.scan_step / 20.0, 1e-4);
  std::vector<double> prev_roots = seeds;
  std::vector<double> prev_free;
  std::vector<std::pair<int, int>> outstanding;  // merged pairs, 0-based track ids
  double alpha = options.alpha_from;
  double h = options.alpha_step;
  int refinements = 0;

  auto localize = [&](double e_mid, double a0, double a1) {
    for (int k = 1; k <= 8; k *= 2) {
      const double lo = a0;
      const double hi = a0 + (a1 - a0) * k;
      if (dir * (hi - options.alpha_to) > 0.0 && k > 1) break;
      try {
        return solve_alpha_for_energy(params_template, family, options.grid, e_mid, {lo, hi}, 1e-8);
      } catch (const NumericalError&) {
      }
    }
    return 0.5 * (a0 + a1);
  };

  while (dir * (options.alpha_to - alpha) > 1e-12) {
    h = std::min(h, std::abs(options.alpha_to - alpha));
    const double a_new = alpha + dir * h;
    const auto op = op_at(a_new);

    std::vector<std::size_t> active;
    for (std::size_t i = 0; i < tracks.size(); ++i)
      if (states[i].active) active.push_back(i);
    std::sort(active.begin(), active.end(),
              [&](std::size_t a, std::size_t b) { return tracks[a].points.back().energy < tracks[b].points.back().energy; });

    std::vector<double> preds, caps;
    double hi_needed = e_max;
    for (std::size_t i : active) {
      const double last = tracks[i].points.back().energy;
      const double p = prediction(tracks[i], states[i], a_new);
      preds.push_back(p);
      caps.push_back(half_gap(last, prev_roots) + std::abs(p - last));
      hi_needed = std::max(hi_needed, p + caps.back() + 1.0);
    }
    std::vector<double> roots = find_real_eigenvalues(op, result.e_min, hi_needed, options.scan);
    auto match = assign(roots, preds, caps);
    bool refined = false;
    for (std::size_t k = 0; k < active.size(); ++k) {
      if (match[k] >= 0) continue;
      const double lo = std::max(result.e_min, preds[k] - caps[k]);
      const double hi = std::min(hi_needed, preds[k] + caps[k]);
      if (lo < hi) {
        ScanOptions fine = options.scan;
        fine.scan_step = fine_step;
        merge_roots(roots, find_real_eigenvalues(op, lo, hi, fine));
        refined = true;
      }
    }
    if (refined) match = assign(roots, preds, caps);

    std::vector<std::size_t> lost;
    for (std::size_t k = 0; k < active.size(); ++k)
      if (match[k] < 0) lost.push_back(k);

    std::vector<bool> root_used(roots.size(), false);
    for (std::size_t k = 0; k < active.size(); ++k)
      if (match[k] >= 0) root_used[static_cast<std::size_t>(match[k])] = true;
    std::vector<double> free;
    for (std::size_t r = 0; r < roots.size(); ++r)
      if (!root_used[r]) free.push_back(roots[r]);

    // Untracked roots of the previous step that have no successor now.
    std::vector<double> vanished;
    std::vector<bool> seen(free.size(), false);
    {
      auto m = assign(free, prev_free, std::vector<double>(prev_free.size(), 0.25));
      for (std::size_t j = 0; j < m.size(); ++j) {
        if (m[j] >= 0) {
          seen[static_cast<std::size_t>(m[j])] = true;
        } else {
          vanished.push_back(prev_free[j]);
        }
      }
    }

    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    std::vector<std::size_t> singles;
    for (std::size_t j = 0; j < lost.size(); ++j) {
      if (j + 1 < lost.size() && lost[j + 1] == lost[j] + 1) {
        pairs.push_back({lost[j], lost[j + 1]});
        ++j;
      } else {
        singles.push_back(lost[j]);
      }
    }
    // A lone lost track whose nearest untracked neighbour vanished with it
    // merged with a level outside the tracked set.
    struct HalfPair {
      std::size_t k;
      double partner_e;
    };
    std::vector<HalfPair> half_pairs;
    std::vector<std::size_t> unexplained;
    for (std::size_t k : singles) {
      const double e = tracks[active[k]].points.back().energy;
      std::optional<double> partner;
      for (double v : vanished) {
        bool blocked = false;
        for (std::size_t i : active)
          if (const double o = tracks[i].points.back().energy; (o - e) * (o - v) < 0.0) blocked = true;
        for (double r : prev_free)
          if ((r - e) * (r - v) < 0.0) blocked = true;
        if (!blocked && (!partner || std::abs(v - e) < std::abs(*partner - e))) partner = v;
      }
      if (partner) {
        half_pairs.push_back({k, *partner});
        std::erase(vanished, *partner);
      } else {
        unexplained.push_back(k);
      }
    }
    if (!lost.empty()) {
      const bool can_halve = h / 2.0 >= options.min_step;
      if (can_halve && (refinements < options.max_refinements || !unexplained.empty())) {
        h /= 2.0;
        ++refinements;
        continue;
      }
    }

    // Accept the step.
    for (std::size_t k = 0; k < active.size(); ++k) {
      if (match[k] < 0) continue;
      tracks[active[k]].points.push_back({a_new, roots[static_cast<std::size_t>(match[k])]});
    }
    for (const auto& [ka, kb] : pairs) {
      const std::size_t ta = active[ka], tb = active[kb];
      const double e_mid = 0.5 * (tracks[ta].points.back().energy + tracks[tb].points.back().energy);
      const double a_star = localize(e_mid, alpha, a_new);
      tracks[ta].events.push_back({EventKind::merge, a_star, e_mid, tracks[tb].level_index});
      tracks[tb].events.push_back({EventKind::merge, a_star, e_mid, tracks[ta].level_index});
      states[ta].active = states[tb].active = false;
      outstanding.push_back({static_cast<int>(ta), static_cast<int>(tb)});
    }
    for (const auto& hp : half_pairs) {
      const std::size_t t = active[hp.k];
      const double e = tracks[t].points.back().energy;
      const double e_mid = 0.5 * (e + hp.partner_e);
      const double a_star = localize(e_mid, alpha, a_new);
      tracks[t].events.push_back({EventKind::merge, a_star, e_mid, -1});
      states[t].active = false;
      if (hp.partner_e > e) {
        outstanding.push_back({static_cast<int>(t), -1});
      } else {
        outstanding.push_back({-1, static_cast<int>(t)});
      }
    }
    for (std::size_t k : unexplained) {
      const std::size_t t = active[k];
      tracks[t].events.push_back({EventKind::step_collapse, a_new, tracks[t].points.back().energy, -1});
      states[t].active = false;
    }
    auto pair_key = [](const std::pair<int, int>& p) { return p.first >= 0 ? p.first : p.second; };
    std::sort(outstanding.begin(), outstanding.end(),
              [&](const auto& x, const auto& y) { return pair_key(x) < pair_key(y); });

    // Newly born untracked roots; a pair of them is a return to the real axis.
    std::vector<double> born;
    for (std::size_t r = 0; r < free.size(); ++r)
      if (!seen[r] && free[r] <= e_max) born.push_back(free[r]);
    std::vector<double> still_free;
    for (double r : free)
      if (r <= e_max) still_free.push_back(r);
    for (std::size_t j = 0; j + 1 < born.size() && !outstanding.empty(); j += 2) {
      const auto [ta, tb] = outstanding.front();
      outstanding.erase(outstanding.begin());
      const double e_mid = 0.5 * (born[j] + born[j + 1]);
      const double a_back = localize(e_mid, a_new, alpha);
      const int ia = ta >= 0 ? tracks[static_cast<std::size_t>(ta)].level_index : -1;
      const int ib = tb >= 0 ? tracks[static_cast<std::size_t>(tb)].level_index : -1;
      const std::pair<int, double> members[2] = {{ta, born[j]}, {tb, born[j + 1]}};
      for (const auto& [t, e] : members) {
        if (t < 0) continue;
        auto& tr = tracks[static_cast<std::size_t>(t)];
        tr.events.push_back({EventKind::reappear, a_back, e_mid, tr.level_index == ia ? ib : ia});
        states[static_cast<std::size_t>(t)] = {true, tr.points.size()};
        tr.points.push_back({a_new, e});
        std::erase(still_free, e);
      }
    }

    std::size_t in_window = 0;
    for (double r : roots)
      if (r >= result.e_min && r <= e_max) ++in_window;
    result.counts.push_back({a_new, in_window});
    prev_roots = roots;
    prev_free = still_free;
    alpha = a_new;
    h = options.alpha_step;
    refinements = 0;
  }
  return result;
}

std::optional<int> special_level(const SweepResult& sweep) {
  std::vector<const LevelTrack*> tracks;
  for (const auto& t : sweep.tracks) tracks.push_back(&t);
  std::sort(tracks.begin(), tracks.end(),
            [](const LevelTrack* a, const LevelTrack* b) { return a->level_index < b->level_index; });
  auto merged = [](const LevelTrack& t) -> const TrackEvent* {
    for (const auto& e : t.events)
      if (e.kind == EventKind::merge) return &e;
    return nullptr;
  };
  std::optional<int> candidate;
  for (const LevelTrack* t : tracks) {
    const TrackEvent* e = merged(*t);
    if (!e) {
      candidate = t->level_index;
    } else if (e->partner >= 0 && std::abs(e->partner - t->level_index) != 1) {
      return std::nullopt;
    }
  }
  return candidate;
}

}  // namespace ptsym
