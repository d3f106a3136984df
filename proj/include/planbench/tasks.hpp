#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "planbench/error.hpp"
#include "planbench/goal.hpp"
#include "planbench/prompt.hpp"
#include "planbench/rng.hpp"
#include "planbench/world.hpp"

namespace planbench {

enum class Level { placement, novel_task };

inline std::string_view to_string(Level l) { return l == Level::placement ? "placement" : "novel_task"; }

struct TaskSpec {
  int task_num = 0;
  std::string name;
  Level level = Level::placement;
  int one_shot_example = 0;

  friend bool operator==(const TaskSpec&, const TaskSpec&) = default;
};

/// The 15 evaluated tasks. Novel tasks borrow the in-context example of a
/// related placement task.
inline const std::vector<TaskSpec>& catalog() {
  static const std::vector<TaskSpec> tasks = {
      {1, "visual_manipulation", Level::placement, 1},
      {2, "scene_understanding", Level::placement, 2},
      {3, "rotate", Level::placement, 3},
      {4, "rearrange", Level::placement, 4},
      {5, "rearrange_then_restore", Level::placement, 5},
      {6, "novel_adj", Level::placement, 6},
      {7, "novel_noun", Level::placement, 7},
      {10, "follow_motion", Level::novel_task, 5},
      {11, "follow_order", Level::placement, 11},
      {12, "sweep_without_exceeding", Level::placement, 12},
      {13, "sweep_without_touching", Level::novel_task, 12},
      {14, "same_texture", Level::novel_task, 15},
      {15, "same_shape", Level::placement, 15},
      {16, "manipulate_old_neighbor", Level::placement, 16},
      {17, "pick_in_order_then_restore", Level::placement, 17},
  };
  return tasks;
}

inline const TaskSpec& find_task(int task_num) {
  for (const auto& t : catalog())
    if (t.task_num == task_num) return t;
  throw Error("unknown-task(" + std::to_string(task_num) + ")");
}

struct EpisodeSetup {
  TaskSpec task;
  std::uint64_t seed = 0;
  Scene scene;
  MultimodalPrompt prompt;
  Goal goal;

  friend bool operator==(const EpisodeSetup&, const EpisodeSetup&) = default;
};

inline constexpr std::array<std::string_view, 7> kItemShapes = {"block", "ring", "star", "cross",
                                                                 "triangle", "letter-L", "letter-T"};
inline constexpr std::array<std::string_view, 3> kContainerShapes = {"bowl", "pan", "pallet"};
inline constexpr std::array<std::string_view, 10> kTextures = {"red",    "blue",      "green",    "yellow", "purple",
                                                               "orange", "polka-dot", "striped", "wooden", "granite"};

struct GeneratorOptions {
  Affine2 calibration;
};

namespace gen {

inline constexpr double kItemRadius = 0.06;       // item-item centres >= 0.12 apart
inline constexpr double kContainerRadius = 0.14;  // container-item centres >= 0.20 apart
inline constexpr int kMaxAttempts = 100;
inline constexpr int kFirstRefId = 101;

struct Region {
  double x0, x1, y0, y1;
};

inline constexpr Region kItemRegion{0.1, 0.9, 0.1, 0.9};
inline constexpr Region kContainerRegion{0.15, 0.85, 0.15, 0.85};

struct Look {
  std::string shape;
  std::string texture;
  friend bool operator==(const Look&, const Look&) = default;
};

/// Collects objects under provisional indices, places them by rejection
/// sampling and assigns shuffled ids at the end.
class SceneBuilder {
 public:
  using Predicate = std::function<bool(Point)>;

  explicit SceneBuilder(SplitMix64& rng) : rng_(rng) {}

  /// Rejection-samples a centre in `region` keeping `radius` clearance from
  /// every reserved disc; falls back to the grid point with the most clearance.
  Point place(Region region, double radius, const Predicate& extra = {}) {
    auto clearance = [&](Point p) {
      double slack = std::numeric_limits<double>::infinity();
      for (const auto& [q, rq] : reserved_) slack = std::min(slack, distance(p, q) - (radius + rq));
      return slack;
    };
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
      const Point p{rng_.uniform(region.x0, region.x1), rng_.uniform(region.y0, region.y1)};
      if (clearance(p) >= 0.0 && (!extra || extra(p))) return reserve(p, radius);
    }
    constexpr int kGrid = 64;
    std::optional<Point> best;
    double best_slack = -std::numeric_limits<double>::infinity();
    bool best_extra = false;
    for (int iy = 0; iy <= kGrid; ++iy) {
      for (int ix = 0; ix <= kGrid; ++ix) {
        const Point p{region.x0 + (region.x1 - region.x0) * ix / kGrid, region.y0 + (region.y1 - region.y0) * iy / kGrid};
        const bool ok_extra = !extra || extra(p);
        const double slack = clearance(p);
        if (!best || (ok_extra && !best_extra) || (ok_extra == best_extra && slack > best_slack)) {
          best = p;
          best_slack = slack;
          best_extra = ok_extra;
        }
      }
    }
    return reserve(*best, radius);
  }

  Point reserve(Point p, double radius) {
    reserved_.push_back({p, radius});
    return p;
  }

  std::size_t add(SceneObject o) {
    objects_.push_back(std::move(o));
    return objects_.size() - 1;
  }

  std::size_t add_item(const Look& look, double half, Point at) {
    SceneObject o;
    o.kind = ObjectKind::item;
    o.shape = look.shape;
    o.texture = look.texture;
    o.size = {half, half};
    o.position = at;
    o.rotation_deg = normalize_deg(rng_.uniform(0.0, 360.0));
    return add(std::move(o));
  }

  std::size_t add_container(const Look& look, Point at) {
    SceneObject o;
    o.kind = ObjectKind::container;
    o.shape = look.shape;
    o.texture = look.texture;
    o.size = {rng_.uniform(0.08, 0.11), rng_.uniform(0.08, 0.11)};
    o.position = at;
    return add(std::move(o));
  }

  double item_half() { return rng_.uniform(0.03, 0.06); }

  SceneObject& object(std::size_t index) { return objects_.at(index); }
  const SceneObject& object(std::size_t index) const { return objects_.at(index); }
  std::size_t size() const { return objects_.size(); }

  /// Assigns ids 1..n in shuffled order and returns the finished scene.
  Scene finish(std::uint64_t seed, const Affine2& cal) {
    std::vector<int> ids(objects_.size());
    for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<int>(i) + 1;
    rng_.shuffle(ids);
    for (std::size_t i = 0; i < objects_.size(); ++i) objects_[i].id = ids[i];
    ids_ = ids;
    Scene scene;
    scene.objects = objects_;
    std::sort(scene.objects.begin(), scene.objects.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    scene.calibration = cal;
    scene.seed = seed;
    return scene;
  }

  int id(std::size_t index) const { return ids_.at(index); }

 private:
  SplitMix64& rng_;
  std::vector<std::pair<Point, double>> reserved_;
  std::vector<SceneObject> objects_;
  std::vector<int> ids_;
};

/// Draws looks without repeating a (shape, texture) pair.
class LookPicker {
 public:
  explicit LookPicker(SplitMix64& rng) : rng_(rng) {}

  template <std::size_t N>
  Look draw(const std::array<std::string_view, N>& shapes, const std::function<bool(const Look&)>& allow = {}) {
    std::vector<Look> candidates;
    for (auto s : shapes)
      for (auto t : kTextures) {
        Look l{std::string(s), std::string(t)};
        if (std::find(used_.begin(), used_.end(), l) != used_.end()) continue;
        if (allow && !allow(l)) continue;
        candidates.push_back(std::move(l));
      }
    if (candidates.empty()) throw Error("look-space-exhausted");
    Look pick = candidates[rng_.below(candidates.size())];
    used_.push_back(pick);
    return pick;
  }

  void mark(const Look& l) { used_.push_back(l); }

 private:
  SplitMix64& rng_;
  std::vector<Look> used_;
};

inline Look look_of(const SceneObject& o) { return {o.shape, o.texture}; }

/// Prompt-image snapshot of one object: fresh id, centred in its own frame.
inline ObjectRef object_ref(const SceneObject& o, int& next_id) {
  SceneObject copy = o;
  copy.id = next_id++;
  copy.position = {0.5, 0.5};
  return {copy};
}

/// Prompt-image snapshot of a scene: every object gets a fresh id, assigned
/// in shuffled order so ids carry no information about the workspace.
inline SceneRef scene_ref(const Scene& s, int& next_id, SplitMix64& rng) {
  Scene copy = s;
  std::vector<int> ids(copy.objects.size());
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = next_id + static_cast<int>(i);
  next_id += static_cast<int>(ids.size());
  rng.shuffle(ids);
  for (std::size_t i = 0; i < ids.size(); ++i) copy.objects[i].id = ids[i];
  std::sort(copy.objects.begin(), copy.objects.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  return {copy};
}

inline Scene with_position(Scene s, int id, Point p) {
  s.find(id)->position = p;
  return s;
}

inline std::string_view count_word(std::size_t n) {
  static constexpr std::array<std::string_view, 5> words = {"zero", "one", "two", "three", "four"};
  return n < words.size() ? words[n] : "several";
}

struct Draft {
  Scene scene;
  MultimodalPrompt prompt;
  Goal goal;
};

/// Adds `count` ordinary items with unique looks and returns their indices.
inline std::vector<std::size_t> add_items(SceneBuilder& b, LookPicker& looks, int count,
                                          const SceneBuilder::Predicate& extra = {}, Region region = kItemRegion) {
  std::vector<std::size_t> out;
  for (int i = 0; i < count; ++i) {
    const Look look = looks.draw(kItemShapes);
    const Point p = b.place(region, kItemRadius, extra);
    out.push_back(b.add_item(look, b.item_half(), p));
  }
  return out;
}

inline std::size_t add_container(SceneBuilder& b, LookPicker& looks) {
  const Look look = looks.draw(kContainerShapes);
  return b.add_container(look, b.place(kContainerRegion, kContainerRadius));
}

inline Draft visual_manipulation(SplitMix64& rng, std::uint64_t seed, const Affine2& cal) {
  SceneBuilder b(rng);
  LookPicker looks(rng);
  const std::size_t bowl = add_container(b, looks);
  add_container(b, looks);
  const auto items = add_items(b, looks, rng.between(3, 6));
  const std::size_t target = items[rng.below(items.size())];
  Draft d;
  d.scene = b.finish(seed, cal);
  int ref = kFirstRefId;
  d.prompt.segments = {TextSegment{"Put the"}, object_ref(b.object(target), ref), TextSegment{"into the"},
                       object_ref(b.object(bowl), ref), TextSegment{"."}};
  d.goal.final = {InZone{b.id(target), b.id(bowl)}};
  return d;
}

inline Draft scene_understanding(SplitMix64& rng, std::uint64_t seed, const Affine2& cal) {
  SceneBuilder b(rng);
  LookPicker looks(rng);
  std::vector<std::string> used_textures;
  auto unique_texture = [&](const Look& l) {
    return std::find(used_textures.begin(), used_textures.end(), l.texture) == used_textures.end();
  };
  auto draw_unique = [&](const auto& shapes) {
    Look l = looks.draw(shapes, unique_texture);
    used_textures.push_back(l.texture);
    return l;
  };
  std::vector<std::size_t> containers;
  for (int i = 0; i < 2; ++i) containers.push_back(b.add_container(draw_unique(kContainerShapes),
                                                                   b.place(kContainerRegion, kContainerRadius)));
  std::vector<std::size_t> items;
  const int n = rng.between(3, 6);
  for (int i = 0; i < n; ++i)
    items.push_back(b.add_item(draw_unique(kItemShapes), b.item_half(), b.place(kItemRegion, kItemRadius)));
  const std::size_t target = items[rng.below(items.size())];
  const std::size_t base = containers[rng.below(containers.size())];
  Draft d;
  d.scene = b.finish(seed, cal);
  int ref = kFirstRefId;
  d.prompt.segments = {TextSegment{"Put the " + b.object(target).texture + " object in"}, scene_ref(d.scene, ref, rng),
                       TextSegment{"into the " + b.object(base).texture + " object."}};
  d.goal.final = {InZone{b.id(target), b.id(base)}};
  return d;
}

inline Draft rotate(SplitMix64& rng, std::uint64_t seed, const Affine2& cal) {
  SceneBuilder b(rng);
  LookPicker looks(rng);
  const auto items = add_items(b, looks, rng.between(3, 6));
  const std::size_t target = items[rng.below(items.size())];
  const int angle = 30 * rng.between(1, 5);
  const double start = b.object(target).rotation_deg;
  Draft d;
  d.scene = b.finish(seed, cal);
  int ref = kFirstRefId;
  d.prompt.segments = {TextSegment{"Rotate the"}, object_ref(b.object(target), ref),
                       TextSegment{std::to_string(angle) + " degrees."}};
  d.goal.final = {RotationEquals{b.id(target), normalize_deg(start + angle), kRotationToleranceDeg}};
  return d;
}

struct Rearrangement {
  Draft draft;
  std::vector<std::pair<int, Point>> goal_poses;
  std::vector<std::pair<int, Point>> initial_poses;
};

inline Rearrangement rearrange_common(SplitMix64& rng, std::uint64_t seed, const Affine2& cal,
                                      std::string_view lead, std::string_view tail) {
  SceneBuilder b(rng);
  LookPicker looks(rng);
  auto items = add_items(b, looks, rng.between(3, 6));
  rng.shuffle(items);
  const int moved = rng.between(1, std::min<int>(3, static_cast<int>(items.size())));
  std::vector<Point> goals;
  for (int i = 0; i < moved; ++i) goals.push_back(b.place(kItemRegion, kItemRadius));
  Rearrangement r;
  r.draft.scene = b.finish(seed, cal);
  Scene goal_scene = r.draft.scene;
  for (int i = 0; i < moved; ++i) {
    const int id = b.id(items[i]);
    goal_scene = with_position(goal_scene, id, goals[i]);
    r.goal_poses.push_back({id, goals[i]});
    r.initial_poses.push_back({id, b.object(items[i]).position});
  }
  int ref = kFirstRefId;
  r.draft.prompt.segments = {TextSegment{std::string(lead)}, scene_ref(goal_scene, ref, rng),
                             TextSegment{std::string(tail)}};
  return r;
}

inline Draft rearrange(SplitMix64& rng, std::uint64_t seed, const Affine2& cal) {
  auto r = rearrange_common(rng, seed, cal, "Rearrange to this", ".");
  for (const auto& [id, p] : r.goal_poses) r.draft.goal.final.push_back(NearPose{id, p, kNearPoseTolerance});
  return r.draft;
}

inline Draft rearrange_then_restore(SplitMix64& rng, std::uint64_t seed, const Affine2& cal) {
  auto r = rearrange_common(rng, seed, cal, "Rearrange to this", "and then restore.");
  ConstraintSet checkpoint;
  for (const auto& [id, p] : r.goal_poses) checkpoint.push_back(NearPose{id, p, kNearPoseTolerance});
  r.draft.goal.checkpoints.push_back(std::move(checkpoint));
  for (const auto& [id, p] : r.initial_poses) r.draft.goal.final.push_back(NearPose{id, p, kNearPoseTolerance});
  return r.draft;
}

inline constexpr std::array<std::string_view, 6> kNovelAdjectives = {"daxer", "kobar", "wuggier",
                                                                     "zuppier", "feppier", "blickier"};
inline constexpr std::array<std::string_view, 6> kNovelNouns = {"dax", "blicket", "wug", "zup", "fep", "toma"};

inline Draft novel_adj(SplitMix64& rng, std::uint64_t seed, const Affine2& cal) {
  SceneBuilder b(rng);
  LookPicker looks(rng);
  const bool means_bigger = rng.below(2) == 0;
  const std::string adjective(kNovelAdjectives[rng.below(kNovelAdjectives.size())]);
  auto size_pair = [&] {
    const double small = rng.uniform(0.025, 0.03);
    return std::pair{small, small + rng.uniform(0.03, 0.035)};
  };

  const std::size_t bowl = add_container(b, looks);
  add_container(b, looks);
  const Look candidate_look = looks.draw(kItemShapes);
  const auto [small, large] = size_pair();
  const std::size_t a = b.add_item(candidate_look, small, b.place(kItemRegion, kItemRadius));
  const std::size_t c = b.add_item(candidate_look, large, b.place(kItemRegion, kItemRadius));
  add_items(b, looks, rng.between(1, 4));
  const std::size_t target = means_bigger ? c : a;
  const std::size_t other = means_bigger ? a : c;

  // Demonstration objects live only in the prompt.
  auto demo = [&](double half) {
    SceneObject o;
    o.kind = ObjectKind::item;
    const Look l = looks.draw(kItemShapes);
    o.shape = l.shape;
    o.texture = l.texture;
    o.size = {half, half};
    return o;
  };
  Draft d;
  d.scene = b.finish(seed, cal);
  int ref = kFirstRefId;
  auto sentence = [&](std::vector<PromptSegment>& out) {
    const auto [lo, hi] = size_pair();
    const SceneObject big = demo(hi);
    const SceneObject little = demo(lo);
    const SceneObject& first = means_bigger ? big : little;
    const SceneObject& second = means_bigger ? little : big;
    out.push_back(object_ref(first, ref));
    out.push_back(TextSegment{"is " + adjective + " than"});
    out.push_back(object_ref(second, ref));
    out.push_back(TextSegment{"."});
  };
  sentence(d.prompt.segments);
  sentence(d.prompt.segments);
  SceneObject shown = b.object(target);
  shown.size = {0.045, 0.045};
  d.prompt.segments.push_back(TextSegment{"Put the " + adjective});
  d.prompt.segments.push_back(object_ref(shown, ref));
  d.prompt.segments.push_back(TextSegment{"into the"});
  d.prompt.segments.push_back(object_ref(b.object(bowl), ref));
  d.prompt.segments.push_back(TextSegment{"."});
  d.goal.final = {InZone{b.id(target), b.id(bowl)}};
  d.goal.forbidden = {NeverInZone{b.id(other), b.id(bowl)}};
  return d;
}

inline Draft novel_noun(SplitMix64& rng, std::uint64_t seed, const Affine2& cal) {
  SceneBuilder b(rng);
  LookPicker looks(rng);
  const std::size_t bowl = add_container(b, looks);
  add_container(b, looks);
  const auto items = add_items(b, looks, rng.between(3, 6));
  const std::size_t target = items[rng.below(items.size())];
  std::vector<std::string_view> nouns(kNovelNouns.begin(), kNovelNouns.end());
  rng.shuffle(nouns);
  const std::string item_noun(nouns[0]);
  const std::string base_noun(nouns[1]);
  Draft d;
  d.scene = b.finish(seed, cal);
  int ref = kFirstRefId;
  d.prompt.segments = {TextSegment{"This is a " + item_noun}, object_ref(b.object(target), ref),
                       TextSegment{". This is a " + base_noun}, object_ref(b.object(bowl), ref),
                       TextSegment{". Put a " + item_noun + " into a " + base_noun + "."}};
  d.goal.final = {InZone{b.id(target), b.id(bowl)}};
  return d;
}

inline Draft follow_motion(SplitMix64& rng, std::uint64_t seed, const Affine2& cal) {
  SceneBuilder b(rng);
  LookPicker looks(rng);
  const auto items = add_items(b, looks, rng.between(3, 6));
  const std::size_t target = items[rng.below(items.size())];
  std::array<Point, 3> path;
  for (auto& p : path) p = b.place(kItemRegion, kItemRadius);
  Draft d;
  d.scene = b.finish(seed, cal);
  const int id = b.id(target);
  int ref = kFirstRefId;
  d.prompt.segments = {TextSegment{"Follow this motion for"}, object_ref(b.object(target), ref), TextSegment{":"}};
  for (const auto& p : path) {
    d.prompt.segments.push_back(scene_ref(with_position(d.scene, id, p), ref, rng));
    d.goal.checkpoints.push_back({NearPose{id, p, kNearPoseTolerance}});
  }
  d.goal.final = {NearPose{id, path.back(), kNearPoseTolerance}};
  return d;
}

inline Draft follow_order(SplitMix64& rng, std::uint64_t seed, const Affine2& cal) {
  SceneBuilder b(rng);
  LookPicker looks(rng);
  auto items = add_items(b, looks, rng.between(3, 6));
  rng.shuffle(items);
  const std::size_t base = items[0], middle = items[1], top = items[2];
  Draft d;
  d.scene = b.finish(seed, cal);
  const Point anchor = b.object(base).position;
  const Scene frame1 = with_position(d.scene, b.id(middle), anchor);
  const Scene frame2 = with_position(frame1, b.id(top), anchor);
  int ref = kFirstRefId;
  d.prompt.segments = {TextSegment{"Stack objects in this order:"}, scene_ref(frame1, ref, rng),
                       scene_ref(frame2, ref, rng), TextSegment{"."}};
  const StackedOn lower{b.id(middle), b.id(base)};
  const StackedOn upper{b.id(top), b.id(middle)};
  d.goal.checkpoints = {{lower}};
  d.goal.final = {lower, upper};
  return d;
}

/// Sweep tasks keep every item column at least this far from every other so a
/// vertical sweep of one item never drags another.
inline constexpr double kSweepColumnGap = 0.06;

inline Draft sweep_task(SplitMix64& rng, std::uint64_t seed, const Affine2& cal, bool touching) {
  SceneBuilder b(rng);
  LookPicker looks(rng);
  std::vector<double> columns;
  auto column_free = [&](Point p) {
    for (double x : columns)
      if (std::fabs(p.x - x) < kSweepColumnGap) return false;
    return true;
  };

  const double zone_x = rng.uniform(0.35, 0.65);
  const double zone_y = touching ? rng.uniform(0.74, 0.78) : rng.uniform(0.72, 0.76);
  SceneObject zone;
  zone.kind = ObjectKind::zone;
  zone.shape = "pallet";
  zone.texture = std::string(kTextures[rng.below(kTextures.size())]);
  zone.size = {0.25, 0.07};
  zone.position = {zone_x, zone_y};
  const std::size_t zone_index = b.add(zone);

  // Exceeding: the line runs along the far edge of the zone. Touching: a
  // shorter line sits between the items and the middle of the zone.
  SceneObject line;
  line.kind = ObjectKind::line;
  line.shape = "line";
  line.texture = std::string(kTextures[rng.below(kTextures.size())]);
  double x_lo = 0.05, x_hi = 0.95, line_y = zone_y + 0.07 + 0.04;
  if (touching) {
    const double half = rng.uniform(0.05, 0.07);
    x_lo = zone_x - half;
    x_hi = zone_x + half;
    line_y = rng.uniform(0.55, 0.58);
  }
  line.endpoints = std::array<Point, 2>{Point{x_lo, line_y}, Point{x_hi, line_y}};
  line.position = {(x_lo + x_hi) / 2.0, line_y};
  line.size = {std::min(0.25, (x_hi - x_lo) / 2.0), 0.005};
  const std::size_t line_index = b.add(line);

  const Region below{0.1, 0.9, 0.1, touching ? 0.45 : 0.5};
  const Look target_look = looks.draw(kItemShapes);
  const int n_targets = rng.between(1, 3);
  std::vector<std::size_t> targets, distractors;
  auto target_ok = [&](Point p) { return column_free(p) && std::fabs(p.x - zone_x) <= 0.23; };
  // Touching: targets use distinct columns clear of the line on either side.
  std::vector<double> lanes = {zone_x - 0.2, zone_x - 0.12, zone_x + 0.12, zone_x + 0.2};
  rng.shuffle(lanes);
  for (int i = 0; i < n_targets; ++i) {
    Region region = below;
    if (touching) {
      const double lane = lanes[static_cast<std::size_t>(i)] + rng.uniform(-0.01, 0.01);
      region.x0 = region.x1 = lane;
    }
    const Point p = b.place(region, kItemRadius, target_ok);
    columns.push_back(p.x);
    targets.push_back(b.add_item(target_look, b.item_half(), p));
  }
  const int n_distractors = rng.between(std::max(1, 3 - n_targets), 6 - n_targets);
  for (int i = 0; i < n_distractors; ++i) {
    const Look look = looks.draw(kItemShapes, [&](const Look& l) { return !(l.shape == target_look.shape); });
    const Point p = b.place(below, kItemRadius, column_free);
    columns.push_back(p.x);
    distractors.push_back(b.add_item(look, b.item_half(), p));
  }

  Draft d;
  d.scene = b.finish(seed, cal);
  int ref = kFirstRefId;
  const std::string count(count_word(targets.size()));
  d.prompt.segments = {TextSegment{"Sweep " + count}, object_ref(b.object(targets[0]), ref), TextSegment{"into"},
                       object_ref(b.object(zone_index), ref),
                       TextSegment{touching ? "without touching" : "without exceeding"},
                       object_ref(b.object(line_index), ref), TextSegment{"."}};
  for (auto t : targets) d.goal.final.push_back(InZone{b.id(t), b.id(zone_index)});
  d.goal.forbidden.push_back(NoCrossing{b.id(line_index)});
  for (auto x : distractors) d.goal.forbidden.push_back(NeverInZone{b.id(x), b.id(zone_index)});
  return d;
}

inline Draft same_attribute(SplitMix64& rng, std::uint64_t seed, const Affine2& cal, bool by_texture) {
  SceneBuilder b(rng);
  LookPicker looks(rng);
  const Look anchor_look = looks.draw(kContainerShapes);
  const std::size_t anchor = b.add_container(anchor_look, b.place(kContainerRegion, kContainerRadius));
  auto matches = [&](const Look& l) {
    return by_texture ? l.texture == anchor_look.texture : l.shape == anchor_look.shape;
  };
  const int n_match = rng.between(1, 3);
  const int n_other = rng.between(std::max(1, 3 - n_match), 6 - n_match);
  std::vector<std::size_t> matching, others;
  for (int i = 0; i < n_match; ++i) {
    const Look l = by_texture ? looks.draw(kItemShapes, matches) : looks.draw(kContainerShapes, matches);
    matching.push_back(b.add_item(l, b.item_half(), b.place(kItemRegion, kItemRadius)));
  }
  for (int i = 0; i < n_other; ++i) {
    const Look l = looks.draw(kItemShapes, [&](const Look& x) { return !matches(x); });
    others.push_back(b.add_item(l, b.item_half(), b.place(kItemRegion, kItemRadius)));
  }
  Draft d;
  d.scene = b.finish(seed, cal);
  int ref = kFirstRefId;
  d.prompt.segments = {
      TextSegment{by_texture ? "Put all objects with the same texture as" : "Put all objects with the same shape as"},
      object_ref(b.object(anchor), ref), TextSegment{"into it."}};
  for (auto m : matching) d.goal.final.push_back(InZone{b.id(m), b.id(anchor)});
  for (auto o : others) d.goal.forbidden.push_back(NeverInZone{b.id(o), b.id(anchor)});
  return d;
}

inline Draft manipulate_old_neighbor(SplitMix64& rng, std::uint64_t seed, const Affine2& cal) {
  SceneBuilder b(rng);
  LookPicker looks(rng);
  const std::size_t bowl = add_container(b, looks);
  add_container(b, looks);
  const auto items = add_items(b, looks, rng.between(3, 6));
  const std::size_t target = items[rng.below(items.size())];
  Draft d;
  d.scene = b.finish(seed, cal);
  const SceneObject& t = *d.scene.find(b.id(target));
  const SceneObject* neighbour = nullptr;
  for (const auto& o : d.scene.objects) {
    if (o.kind != ObjectKind::item || o.id == t.id) continue;
    if (!neighbour || distance(o.position, t.position) < distance(neighbour->position, t.position)) neighbour = &o;
  }
  int ref = kFirstRefId;
  d.prompt.segments = {TextSegment{"First put"}, object_ref(b.object(target), ref), TextSegment{"into"},
                       object_ref(b.object(bowl), ref),
                       TextSegment{"then put the object that was previously closest to it into the same container."}};
  const InZone first{t.id, b.id(bowl)};
  d.goal.checkpoints = {{first}};
  d.goal.final = {first, InZone{neighbour->id, b.id(bowl)}};
  return d;
}

inline Draft pick_in_order_then_restore(SplitMix64& rng, std::uint64_t seed, const Affine2& cal) {
  SceneBuilder b(rng);
  LookPicker looks(rng);
  const std::size_t home = add_container(b, looks);
  const std::size_t first = add_container(b, looks);
  const std::size_t second = add_container(b, looks);
  const Look target_look = looks.draw(kItemShapes);
  const std::size_t target = b.add_item(target_look, b.item_half(), b.object(home).position);
  add_items(b, looks, rng.between(2, 5));
  Draft d;
  d.scene = b.finish(seed, cal);
  int ref = kFirstRefId;
  d.prompt.segments = {TextSegment{"Put"},
                       object_ref(b.object(target), ref),
                       TextSegment{"into"},
                       object_ref(b.object(first), ref),
                       TextSegment{"then"},
                       object_ref(b.object(second), ref),
                       TextSegment{". Finally restore it into its original container."}};
  const int id = b.id(target);
  d.goal.checkpoints = {{InZone{id, b.id(first)}}, {InZone{id, b.id(second)}}};
  d.goal.final = {InZone{id, b.id(home)}};
  return d;
}

}  // namespace gen

/// Builds the scene, prompt and goal for (task, seed). Deterministic: the same
/// inputs always give an identical EpisodeSetup.
inline EpisodeSetup generate_episode(const TaskSpec& task, std::uint64_t seed, const GeneratorOptions& options = {}) {
  SplitMix64 rng(episode_stream_seed(task.task_num, seed));
  const Affine2& cal = options.calibration;
  gen::Draft d;
  switch (task.task_num) {
    case 1: d = gen::visual_manipulation(rng, seed, cal); break;
    case 2: d = gen::scene_understanding(rng, seed, cal); break;
    case 3: d = gen::rotate(rng, seed, cal); break;
    case 4: d = gen::rearrange(rng, seed, cal); break;
    case 5: d = gen::rearrange_then_restore(rng, seed, cal); break;
    case 6: d = gen::novel_adj(rng, seed, cal); break;
    case 7: d = gen::novel_noun(rng, seed, cal); break;
    case 10: d = gen::follow_motion(rng, seed, cal); break;
    case 11: d = gen::follow_order(rng, seed, cal); break;
    case 12: d = gen::sweep_task(rng, seed, cal, false); break;
    case 13: d = gen::sweep_task(rng, seed, cal, true); break;
    case 14: d = gen::same_attribute(rng, seed, cal, true); break;
    case 15: d = gen::same_attribute(rng, seed, cal, false); break;
    case 16: d = gen::manipulate_old_neighbor(rng, seed, cal); break;
    case 17: d = gen::pick_in_order_then_restore(rng, seed, cal); break;
    default: throw Error("unknown-task(" + std::to_string(task.task_num) + ")");
  }
  return {task, seed, std::move(d.scene), std::move(d.prompt), std::move(d.goal)};
}

}  // namespace planbench
