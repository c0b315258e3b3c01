#include "mmc/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <utility>

#include "mmc/error.hpp"

namespace mmc::kernels {

namespace {

constexpr std::size_t kMinTasks = 64;

std::size_t saturating_mul(std::size_t a, std::size_t b) {
  std::size_t out = 0;
  if (__builtin_mul_overflow(a, b, &out)) return std::numeric_limits<std::size_t>::max();
  return out;
}

std::size_t saturating_add(std::size_t a, std::size_t b) {
  std::size_t out = 0;
  if (__builtin_add_overflow(a, b, &out)) return std::numeric_limits<std::size_t>::max();
  return out;
}

// A partially expanded clone: enough to continue a depth-first walk.
struct Task {
  TypeId root;
  std::vector<int> word;
  TypeId type;
  double scale = 1.0;
  PlanarSimilarity placement;
  int remaining = 0;
};

Task task_for(const CloneStructure& s, const CloneAddress& a, int k, bool with_placement) {
  Task t{a.root(), a.word(), a.type(s), a.cumulative_inverse_scale(s).value, PlanarSimilarity::identity(), k};
  if (with_placement) {
    for (int id : a.word()) t.placement = t.placement.compose(*s.clone(id).placement);
  }
  return t;
}

Task descend(const CloneStructure& s, const Task& t, int id, bool with_placement) {
  const auto& c = s.clone(id);
  Task child{t.root, t.word, c.target, t.scale * c.inverse_scale.value, t.placement, t.remaining - 1};
  child.word.push_back(id);
  if (with_placement) child.placement = t.placement.compose(*c.placement);
  return child;
}

// Expand tasks breadth-wise, preserving depth-first order, until there are
// enough of them or none can be expanded. Depends only on the structure.
std::vector<Task> split_tasks(const CloneStructure& s, std::vector<Task> tasks, bool with_placement) {
  while (tasks.size() < kMinTasks) {
    if (std::ranges::none_of(tasks, [](const Task& t) { return t.remaining > 0; })) break;
    std::vector<Task> next;
    for (const auto& t : tasks) {
      if (t.remaining == 0) {
        next.push_back(t);
        continue;
      }
      for (int id : s.clones_in(t.type)) next.push_back(descend(s, t, id, with_placement));
    }
    tasks = std::move(next);
  }
  return tasks;
}

void accumulate_quantities(const CloneStructure& s, TypeId type, double scale, int remaining, double d,
                           Eigen::VectorXd& out) {
  if (remaining == 0) {
    const double diam = scale * s.model(type).diameter.value;
    out(static_cast<Eigen::Index>(type.slot())) += std::pow(diam, d);
    return;
  }
  for (int id : s.clones_in(type)) {
    const auto& c = s.clone(id);
    accumulate_quantities(s, c.target, scale * c.inverse_scale.value, remaining - 1, d, out);
  }
}

}  // namespace

std::size_t subdivision_count(const CloneStructure& s, std::span<const CloneAddress> coll, int k) {
  const auto n = static_cast<std::size_t>(s.model_count());
  // ways[t] = number of level-step descendants of type t per starting type.
  std::size_t total = 0;
  for (const auto& a : coll) {
    std::vector<std::size_t> v(n, 0);
    v[a.type(s).slot()] = 1;
    for (int step = 0; step < k; ++step) {
      std::vector<std::size_t> next(n, 0);
      for (std::size_t j = 0; j < n; ++j) {
        if (v[j] == 0) continue;
        for (std::size_t i = 0; i < n; ++i) {
          const auto r = static_cast<std::size_t>(s.counts()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
          next[i] = saturating_add(next[i], saturating_mul(r, v[j]));
        }
      }
      v = std::move(next);
    }
    for (auto c : v) total = saturating_add(total, c);
  }
  return total;
}

Eigen::VectorXd level_quantities_serial(const CloneStructure& s, std::span<const CloneAddress> coll,
                                        double d, int k) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(s.model_count());
  for (const auto& a : coll) {
    accumulate_quantities(s, a.type(s), a.cumulative_inverse_scale(s).value, k, d, out);
  }
  return out;
}

Eigen::VectorXd level_quantities_parallel(const CloneStructure& s, std::span<const CloneAddress> coll,
                                          double d, int k) {
  std::vector<Task> seeds;
  for (const auto& a : coll) seeds.push_back(task_for(s, a, k, false));
  const std::vector<Task> tasks = split_tasks(s, std::move(seeds), false);

  const auto n = s.model_count();
  std::vector<Eigen::VectorXd> partial(tasks.size(), Eigen::VectorXd::Zero(n));
  const auto count = static_cast<long>(tasks.size());
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < count; ++i) {
    const auto& t = tasks[static_cast<std::size_t>(i)];
    accumulate_quantities(s, t.type, t.scale, t.remaining, d, partial[static_cast<std::size_t>(i)]);
  }
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  for (const auto& p : partial) out += p;
  return out;
}

std::vector<PowerSum> level_quantities_exact(const CloneStructure& s, std::span<const CloneAddress> coll,
                                             int k) {
  if (!s.is_exact()) throw ValidationError("exact enumeration needs rational scales and diameters");
  std::vector<PowerSum> out(static_cast<std::size_t>(s.model_count()));
  std::function<void(TypeId, const Rational&, int)> walk = [&](TypeId type, const Rational& scale,
                                                              int remaining) {
    if (remaining == 0) {
      out[type.slot()] += PowerSum::term(scale * *s.model(type).diameter.exact);
      return;
    }
    for (int id : s.clones_in(type)) {
      const auto& c = s.clone(id);
      walk(c.target, scale * *c.inverse_scale.exact, remaining - 1);
    }
  };
  for (const auto& a : coll) walk(a.type(s), *a.cumulative_inverse_scale(s).exact, k);
  return out;
}

CloneAddress PointCloud::address(std::size_t i) const {
  auto w = word(i);
  return CloneAddress(TypeId(roots[i]), std::vector<int>(w.begin(), w.end()));
}

SamplingFrame sampling_frame(const CloneStructure& s, SampleMode mode) {
  if (!s.has_embedding()) throw ValidationError("structure has no planar embedding");
  const auto n = static_cast<std::size_t>(s.model_count());
  SamplingFrame f;
  for (const auto& m : s.models()) {
    f.base.push_back(m.region->center);
    f.reach.push_back(m.region->radius);
  }
  if (mode == SampleMode::DiscCenter) return f;

  // anchor_t = placement(first(t)) applied to anchor_{target(first(t))}: a
  // fixed point of contractions, hence a point of the Cantor set.
  std::vector<Point> x = f.base;
  for (int it = 0; it < 10000; ++it) {
    std::vector<Point> next(n);
    double change = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      const auto& c = s.clone(s.clones_in(TypeId(static_cast<int>(t) + 1)).front());
      next[t] = c.placement->apply(x[c.target.slot()]);
      change = std::max(change, distance(next[t], x[t]));
    }
    x = std::move(next);
    if (change == 0.0) break;
  }
  for (std::size_t t = 0; t < n; ++t) {
    f.reach[t] = distance(x[t], f.base[t]) + f.reach[t];
    f.base[t] = x[t];
  }
  return f;
}

namespace {

void emit_points(const CloneStructure& s, const SamplingFrame& frame, const Task& t, PointCloud& out) {
  if (t.remaining == 0) {
    out.points.push_back(t.placement.apply(frame.base[t.type.slot()]));
    out.roots.push_back(t.root.value());
    out.words.insert(out.words.end(), t.word.begin(), t.word.end());
    out.reach.push_back(t.scale * frame.reach[t.type.slot()]);
    return;
  }
  for (int id : s.clones_in(t.type)) emit_points(s, frame, descend(s, t, id, true), out);
}

PointCloud empty_cloud(int level, SampleMode mode) {
  if (level < 0 || level > 24) throw ComputeError("sampling level must be in 0..24");
  PointCloud c;
  c.level = level;
  c.mode = mode;
  return c;
}

void finish_cloud(PointCloud& c) {
  c.error_radius = c.reach.empty() ? 0.0 : *std::ranges::max_element(c.reach);
}

}  // namespace

PointCloud sample_serial(const CloneStructure& s, int level, SampleMode mode) {
  PointCloud out = empty_cloud(level, mode);
  const SamplingFrame frame = sampling_frame(s, mode);
  for (const auto& a : model_collection(s)) emit_points(s, frame, task_for(s, a, level, true), out);
  finish_cloud(out);
  return out;
}

PointCloud sample_parallel(const CloneStructure& s, int level, SampleMode mode) {
  PointCloud out = empty_cloud(level, mode);
  const SamplingFrame frame = sampling_frame(s, mode);
  std::vector<Task> seeds;
  for (const auto& a : model_collection(s)) seeds.push_back(task_for(s, a, level, true));
  const std::vector<Task> tasks = split_tasks(s, std::move(seeds), true);

  std::vector<PointCloud> parts(tasks.size(), out);
  const auto count = static_cast<long>(tasks.size());
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < count; ++i) {
    emit_points(s, frame, tasks[static_cast<std::size_t>(i)], parts[static_cast<std::size_t>(i)]);
  }
  for (auto& p : parts) {
    out.points.insert(out.points.end(), p.points.begin(), p.points.end());
    out.roots.insert(out.roots.end(), p.roots.begin(), p.roots.end());
    out.words.insert(out.words.end(), p.words.begin(), p.words.end());
    out.reach.insert(out.reach.end(), p.reach.begin(), p.reach.end());
  }
  finish_cloud(out);
  return out;
}

namespace {

// Position of the first difference between the (root, word) keys of two
// samples: 0 for different models, t for word index t - 1.
int divergence(const PointCloud& c, std::size_t p, std::size_t q) {
  if (c.roots[p] != c.roots[q]) return 0;
  auto wp = c.word(p), wq = c.word(q);
  for (int t = 0; t < c.level; ++t) {
    if (wp[static_cast<std::size_t>(t)] != wq[static_cast<std::size_t>(t)]) return t + 1;
  }
  return c.level + 1;
}

struct CloneRange {
  std::size_t begin = 0;
  std::size_t end = 0;
  int level = 0;
};

// Clones of levels 0..max_level as contiguous ranges, pre-order.
std::vector<CloneRange> clone_ranges(const PointCloud& c, int max_level) {
  std::vector<CloneRange> out;
  std::function<void(std::size_t, std::size_t, int)> visit = [&](std::size_t b, std::size_t e, int m) {
    out.push_back({b, e, m});
    if (m == max_level) return;
    std::size_t start = b;
    for (std::size_t i = b + 1; i <= e; ++i) {
      if (i == e || c.word(i)[static_cast<std::size_t>(m)] != c.word(start)[static_cast<std::size_t>(m)]) {
        visit(start, i, m + 1);
        start = i;
      }
    }
  };
  std::size_t start = 0;
  for (std::size_t i = 1; i <= c.size(); ++i) {
    if (i == c.size() || c.roots[i] != c.roots[start]) {
      visit(start, i, 0);
      start = i;
    }
  }
  return out;
}

CloneAddress range_address(const PointCloud& c, const CloneRange& r) {
  auto w = c.word(r.begin);
  return CloneAddress(TypeId(c.roots[r.begin]),
                      std::vector<int>(w.begin(), w.begin() + r.level));
}

void check_levels(const PointCloud& c, int clone_level) {
  if (clone_level < 0 || clone_level > c.level) {
    throw ValidationError("clone level must lie in 0..sampling level");
  }
}

}  // namespace

std::vector<ClonePointSeparation> separation_brute_force(const CloneStructure& s, const PointCloud& cloud,
                                                         int clone_level) {
  (void)s;
  check_levels(cloud, clone_level);
  const std::size_t n = cloud.size();
  const std::size_t width = static_cast<std::size_t>(cloud.level) + 2;
  const double inf = std::numeric_limits<double>::infinity();
  // nearest[p * width + t]: closest sample that first differs from p at t.
  std::vector<double> nearest(n * width, inf);
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = 0; q < n; ++q) {
      if (p == q) continue;
      const auto t = static_cast<std::size_t>(divergence(cloud, p, q));
      auto& slot = nearest[p * width + t];
      slot = std::min(slot, distance(cloud.points[p], cloud.points[q]));
    }
  }
  std::vector<ClonePointSeparation> out;
  for (const auto& r : clone_ranges(cloud, clone_level)) {
    double best = inf;
    for (std::size_t p = r.begin; p < r.end; ++p) {
      for (int t = 0; t <= r.level; ++t) best = std::min(best, nearest[p * width + static_cast<std::size_t>(t)]);
    }
    out.push_back({range_address(cloud, r), best});
  }
  return out;
}

namespace {

struct Node {
  std::size_t begin = 0;
  std::size_t end = 0;
  int level = 0;
  int parent = -1;
  Point center;
  double radius = 0.0;
  std::vector<int> children;
};

// Clone tree over the samples with bounding discs computed bottom-up from
// the samples themselves. Node 0 is a virtual root over the models.
std::vector<Node> build_tree(const PointCloud& c) {
  std::vector<Node> nodes(1);
  nodes[0].begin = 0;
  nodes[0].end = c.size();
  nodes[0].level = -1;
  std::function<int(std::size_t, std::size_t, int, int)> build = [&](std::size_t b, std::size_t e, int m,
                                                                     int parent) {
    const int id = static_cast<int>(nodes.size());
    nodes.push_back({b, e, m, parent, {}, 0.0, {}});
    if (m == c.level) {
      nodes[static_cast<std::size_t>(id)].center = c.points[b];
      return id;
    }
    std::vector<int> kids;
    std::size_t start = b;
    for (std::size_t i = b + 1; i <= e; ++i) {
      if (i == e || c.word(i)[static_cast<std::size_t>(m)] != c.word(start)[static_cast<std::size_t>(m)]) {
        kids.push_back(build(start, i, m + 1, id));
        start = i;
      }
    }
    Point centre{};
    for (int k : kids) centre = centre + nodes[static_cast<std::size_t>(k)].center;
    centre = (1.0 / static_cast<double>(kids.size())) * centre;
    double radius = 0.0;
    for (int k : kids) {
      const auto& kn = nodes[static_cast<std::size_t>(k)];
      radius = std::max(radius, distance(centre, kn.center) + kn.radius);
    }
    auto& self = nodes[static_cast<std::size_t>(id)];
    self.center = centre;
    self.radius = radius * (1.0 + 1e-12) + 1e-300;
    self.children = std::move(kids);
    return id;
  };
  std::size_t start = 0;
  for (std::size_t i = 1; i <= c.size(); ++i) {
    if (i == c.size() || c.roots[i] != c.roots[start]) {
      const int child = build(start, i, 0, 0);
      nodes[0].children.push_back(child);
      start = i;
    }
  }
  return nodes;
}

double min_distance(const std::vector<Node>& nodes, const PointCloud& c, int x, int y, double best) {
  const auto& nx = nodes[static_cast<std::size_t>(x)];
  const auto& ny = nodes[static_cast<std::size_t>(y)];
  const double lower = distance(nx.center, ny.center) - nx.radius - ny.radius;
  if (lower > best) return best;
  const bool x_leaf = nx.children.empty();
  const bool y_leaf = ny.children.empty();
  if (x_leaf && y_leaf) return std::min(best, distance(c.points[nx.begin], c.points[ny.begin]));
  const bool split_y = !y_leaf && (x_leaf || ny.radius >= nx.radius);
  const auto& kids = split_y ? ny.children : nx.children;
  const Point other = split_y ? nx.center : ny.center;
  std::vector<std::pair<double, int>> order;
  for (int k : kids) order.emplace_back(distance(nodes[static_cast<std::size_t>(k)].center, other), k);
  std::ranges::sort(order);
  for (const auto& [dist, k] : order) {
    best = split_y ? min_distance(nodes, c, x, k, best) : min_distance(nodes, c, k, y, best);
  }
  return best;
}

}  // namespace

std::vector<ClonePointSeparation> separation_tree(const CloneStructure& s, const PointCloud& cloud,
                                                  int clone_level) {
  (void)s;
  check_levels(cloud, clone_level);
  const std::vector<Node> nodes = build_tree(cloud);
  std::vector<int> queries;
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    if (nodes[i].level <= clone_level) queries.push_back(static_cast<int>(i));
  }
  // build_tree numbers nodes in pre-order, matching clone_ranges.
  std::vector<ClonePointSeparation> out(queries.size());
  const auto count = static_cast<long>(queries.size());
#pragma omp parallel for schedule(dynamic)
  for (long qi = 0; qi < count; ++qi) {
    const int a = queries[static_cast<std::size_t>(qi)];
    double best = std::numeric_limits<double>::infinity();
    for (int x = a; x != 0; x = nodes[static_cast<std::size_t>(x)].parent) {
      const auto& parent = nodes[static_cast<std::size_t>(nodes[static_cast<std::size_t>(x)].parent)];
      for (int sib : parent.children) {
        if (sib != x) best = min_distance(nodes, cloud, a, sib, best);
      }
    }
    const auto& na = nodes[static_cast<std::size_t>(a)];
    out[static_cast<std::size_t>(qi)] = {
        range_address(cloud, CloneRange{na.begin, na.end, na.level}), best};
  }
  return out;
}

namespace {

std::size_t count_boxes(std::span<const Point> points, double scale) {
  std::vector<std::pair<long long, long long>> keys;
  keys.reserve(points.size());
  for (auto p : points) {
    keys.emplace_back(static_cast<long long>(std::floor(p.x / scale)),
                      static_cast<long long>(std::floor(p.y / scale)));
  }
  std::ranges::sort(keys);
  return static_cast<std::size_t>(std::unique(keys.begin(), keys.end()) - keys.begin());
}

}  // namespace

std::vector<std::size_t> box_counts_serial(std::span<const Point> points, std::span<const double> scales) {
  std::vector<std::size_t> out;
  for (double s : scales) out.push_back(count_boxes(points, s));
  return out;
}

std::vector<std::size_t> box_counts_parallel(std::span<const Point> points, std::span<const double> scales) {
  std::vector<std::size_t> out(scales.size());
  const auto count = static_cast<long>(scales.size());
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < count; ++i) {
    out[static_cast<std::size_t>(i)] = count_boxes(points, scales[static_cast<std::size_t>(i)]);
  }
  return out;
}

}  // namespace mmc::kernels
