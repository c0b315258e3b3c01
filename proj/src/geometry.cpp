#include "mmc/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <sstream>

#include "mmc/error.hpp"

namespace mmc {

namespace {

constexpr double kSlack = 1e-12;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double cross(Point o, Point a, Point b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); }

// Largest pairwise distance, via the convex hull.
double cloud_diameter(std::vector<Point> pts) {
  if (pts.size() < 2) return 0.0;
  std::ranges::sort(pts, [](Point a, Point b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  std::vector<Point> hull(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k > 1 ? k - 1 : k);
  double best = 0.0;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    for (std::size_t j = i + 1; j < hull.size(); ++j) best = std::max(best, distance(hull[i], hull[j]));
  }
  return best;
}

}  // namespace

ValidationReport validate_embedding(const CloneStructure& s) {
  ValidationReport report;
  report.counts = s.counts();
  auto& out = report.violations;
  for (const auto& m : s.models()) {
    if (!m.region) {
      out.push_back("model " + std::to_string(m.id.value()) + " has no region");
    } else if (!(m.region->radius > 0.0)) {
      out.push_back("model " + std::to_string(m.id.value()) + ": region radius must be positive");
    }
  }
  for (const auto& c : s.clones()) {
    if (!c.placement) out.push_back("clone " + std::to_string(c.id) + " has no placement");
  }
  if (!out.empty()) return report;

  for (const auto& c : s.clones()) {
    const double a = c.inverse_scale.value;
    if (std::abs(c.placement->scale - a) > kSlack * a) {
      out.push_back("clone " + std::to_string(c.id) + ": placement scale " + fmt(c.placement->scale) +
                    " differs from inverse scale " + fmt(a));
    }
  }
  auto image = [&](const CloneMapSpec& c) {
    const auto& r = *s.model(c.target).region;
    return std::pair{c.placement->apply(r.center), c.placement->scale * r.radius};
  };
  for (const auto& m : s.models()) {
    const auto& outer = *m.region;
    const auto ids = s.clones_in(m.id);
    for (std::size_t i = 0; i < ids.size(); ++i) {
      const auto& ci = s.clone(ids[i]);
      const auto [pi, ri] = image(ci);
      if (distance(pi, outer.center) + ri > outer.radius * (1.0 + kSlack) + kSlack) {
        out.push_back("clone " + std::to_string(ci.id) + " is not contained in model " +
                      std::to_string(m.id.value()));
      }
      for (std::size_t j = i + 1; j < ids.size(); ++j) {
        const auto [pj, rj] = image(s.clone(ids[j]));
        if (distance(pi, pj) - ri - rj <= kSlack * (ri + rj)) {
          out.push_back("clones " + std::to_string(ci.id) + " and " + std::to_string(ids[j]) +
                        " overlap in model " + std::to_string(m.id.value()));
        }
      }
    }
  }
  return report;
}

void require_valid_embedding(const CloneStructure& s) {
  const auto report = validate_embedding(s);
  if (report.ok()) return;
  std::string msg = "invalid embedding:";
  for (const auto& v : report.violations) msg += "\n  " + v;
  throw ValidationError(msg);
}

CloneStructure transform_embedding(const CloneStructure& s, const PlanarSimilarity& g) {
  StructureDefinition def{s.models(), s.clones()};
  const PlanarSimilarity inv = g.inverse();
  for (auto& m : def.models) {
    m.diameter = m.diameter * Scalar::from_double(g.scale);
    if (!m.region) continue;
    m.region->center = g.apply(m.region->center);
    m.region->radius *= g.scale;
    for (auto& p : m.region->outline) p = g.apply(p);
  }
  for (auto& c : def.clones) {
    if (c.placement) c.placement = g.compose(c.placement->compose(inv));
  }
  return CloneStructure(std::move(def));
}

kernels::PointCloud sample_points(const CloneStructure& s, int level) {
  return kernels::sample_parallel(s, level, kernels::SampleMode::DiscCenter);
}

SeparationReport separation_report(const CloneStructure& s, int level, int clone_level) {
  require_valid_embedding(s);
  if (clone_level < 1 || clone_level > level) throw ValidationError("clone level must lie in 1..level");
  const auto cloud = kernels::sample_parallel(s, level, kernels::SampleMode::Anchor);
  const auto seps = kernels::separation_tree(s, cloud, clone_level);

  SeparationReport r;
  r.level = level;
  r.clone_level = clone_level;
  r.error_radius = cloud.error_radius;
  const double er2 = 2.0 * r.error_radius;
  r.alpha = std::numeric_limits<double>::infinity();
  for (const auto& cs : seps) {
    SeparationEntry e;
    e.address = cs.address;
    e.sep = cs.point_sep;
    e.sep_lo = std::max(0.0, cs.point_sep - er2);
    e.diameter = cs.address.diameter(s).value;
    e.rel = e.sep / e.diameter;
    e.rel_lo = e.sep_lo / e.diameter;
    e.rel_hi = e.rel;
    if (e.address.level() == 1) r.alpha = std::min(r.alpha, e.sep);
    if (e.address.level() >= 1) r.xi_bound = std::max({r.xi_bound, e.rel, 1.0 / e.rel});
    r.entries.push_back(std::move(e));
  }
  r.alpha_lo = std::max(0.0, r.alpha - er2);
  r.set_diameter = cloud_diameter(cloud.points);
  r.beta = r.set_diameter / r.alpha;
  r.beta_lo = r.beta;
  r.beta_hi = r.alpha_lo > 0.0 ? (r.set_diameter + er2) / r.alpha_lo : std::numeric_limits<double>::infinity();
  return r;
}

std::vector<double> default_box_scales(const kernels::PointCloud& cloud) {
  double lo_x = std::numeric_limits<double>::infinity(), lo_y = lo_x, hi_x = -lo_x, hi_y = -lo_x;
  for (auto p : cloud.points) {
    lo_x = std::min(lo_x, p.x);
    lo_y = std::min(lo_y, p.y);
    hi_x = std::max(hi_x, p.x);
    hi_y = std::max(hi_y, p.y);
  }
  const double finest = 2.0 * cloud.error_radius;
  const double spread = std::max({hi_x - lo_x, hi_y - lo_y, 2.0 * finest});
  std::vector<double> out;
  for (double h = spread / 2.0; h >= finest && out.size() < 60; h /= 2.0) out.push_back(h);
  if (out.size() < 2) out = {2.0 * finest, finest};
  return out;
}

BoxCountResult box_counting_dimension(const CloneStructure& s, int level, std::vector<double> scales) {
  require_valid_embedding(s);
  const auto cloud = sample_points(s, level);
  if (scales.empty()) scales = default_box_scales(cloud);
  if (scales.size() < 2) throw ValidationError("box counting needs at least two scales");
  for (std::size_t i = 0; i < scales.size(); ++i) {
    if (!(scales[i] > 0.0)) throw ValidationError("box scales must be positive");
    if (i > 0 && !(scales[i] < scales[i - 1])) throw ValidationError("box scales must be decreasing");
  }
  if (scales.back() < 2.0 * cloud.error_radius * (1.0 - 1e-12)) {
    throw ValidationError("finest box scale " + fmt(scales.back()) + " is below twice the sampling error radius " +
                          fmt(cloud.error_radius) + "; sample deeper or use coarser scales");
  }
  BoxCountResult r;
  r.level = level;
  r.error_radius = cloud.error_radius;
  r.counts = kernels::box_counts_parallel(cloud.points, scales);
  r.scales = std::move(scales);
  r.degenerate = level == 0 || cloud.size() <= static_cast<std::size_t>(s.model_count());

  const auto n = static_cast<double>(r.scales.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < r.scales.size(); ++i) {
    const double x = -std::log(r.scales[i]);
    const double y = std::log(static_cast<double>(r.counts[i]));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = n * sxx - sx * sx;
  r.estimate = denom > 0.0 ? (n * sxy - sx * sy) / denom : 0.0;
  r.intercept = (sy - r.estimate * sx) / n;
  return r;
}

std::string render_svg(const CloneStructure& s, int levels) {
  require_valid_embedding(s);
  if (levels < 0 || levels > 10) throw ValidationError("render levels must lie in 0..10");

  double lo_x = std::numeric_limits<double>::infinity(), lo_y = lo_x, hi_x = -lo_x, hi_y = -lo_x;
  for (const auto& m : s.models()) {
    const auto& r = *m.region;
    lo_x = std::min(lo_x, r.center.x - r.radius);
    hi_x = std::max(hi_x, r.center.x + r.radius);
    lo_y = std::min(lo_y, r.center.y - r.radius);
    hi_y = std::max(hi_y, r.center.y + r.radius);
  }
  const double pad = 0.05 * std::max(hi_x - lo_x, hi_y - lo_y);
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return std::string(buf);
  };
  // SVG y grows downwards.
  auto px = [&](Point p) { return num(p.x) + "," + num(-p.y); };

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"" << num(lo_x - pad) << " "
      << num(-hi_y - pad) << " " << num(hi_x - lo_x + 2 * pad) << " " << num(hi_y - lo_y + 2 * pad) << "\">\n";

  auto shape = [&](const PlanarSimilarity& p, TypeId type, double stroke) {
    const auto& r = *s.model(type).region;
    std::string out;
    if (r.outline.empty()) {
      out = "<circle cx=\"" + num(p.apply(r.center).x) + "\" cy=\"" + num(-p.apply(r.center).y) + "\" r=\"" +
            num(p.scale * r.radius) + "\"";
    } else {
      out = "<polygon points=\"";
      for (std::size_t i = 0; i < r.outline.size(); ++i) out += (i ? " " : "") + px(p.apply(r.outline[i]));
      out += "\"";
    }
    return out + " stroke-width=\"" + num(stroke) + "\"/>\n";
  };

  const double base_stroke = 0.004 * std::max(hi_x - lo_x, hi_y - lo_y);
  struct Item {
    PlanarSimilarity placement;
    TypeId type;
  };
  std::vector<Item> current;
  for (const auto& m : s.models()) current.push_back({PlanarSimilarity::identity(), m.id});
  for (int level = 0; level <= levels; ++level) {
    const int shade = 40 + (level * 160) / std::max(1, levels);
    svg << "<g id=\"level-" << level << "\" fill=\"none\" stroke=\"rgb(" << shade / 2 << "," << shade / 2 << ","
        << shade << ")\">\n";
    for (const auto& it : current) svg << shape(it.placement, it.type, base_stroke / (1 + level));
    svg << "</g>\n";
    if (level == levels) break;
    std::vector<Item> next;
    for (const auto& it : current) {
      for (int id : s.clones_in(it.type)) {
        const auto& c = s.clone(id);
        next.push_back({it.placement.compose(*c.placement), c.target});
      }
    }
    current = std::move(next);
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace mmc
