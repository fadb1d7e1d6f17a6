#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/distributions/chi_squared.hpp>

namespace oracle {

using ier::Interval;
using ier::PolylinePath;
using ier::Vec2;

namespace {

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const double dx = b.x - a.x, dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double t = ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2;
  t = std::clamp(t, 0.0, 1.0);
  const double qx = a.x + t * dx - p.x, qy = a.y + t * dy - p.y;
  return std::sqrt(qx * qx + qy * qy);
}

double distance_to_path(Vec2 p, const PolylinePath& path) {
  double best = std::numeric_limits<double>::infinity();
  const auto& v = path.vertices();
  for (std::size_t i = 0; i + 1 < v.size(); ++i) best = std::min(best, point_segment_distance(p, v[i], v[i + 1]));
  return best;
}

// Arc position of the closest centerline point, by dense search.
double arc_of(Vec2 p, const PolylinePath& path) {
  const auto& v = path.vertices();
  const auto& cum = path.cum_length();
  double best = std::numeric_limits<double>::infinity(), s_best = 0.0;
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    const double dx = v[i + 1].x - v[i].x, dy = v[i + 1].y - v[i].y;
    const double len2 = dx * dx + dy * dy;
    const double t = std::clamp(((p.x - v[i].x) * dx + (p.y - v[i].y) * dy) / len2, 0.0, 1.0);
    const double d = std::hypot(v[i].x + t * dx - p.x, v[i].y + t * dy - p.y);
    if (d < best) {
      best = d;
      s_best = cum[i] + t * std::sqrt(len2);
    }
  }
  return s_best;
}

double orient(Vec2 a, Vec2 b, Vec2 c) { return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x); }

bool strictly_inside(Vec2 p, const std::vector<Vec2>& poly) {
  int sign = 0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const double o = orient(poly[i], poly[(i + 1) % poly.size()], p);
    if (std::abs(o) < 1e-12) return false;
    const int s = o > 0 ? 1 : -1;
    if (sign == 0) sign = s;
    if (s != sign) return false;
  }
  return true;
}

}  // namespace

std::optional<RasterOverlap> raster_overlap(const PolylinePath& ego, const PolylinePath& other, double cell) {
  double x0 = std::numeric_limits<double>::infinity(), y0 = x0, x1 = -x0, y1 = -x0;
  for (const auto& p : ego.vertices()) {
    x0 = std::min(x0, p.x);
    y0 = std::min(y0, p.y);
    x1 = std::max(x1, p.x);
    y1 = std::max(y1, p.y);
  }
  const double pad = ego.width();
  RasterOverlap out{{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()},
                    {std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()},
                    0};
  for (double x = std::floor((x0 - pad) / cell) * cell + cell / 2; x <= x1 + pad; x += cell) {
    for (double y = std::floor((y0 - pad) / cell) * cell + cell / 2; y <= y1 + pad; y += cell) {
      const Vec2 p{x, y};
      if (distance_to_path(p, ego) > ego.width() / 2) continue;
      if (distance_to_path(p, other) > other.width() / 2) continue;
      const double s = arc_of(p, ego), u = arc_of(p, other);
      out.ego.lo = std::min(out.ego.lo, s);
      out.ego.hi = std::max(out.ego.hi, s);
      out.other.lo = std::min(out.other.lo, u);
      out.other.hi = std::max(out.other.hi, u);
      ++out.cells;
    }
  }
  if (out.cells == 0) return std::nullopt;
  return out;
}

bool segment_hits_polygon(Vec2 a, Vec2 b, const std::vector<Vec2>& poly) {
  if (strictly_inside(a, poly) || strictly_inside(b, poly)) return true;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2 c = poly[i], d = poly[(i + 1) % poly.size()];
    const double o1 = orient(a, b, c), o2 = orient(a, b, d), o3 = orient(c, d, a), o4 = orient(c, d, b);
    if (((o1 > 0 && o2 < 0) || (o1 < 0 && o2 > 0)) && ((o3 > 0 && o4 < 0) || (o3 < 0 && o4 > 0))) return true;
  }
  // A chord through two vertices crosses the interior without crossing an edge.
  const Vec2 mid{(a.x + b.x) / 2, (a.y + b.y) / 2};
  if (strictly_inside(mid, poly)) return true;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    for (std::size_t j = i + 1; j < poly.size(); ++j) {
      const Vec2 m{(poly[i].x + poly[j].x) / 2, (poly[i].y + poly[j].y) / 2};
      if (std::abs(orient(a, b, poly[i])) < 1e-9 && std::abs(orient(a, b, poly[j])) < 1e-9 &&
          strictly_inside(m, poly)) {
        return true;
      }
    }
  }
  return false;
}

std::vector<Interval> dense_shadow(Vec2 viewpoint, const std::vector<std::vector<Vec2>>& polys,
                                   const PolylinePath& lane, double step) {
  std::vector<Interval> out;
  const int n = static_cast<int>(std::floor(lane.length() / step));
  bool open = false;
  for (int i = 0; i <= n; ++i) {
    const double u = i * step;
    const Vec2 p = lane.pose_at(u).position;
    bool hidden = false;
    for (const auto& poly : polys) hidden = hidden || segment_hits_polygon(viewpoint, p, poly);
    if (hidden && !open) {
      out.push_back({u, u});
      open = true;
    } else if (hidden) {
      out.back().hi = u;
    } else {
      open = false;
    }
  }
  return out;
}

Sweep sweep_occupancy(double front, double length, double v, Interval region, double dt, double horizon) {
  Sweep out{horizon, horizon};
  bool entered = false;
  const long steps = static_cast<long>(std::ceil(horizon / dt));
  for (long k = 0; k <= steps; ++k) {
    const double t = k * dt;
    const double f = front + v * t;
    const double r = f - length;
    if (!entered && f >= region.lo && r <= region.hi) {
      out.tto = t;
      entered = true;
    }
    if (r > region.hi) {
      out.ttv = t;
      if (!entered) out.tto = t;
      break;
    }
  }
  return out;
}

std::vector<double> flatten_grads(const std::vector<ier::DenseLayer>& grads) {
  std::vector<double> out;
  for (const auto& g : grads) {
    out.insert(out.end(), g.weight.data(), g.weight.data() + g.weight.size());
    out.insert(out.end(), g.bias.data(), g.bias.data() + g.bias.size());
  }
  return out;
}

void jitter_biases(ier::QNetwork& net, ier::Rng& rng, double scale) {
  for (auto& layer : net.layers()) {
    for (Eigen::Index i = 0; i < layer.bias.size(); ++i) layer.bias[i] = scale * (2.0 * ier::uniform01(rng) - 1.0);
  }
}

std::vector<double> numeric_gradient(const ier::QNetwork& net, const Eigen::MatrixXd& obs,
                                     const std::vector<int>& actions, const std::vector<double>& targets,
                                     const std::vector<double>& weights, double h) {
  ier::QNetwork probe = net;
  std::vector<double> out;
  auto loss = [&] { return ier::td_loss(probe, obs, actions, targets, weights, nullptr, nullptr); };
  for (auto& layer : probe.layers()) {
    for (double* params : {layer.weight.data(), layer.bias.data()}) {
      const auto n = params == layer.weight.data() ? layer.weight.size() : layer.bias.size();
      for (Eigen::Index i = 0; i < n; ++i) {
        const double saved = params[i];
        params[i] = saved + h;
        const double up = loss();
        params[i] = saved - h;
        const double down = loss();
        params[i] = saved;
        out.push_back((up - down) / (2 * h));
      }
    }
  }
  return out;
}

double chi_square_p(double statistic, int dof) {
  boost::math::chi_squared dist(dof);
  return boost::math::cdf(boost::math::complement(dist, statistic));
}

double binomial_z(long hits, long n, double p) {
  const double mean = static_cast<double>(n) * p;
  const double sd = std::sqrt(static_cast<double>(n) * p * (1 - p));
  return (static_cast<double>(hits) - mean) / sd;
}

}  // namespace oracle
