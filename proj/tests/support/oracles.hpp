#pragma once

// Brute-force reference computations used to check the library.

#include <optional>
#include <vector>

#include "ier/dqn.hpp"
#include "ier/encoder.hpp"
#include "ier/geometry.hpp"
#include "ier/mlp.hpp"
#include "ier/traffic.hpp"

namespace oracle {

/// Overlap of two corridors found by rasterizing the plane at `cell` spacing,
/// projected back onto each path. Empty when the corridors do not touch.
struct RasterOverlap {
  ier::Interval ego;
  ier::Interval other;
  int cells = 0;
};
std::optional<RasterOverlap> raster_overlap(const ier::PolylinePath& ego, const ier::PolylinePath& other,
                                            double cell = 0.05);

/// Occlusion test by exact segment/edge intersection, independent of the
/// library's clipping code.
bool segment_hits_polygon(ier::Vec2 a, ier::Vec2 b, const std::vector<ier::Vec2>& poly);

/// Dense ray cast along `lane` every `step` meters; returns maximal occluded
/// arc intervals (sample positions, not widened).
std::vector<ier::Interval> dense_shadow(ier::Vec2 viewpoint, const std::vector<std::vector<ier::Vec2>>& polys,
                                        const ier::PolylinePath& lane, double step = 0.01);

/// Time-stepped occupancy of the arc interval [lo, hi] by a vehicle whose
/// front starts at `front` and moves at `v`. Returns the first time the body
/// [front - length, front] touches [lo, hi] and the first time the rear is
/// past hi. Both capped at `horizon`.
struct Sweep {
  double tto;
  double ttv;
};
Sweep sweep_occupancy(double front, double length, double v, ier::Interval region, double dt = 1e-3,
                      double horizon = 12.0);

/// Central-difference gradient of ier::td_loss with respect to every
/// parameter, flattened layer by layer (weights column-major, then bias).
std::vector<double> numeric_gradient(const ier::QNetwork& net, const Eigen::MatrixXd& obs,
                                     const std::vector<int>& actions, const std::vector<double>& targets,
                                     const std::vector<double>& weights, double h = 1e-6);
/// Fresh networks have zero biases, which can park a pre-activation exactly on
/// the ReLU kink where central differences are meaningless.
void jitter_biases(ier::QNetwork& net, ier::Rng& rng, double scale = 0.1);
std::vector<double> flatten_grads(const std::vector<ier::DenseLayer>& grads);

/// Upper-tail probability of a chi-square statistic.
double chi_square_p(double statistic, int dof);

/// Binomial z-score of `hits` successes out of `n` trials at probability p.
double binomial_z(long hits, long n, double p);

}  // namespace oracle
