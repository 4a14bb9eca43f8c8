#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "dicke/model.hpp"

namespace dicke {

// Field quadratures (x, y) and spin direction (theta, phi) of a product of
// boson and spin coherent states.
struct PhasePoint {
    double x = 0.0;
    double y = 0.0;
    double theta = 0.0;
    double phi = 0.0;
};

enum class PointKind { minimum, saddle, maximum, degenerate };

const char* to_string(PointKind kind) noexcept;

struct StationaryPoint {
    PhasePoint point;
    double energy = 0.0;
    double gradient_norm = 0.0;
    PointKind classification = PointKind::degenerate;
};

// E = omega (x^2 + y^2) + 2 S g x cos(theta) - v S^2 sin^2(theta) cos^2(phi)
double energy_surface(const ModelParams& p, const PhasePoint& pt);

// Analytic derivatives in the order (x, y, theta, phi).
Eigen::Vector4d energy_gradient(const ModelParams& p, const PhasePoint& pt);
Eigen::Matrix4d energy_hessian(const ModelParams& p, const PhasePoint& pt);

// min over (x, y) of energy_surface: -u S^2 cos^2(theta) - v S^2 sin^2(theta) cos^2(phi)
double reduced_surface(const ModelParams& p, double theta, double phi);

// theta folded into [0, pi], phi into [0, 2 pi); phi is set to 0 at the poles.
PhasePoint canonical(PhasePoint pt);

struct MinimaOptions {
    double gradient_tol = 1e-10;
    int max_steps = 500;
    double hessian_step = 1e-4;
    std::uint64_t seed = 0x6d696e;
};

class MinimaSearchError : public std::runtime_error {
public:
    MinimaSearchError(const std::string& message, std::vector<StationaryPoint> best)
        : std::runtime_error(message), best_(std::move(best)) {}

    const std::vector<StationaryPoint>& best_candidates() const noexcept { return best_; }

private:
    std::vector<StationaryPoint> best_;
};

// Local minima of energy_surface from a 3x4 (theta, phi) grid of starts at
// x = y = 0, refined by modified Newton descent. Points with a flat Hessian
// direction are reported as degenerate. Saddles and maxima are dropped.
std::vector<StationaryPoint> find_minima(const ModelParams& p, const MinimaOptions& opts = {});

// Classify from a central-difference Hessian of the energy. At the poles the
// (theta, phi) chart is singular and a local Cartesian chart is used instead.
PointKind classify_stationary_point(const ModelParams& p, const PhasePoint& pt, double h = 1e-4);

// |cos(pi N / 2)|, i.e. 0 for odd N and 1 for even N.
double interference_factor(int N);

struct ScalingFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    std::vector<std::pair<int, double>> points;   // (N, d)
};

// Least-squares line through (N, ln d). Requires at least three points, even N
// and d > 0; throws std::invalid_argument otherwise.
ScalingFit splitting_scaling_fit(std::span<const std::pair<int, double>> points);

} // namespace dicke
