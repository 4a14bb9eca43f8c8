#include "dicke/semiclassics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

namespace dicke {

using std::numbers::pi;

const char* to_string(PointKind kind) noexcept {
    switch (kind) {
    case PointKind::minimum: return "minimum";
    case PointKind::saddle: return "saddle";
    case PointKind::maximum: return "maximum";
    case PointKind::degenerate: return "degenerate";
    }
    return "unknown";
}

double energy_surface(const ModelParams& p, const PhasePoint& pt) {
    const double S = p.S();
    const double s = std::sin(pt.theta);
    const double cphi = std::cos(pt.phi);
    return p.omega * (pt.x * pt.x + pt.y * pt.y) + 2.0 * S * p.g * pt.x * std::cos(pt.theta) -
           p.v * S * S * s * s * cphi * cphi;
}

Eigen::Vector4d energy_gradient(const ModelParams& p, const PhasePoint& pt) {
    const double S = p.S();
    const double vs2 = p.v * S * S;
    const double s = std::sin(pt.theta);
    const double c = std::cos(pt.theta);
    const double cphi = std::cos(pt.phi);
    return {2.0 * p.omega * pt.x + 2.0 * S * p.g * c,
            2.0 * p.omega * pt.y,
            -2.0 * S * p.g * pt.x * s - vs2 * std::sin(2.0 * pt.theta) * cphi * cphi,
            vs2 * s * s * std::sin(2.0 * pt.phi)};
}

Eigen::Matrix4d energy_hessian(const ModelParams& p, const PhasePoint& pt) {
    const double S = p.S();
    const double vs2 = p.v * S * S;
    const double s = std::sin(pt.theta);
    const double c = std::cos(pt.theta);
    const double cphi = std::cos(pt.phi);
    Eigen::Matrix4d h = Eigen::Matrix4d::Zero();
    h(0, 0) = 2.0 * p.omega;
    h(1, 1) = 2.0 * p.omega;
    h(0, 2) = h(2, 0) = -2.0 * S * p.g * s;
    h(2, 2) = -2.0 * S * p.g * pt.x * c - 2.0 * vs2 * std::cos(2.0 * pt.theta) * cphi * cphi;
    h(2, 3) = h(3, 2) = vs2 * std::sin(2.0 * pt.theta) * std::sin(2.0 * pt.phi);
    h(3, 3) = 2.0 * vs2 * s * s * std::cos(2.0 * pt.phi);
    return h;
}

double reduced_surface(const ModelParams& p, double theta, double phi) {
    const double S2 = p.S() * p.S();
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    const double cphi = std::cos(phi);
    return -p.u() * S2 * c * c - p.v * S2 * s * s * cphi * cphi;
}

PhasePoint canonical(PhasePoint pt) {
    double theta = std::fmod(pt.theta, 2.0 * pi);
    if (theta < 0.0) theta += 2.0 * pi;
    double phi = pt.phi;
    if (theta > pi) {
        theta = 2.0 * pi - theta;
        phi += pi;
    }
    phi = std::fmod(phi, 2.0 * pi);
    if (phi < 0.0) phi += 2.0 * pi;
    if (phi >= 2.0 * pi - 1e-12) phi = 0.0;   // rounding just below 2 pi is the phi = 0 meridian
    if (std::sin(theta) < 1e-9) phi = 0.0;
    pt.theta = theta;
    pt.phi = phi;
    return pt;
}

namespace {

double energy_scale(const ModelParams& p) {
    const double S = p.S();
    return std::max({p.omega, std::abs(p.g) * S, p.v * S * S, 1e-300});
}

// Coordinates for the finite-difference Hessian. Away from the poles these are
// (x, y, theta, phi); at a pole they are (x, y, a, b) with
// (a, b) = r (cos phi, sin phi) and r the angular distance from the pole.
struct Chart {
    bool pole = false;
    bool north = true;

    PhasePoint point(const Eigen::Vector4d& q) const {
        if (!pole) return {q(0), q(1), q(2), q(3)};
        const double r = std::hypot(q(2), q(3));
        const double phi = std::atan2(q(3), q(2));
        return {q(0), q(1), north ? r : pi - r, phi};
    }

    Eigen::Vector4d coords(const PhasePoint& pt) const {
        if (!pole) return {pt.x, pt.y, pt.theta, pt.phi};
        const double r = north ? pt.theta : pi - pt.theta;
        return {pt.x, pt.y, r * std::cos(pt.phi), r * std::sin(pt.phi)};
    }
};

Eigen::Matrix4d finite_difference_hessian(const ModelParams& p, const PhasePoint& pt, double h) {
    Chart chart;
    const PhasePoint c = canonical(pt);
    if (std::sin(c.theta) < 1e-6) {
        chart.pole = true;
        chart.north = c.theta < pi / 2;
    }
    const Eigen::Vector4d q0 = chart.coords(c);
    auto f = [&](const Eigen::Vector4d& q) { return energy_surface(p, chart.point(q)); };
    const double f0 = f(q0);

    Eigen::Matrix4d H;
    for (int i = 0; i < 4; ++i) {
        Eigen::Vector4d e_i = Eigen::Vector4d::Zero();
        e_i(i) = h;
        H(i, i) = (f(q0 + e_i) - 2.0 * f0 + f(q0 - e_i)) / (h * h);
        for (int j = 0; j < i; ++j) {
            Eigen::Vector4d e_j = Eigen::Vector4d::Zero();
            e_j(j) = h;
            H(i, j) = H(j, i) =
                (f(q0 + e_i + e_j) - f(q0 + e_i - e_j) - f(q0 - e_i + e_j) + f(q0 - e_i - e_j)) / (4.0 * h * h);
        }
    }
    return H;
}

struct Descent {
    PhasePoint point;
    double energy;
    double gradient_norm;
    bool converged;
};

PhasePoint shifted(const PhasePoint& pt, const Eigen::Vector4d& step) {
    return {pt.x + step(0), pt.y + step(1), pt.theta + step(2), pt.phi + step(3)};
}

// Modified Newton: Hessian eigenvalues replaced by max(|lambda|, floor), Armijo
// backtracking. Once the energy change drops below rounding, a full Newton step
// is taken if the Hessian is positive definite.
Descent descend(const ModelParams& p, PhasePoint pt, const MinimaOptions& opts) {
    const double scale = energy_scale(p);
    const double floor = 1e-6 * scale;
    double energy = energy_surface(p, pt);
    Eigen::Vector4d grad = energy_gradient(p, pt);
    for (int step = 0; step < opts.max_steps; ++step) {
        if (grad.norm() < opts.gradient_tol) return {canonical(pt), energy, grad.norm(), true};

        Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> eig(energy_hessian(p, pt));
        const Eigen::Vector4d lambda = eig.eigenvalues();
        const bool positive = lambda.minCoeff() > floor;
        const Eigen::Vector4d inverse = lambda.cwiseAbs().cwiseMax(floor).cwiseInverse();
        Eigen::Vector4d direction = -(eig.eigenvectors() * inverse.asDiagonal() * eig.eigenvectors().transpose() * grad);
        const double length = direction.norm();
        if (length > 1.0) direction /= length;

        const double slope = grad.dot(direction);
        double alpha = 1.0;
        bool accepted = false;
        while (alpha > 1e-12) {
            const PhasePoint trial = shifted(pt, alpha * direction);
            const double e = energy_surface(p, trial);
            if (e < energy + 1e-4 * alpha * slope) {
                pt = trial;
                energy = e;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted) {
            if (!positive) break;
            pt = shifted(pt, direction);
            energy = energy_surface(p, pt);
        }
        pt = canonical(pt);
        grad = energy_gradient(p, pt);
    }
    return {canonical(pt), energy, grad.norm(), grad.norm() < opts.gradient_tol};
}

constexpr double kSamePointTol = 1e-6;

bool same_point(const PhasePoint& a, const PhasePoint& b) {
    constexpr double tol = kSamePointTol;
    double dphi = std::abs(a.phi - b.phi);
    dphi = std::min(dphi, 2.0 * pi - dphi);
    return std::abs(a.x - b.x) < tol && std::abs(a.y - b.y) < tol && std::abs(a.theta - b.theta) < tol && dphi < tol;
}

} // namespace

PointKind classify_stationary_point(const ModelParams& p, const PhasePoint& pt, double h) {
    const Eigen::Matrix4d H = finite_difference_hessian(p, pt, h);
    const Eigen::Vector4d lambda = Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d>(H, Eigen::EigenvaluesOnly).eigenvalues();
    const double zero = 1e-6 * energy_scale(p);
    int positive = 0;
    int negative = 0;
    for (int i = 0; i < 4; ++i) {
        if (lambda(i) > zero) ++positive;
        else if (lambda(i) < -zero) ++negative;
    }
    if (positive == 4) return PointKind::minimum;
    if (negative == 4) return PointKind::maximum;
    if (positive > 0 && negative > 0) return PointKind::saddle;
    return PointKind::degenerate;
}

std::vector<StationaryPoint> find_minima(const ModelParams& p, const MinimaOptions& opts) {
    p.validate();
    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> jitter(-0.05, 0.05);

    std::vector<StationaryPoint> found;
    std::vector<Descent> unconverged;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 4; ++j) {
            const double theta = (i + 0.5) * pi / 3.0 + jitter(rng);
            const double phi = (j + 0.5) * pi / 2.0 + jitter(rng);
            const Descent d = descend(p, {0.0, 0.0, theta, phi}, opts);
            if (!d.converged) {
                unconverged.push_back(d);
                continue;
            }
            const PointKind kind = classify_stationary_point(p, d.point, opts.hessian_step);
            if (kind == PointKind::saddle || kind == PointKind::maximum) continue;
            const bool duplicate = std::any_of(found.begin(), found.end(),
                                               [&](const StationaryPoint& s) { return same_point(s.point, d.point); });
            if (!duplicate) found.push_back({d.point, d.energy, d.gradient_norm, kind});
        }
    }

    if (found.empty()) {
        std::sort(unconverged.begin(), unconverged.end(),
                  [](const Descent& a, const Descent& b) { return a.gradient_norm < b.gradient_norm; });
        std::vector<StationaryPoint> best;
        std::ostringstream msg;
        msg << "find_minima: no start converged to a minimum; best candidates:";
        for (std::size_t i = 0; i < std::min<std::size_t>(3, unconverged.size()); ++i) {
            const Descent& d = unconverged[i];
            best.push_back({d.point, d.energy, d.gradient_norm, PointKind::degenerate});
            msg << " (x=" << d.point.x << ", y=" << d.point.y << ", theta=" << d.point.theta << ", phi=" << d.point.phi
                << ", |grad|=" << d.gradient_norm << ")";
        }
        throw MinimaSearchError(msg.str(), std::move(best));
    }

    std::sort(found.begin(), found.end(), [](const StationaryPoint& a, const StationaryPoint& b) {
        if (std::abs(a.point.theta - b.point.theta) >= kSamePointTol) return a.point.theta < b.point.theta;
        return a.point.phi < b.point.phi;
    });
    return found;
}

double interference_factor(int N) {
    if (N < 1) throw std::invalid_argument("interference_factor: N must be >= 1");
    // |cos(N pi / 2)| is 1 for N = 0, 2 mod 4 and 0 for odd N.
    return N % 2 == 0 ? 1.0 : 0.0;
}

ScalingFit splitting_scaling_fit(std::span<const std::pair<int, double>> points) {
    if (points.size() < 3)
        throw std::invalid_argument("splitting_scaling_fit: need at least 3 points, got " + std::to_string(points.size()));
    for (const auto& [N, d] : points) {
        if (N % 2 != 0) throw std::invalid_argument("splitting_scaling_fit: odd N=" + std::to_string(N));
        if (!(d > 0.0) || !std::isfinite(d))
            throw std::invalid_argument("splitting_scaling_fit: non-positive splitting at N=" + std::to_string(N));
    }

    const auto n = static_cast<double>(points.size());
    double mean_x = 0.0;
    double mean_y = 0.0;
    for (const auto& [N, d] : points) {
        mean_x += N;
        mean_y += std::log(d);
    }
    mean_x /= n;
    mean_y /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (const auto& [N, d] : points) {
        const double dx = N - mean_x;
        const double dy = std::log(d) - mean_y;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx == 0.0) throw std::invalid_argument("splitting_scaling_fit: all points share one N");

    ScalingFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = mean_y - fit.slope * mean_x;
    double ss_res = 0.0;
    for (const auto& [N, d] : points) {
        const double r = std::log(d) - (fit.intercept + fit.slope * N);
        ss_res += r * r;
    }
    fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
    fit.points.assign(points.begin(), points.end());
    return fit;
}

} // namespace dicke
