#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "dicke/model.hpp"

namespace dicke::circuit {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kHbar = 1.054571817e-34;          // J s
inline constexpr double kFluxQuantum = 2.067833848e-15;   // Wb

// Model energies coming out of this module are angular frequencies in units
// of 1e6 rad/s, so "2 pi x 6000 MHz" is the number 2 pi * 6000.
inline constexpr double kModelUnitRadPerSecond = 1e6;

// Frequencies in model units (see above); L in henry, I_c in ampere; fluxes as
// the radian arguments of the trigonometric factors.
struct CircuitParams {
    double E_c = 0.0;
    double E_J = 0.0;
    double n_g = 0.5;
    double Phi_x = kPi / 2;
    double Phi_e = kPi / 2;
    double L = 0.0;
    double I_c = 0.0;
    double omega = 0.0;
    double g = 0.0;
    int N = 1;

    void validate() const;
};

struct DerivedSingleAtom {
    double epsilon = 0.0;   // 2 E_c (2 n_g - 1)
    double eta = 0.0;       // -E_J cos(Phi_x) cos(Phi_e) (1 - 2 kappa^2 sin^2(Phi_e))
    double kappa = 0.0;     // pi L I_c / Phi_0
};

struct DerivedModel {
    ModelParams model;
    DerivedSingleAtom atom;
};

DerivedModel derive_model_params(const CircuitParams& c);

// L I_c^2 sin^2(Phi_e) / (2 hbar), in model units.
double inductive_coupling(double L, double I_c, double Phi_e);

double joules_to_model(double energy);
double model_to_joules(double frequency);

// 2 pi Phi / Phi_0
double flux_to_phase(double webers);

struct RegimeReport {
    bool u_lt_v = false;
    bool optimal_point = false;
    bool eta_zero = false;
    std::vector<std::string> messages;

    bool ok() const noexcept { return u_lt_v && optimal_point && eta_zero; }
};

RegimeReport validate_regime(const ModelParams& m, const DerivedSingleAtom& d, double tol_abs = 1e-9);

// "key = value" lines; '#' starts a comment. Keys: E_c, E_J, n_g, Phi_x, Phi_e,
// L, I_c, omega, g, N and optional units = si | angular_mhz | linear_mhz
// (default angular_mhz). "si" frequencies are rad/s; "linear_mhz" values are
// multiplied by 2 pi. L and I_c are always SI. Throws ParseError.
CircuitParams parse_device_file(std::string_view text);
CircuitParams read_device_file(const std::string& path);

} // namespace dicke::circuit
