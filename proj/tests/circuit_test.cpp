#include "doctest.h"

#include <cmath>
#include <random>
#include <string>

#include "dicke/circuit.hpp"
#include "dicke/errors.hpp"

using namespace dicke;
using namespace dicke::circuit;

namespace {

CircuitParams device() {
    CircuitParams c;
    c.E_c = 2 * kPi * 500.0;
    c.E_J = 2 * kPi * 200.0;
    c.L = 10e-9;
    c.I_c = 3.64e-9;
    c.omega = 2 * kPi * 6000.0;
    c.g = 2 * kPi * 5.8;
    c.N = 5;
    return c;
}

const char* const kDeviceText = R"(# test device
units = linear_mhz
E_c = 500
E_J = 200
n_g = 0.5
Phi_x = 1.5707963267948966
Phi_e = 1.5707963267948966
L = 1e-8
I_c = 3.64e-9
omega = 6000
g = 5.8
N = 5
)";

} // namespace

TEST_CASE("optimal gate charge gives zero bias") {
    CircuitParams c = device();
    c.n_g = 0.5;
    CHECK(derive_model_params(c).atom.epsilon == 0.0);
}

TEST_CASE("bias is linear in gate charge with a sign flip at 1/2") {
    CircuitParams c = device();
    c.n_g = 0.4;
    const double below = derive_model_params(c).atom.epsilon;
    c.n_g = 0.6;
    const double above = derive_model_params(c).atom.epsilon;
    CHECK(below < 0.0);
    CHECK(above > 0.0);
    CHECK(below == doctest::Approx(-above).epsilon(1e-12));
    c.n_g = 0.7;
    CHECK(derive_model_params(c).atom.epsilon - above == doctest::Approx(above - 0.0).epsilon(1e-12));
}

TEST_CASE("quoted device values give u/2pi of about 5.607e-3 MHz") {
    const DerivedModel d = derive_model_params(device());
    const double direct = (2 * kPi * 5.8) * (2 * kPi * 5.8) / (2 * kPi * 6000.0);
    CHECK(std::abs(d.model.u() - direct) <= 1e-12 * direct);
    CHECK(d.model.u() / (2 * kPi) == doctest::Approx(5.8 * 5.8 / 6000.0).epsilon(1e-12));
    CHECK(d.model.u() / (2 * kPi) == doctest::Approx(5.607e-3).epsilon(1e-3));
}

TEST_CASE("inductive coupling for 10 nH and 3.64 nA is about 2pi x 100 MHz") {
    const double v = inductive_coupling(10e-9, 3.64e-9, kPi / 2);
    const double oracle = 0.5 * 10e-9 * 3.64e-9 * 3.64e-9 / 1.054571817e-34 / 1e6;
    CHECK(v == doctest::Approx(oracle).epsilon(1e-14));
    CHECK(v / (2 * kPi) == doctest::Approx(100.0).epsilon(1e-3));
}

TEST_CASE("regime check") {
    const DerivedModel d = derive_model_params(device());
    const RegimeReport ok = validate_regime(d.model, d.atom);
    CHECK(ok.u_lt_v);
    CHECK(ok.optimal_point);
    CHECK(ok.eta_zero);
    CHECK(ok.ok());
    CHECK(ok.messages.empty());

    ModelParams boundary = ModelParams::from_u(2, 1.0, 0.5, 0.5);
    boundary.v = boundary.u();
    CHECK_FALSE(validate_regime(boundary, d.atom).u_lt_v);

    CircuitParams off = device();
    off.n_g = 0.6;
    const DerivedModel od = derive_model_params(off);
    const RegimeReport bad = validate_regime(od.model, od.atom);
    CHECK_FALSE(bad.optimal_point);
    REQUIRE(bad.messages.size() == 1);
    CHECK(bad.messages[0].find("n_g") != std::string::npos);
}

TEST_CASE("eta vanishes when cos(Phi_x) = 0 for any global flux") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> flux(0.0, 2 * kPi);
    for (int i = 0; i < 20; ++i) {
        CircuitParams c = device();
        c.Phi_x = kPi / 2;
        c.Phi_e = flux(rng);
        const DerivedModel d = derive_model_params(c);
        CHECK(std::abs(d.atom.eta) < 1e-9);
        CHECK(validate_regime(d.model, d.atom).eta_zero);
    }
}

TEST_CASE("inductive coupling is symmetric about Phi_e = pi/2") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> flux(0.0, kPi);
    for (int i = 0; i < 20; ++i) {
        const double phi = flux(rng);
        const double a = inductive_coupling(10e-9, 3.64e-9, phi);
        const double b = inductive_coupling(10e-9, 3.64e-9, kPi - phi);
        CHECK(std::abs(a - b) <= 1e-12 * std::max(a, 1e-300));
    }
}

TEST_CASE("unit conversions") {
    const double v = inductive_coupling(10e-9, 3.64e-9, kPi / 2);
    CHECK(std::abs(joules_to_model(model_to_joules(v)) - v) <= 1e-12 * v);
    CHECK(flux_to_phase(kFluxQuantum / 4) == doctest::Approx(kPi / 2).epsilon(1e-15));
    const DerivedModel d = derive_model_params(device());
    CHECK(d.atom.kappa == doctest::Approx(kPi * 10e-9 * 3.64e-9 / kFluxQuantum).epsilon(1e-15));
}

TEST_CASE("circuit parameter validation") {
    CircuitParams c = device();
    c.L = 0.0;
    CHECK_THROWS_AS(derive_model_params(c), std::invalid_argument);
    c = device();
    c.n_g = 1.2;
    CHECK_THROWS_AS(derive_model_params(c), std::invalid_argument);
    c = device();
    c.omega = -1.0;
    CHECK_THROWS_AS(derive_model_params(c), std::invalid_argument);
}

TEST_CASE("device file parsing") {
    const CircuitParams c = parse_device_file(kDeviceText);
    CHECK(c.omega == doctest::Approx(2 * kPi * 6000.0).epsilon(1e-15));
    CHECK(c.g == doctest::Approx(2 * kPi * 5.8).epsilon(1e-15));
    CHECK(c.L == 1e-8);
    CHECK(c.N == 5);

    std::string si = kDeviceText;
    si.replace(si.find("linear_mhz"), 10, "si");
    CHECK(parse_device_file(si).omega == doctest::Approx(6000.0e-6).epsilon(1e-15));
}

TEST_CASE("device file errors carry line numbers") {
    try {
        parse_device_file("E_c = 1\nfoo = 2\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
        CHECK(std::string(e.what()).find("foo") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_device_file("E_c = 1\nE_c = 2\n"), ParseError);
    CHECK_THROWS_AS(parse_device_file("E_c = 1\n"), ParseError);
    std::string bad = kDeviceText;
    bad.replace(bad.find("= 200"), 5, "= 2x0");
    try {
        parse_device_file(bad);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 4);
    }
    std::string units = kDeviceText;
    units.replace(units.find("linear_mhz"), 10, "ghz");
    CHECK_THROWS_AS(parse_device_file(units), ParseError);
    CHECK_THROWS_AS(read_device_file("/nonexistent/device.txt"), IoError);
}
