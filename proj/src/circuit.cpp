#include "dicke/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "dicke/errors.hpp"
#include "text_util.hpp"

namespace dicke::circuit {

void CircuitParams::validate() const {
    if (!(L > 0.0)) throw std::invalid_argument("circuit: L must be positive");
    if (!(I_c > 0.0)) throw std::invalid_argument("circuit: I_c must be positive");
    if (!(omega > 0.0)) throw std::invalid_argument("circuit: omega must be positive");
    if (!(n_g >= 0.0 && n_g <= 1.0)) throw std::invalid_argument("circuit: n_g must lie in [0, 1]");
    if (N < 1) throw std::invalid_argument("circuit: N must be >= 1");
    for (double x : {E_c, E_J, Phi_x, Phi_e, g})
        if (!std::isfinite(x)) throw std::invalid_argument("circuit: non-finite parameter");
}

double joules_to_model(double energy) { return energy / kHbar / kModelUnitRadPerSecond; }

double model_to_joules(double frequency) { return frequency * kModelUnitRadPerSecond * kHbar; }

double flux_to_phase(double webers) { return 2.0 * kPi * webers / kFluxQuantum; }

double inductive_coupling(double L, double I_c, double Phi_e) {
    const double s = std::sin(Phi_e);
    return joules_to_model(0.5 * L * I_c * I_c * s * s);
}

DerivedModel derive_model_params(const CircuitParams& c) {
    c.validate();
    DerivedModel out;
    out.atom.kappa = kPi * c.L * c.I_c / kFluxQuantum;
    out.atom.epsilon = 2.0 * c.E_c * (2.0 * c.n_g - 1.0);
    const double s = std::sin(c.Phi_e);
    out.atom.eta = -c.E_J * std::cos(c.Phi_x) * std::cos(c.Phi_e) * (1.0 - 2.0 * out.atom.kappa * out.atom.kappa * s * s);
    out.model = ModelParams{c.N, c.omega, c.g, inductive_coupling(c.L, c.I_c, c.Phi_e)};
    out.model.validate();
    return out;
}

RegimeReport validate_regime(const ModelParams& m, const DerivedSingleAtom& d, double tol_abs) {
    RegimeReport report;
    report.u_lt_v = m.u() < m.v;
    report.optimal_point = std::abs(d.epsilon) < tol_abs;
    report.eta_zero = std::abs(d.eta) < tol_abs;
    std::ostringstream msg;
    if (!report.u_lt_v) {
        msg << "u = g^2/omega = " << m.u() << " is not below v = " << m.v;
        report.messages.push_back(msg.str());
        msg.str("");
    }
    if (!report.optimal_point) {
        msg << "epsilon = " << d.epsilon << " is nonzero: n_g is off the optimal point 1/2";
        report.messages.push_back(msg.str());
        msg.str("");
    }
    if (!report.eta_zero) {
        msg << "eta = " << d.eta << " is nonzero: cos(Phi_x) != 0";
        report.messages.push_back(msg.str());
    }
    return report;
}

CircuitParams parse_device_file(std::string_view text) {
    static const char* const kKeys[] = {"E_c", "E_J", "n_g", "Phi_x", "Phi_e", "L", "I_c", "omega", "g", "N", "units"};
    std::map<std::string, std::pair<std::string, std::size_t>> values;

    std::size_t line_no = 0;
    for (const std::string& raw : detail::split_lines(text)) {
        ++line_no;
        const std::string line = detail::trim(detail::strip_comment(raw));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError(line_no, "expected 'key = value'");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (std::find(std::begin(kKeys), std::end(kKeys), key) == std::end(kKeys))
            throw ParseError(line_no, "unknown key '" + key + "'");
        if (values.count(key)) throw ParseError(line_no, "duplicate key '" + key + "'");
        values[key] = {value, line_no};
    }

    double frequency_scale = 1.0;
    if (auto it = values.find("units"); it != values.end()) {
        const std::string& units = it->second.first;
        if (units == "si") frequency_scale = 1.0 / kModelUnitRadPerSecond;
        else if (units == "angular_mhz") frequency_scale = 1.0;
        else if (units == "linear_mhz") frequency_scale = 2.0 * kPi;
        else throw ParseError(it->second.second, "units must be si, angular_mhz or linear_mhz, got '" + units + "'");
    }

    auto number = [&](const char* key) {
        const auto it = values.find(key);
        if (it == values.end()) throw ParseError(line_no, std::string("missing required key '") + key + "'");
        return detail::parse_double(it->second.first, it->second.second, key);
    };

    CircuitParams c;
    c.E_c = number("E_c") * frequency_scale;
    c.E_J = number("E_J") * frequency_scale;
    c.n_g = number("n_g");
    c.Phi_x = number("Phi_x");
    c.Phi_e = number("Phi_e");
    c.L = number("L");
    c.I_c = number("I_c");
    c.omega = number("omega") * frequency_scale;
    c.g = number("g") * frequency_scale;
    const auto n_it = values.find("N");
    if (n_it == values.end()) throw ParseError(line_no, "missing required key 'N'");
    c.N = detail::parse_int(n_it->second.first, n_it->second.second, "N");
    try {
        c.validate();
    } catch (const std::invalid_argument& e) {
        throw ParseError(line_no, e.what());
    }
    return c;
}

CircuitParams read_device_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open device file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_device_file(buffer.str());
}

} // namespace dicke::circuit
