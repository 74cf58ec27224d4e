#include "cvx/config.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "cvx/errors.hpp"
#include "cvx/support_geometry.hpp"

namespace cvx {

namespace {

std::string trim(const std::string& v) {
    const auto a = v.find_first_not_of(" \t\r");
    if (a == std::string::npos) return {};
    const auto b = v.find_last_not_of(" \t\r");
    return v.substr(a, b - a + 1);
}

[[noreturn]] void bad(int line, const std::string& key, const std::string& what) {
    std::ostringstream msg;
    msg << "config line " << line << ", key '" << key << "': " << what;
    throw InvalidConfig(msg.str());
}

double num(int line, const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const double x = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        bad(line, key, "expected a number, got '" + v + "'");
    }
}

long integer(int line, const std::string& key, const std::string& v) {
    const double x = num(line, key, v);
    const long i = static_cast<long>(x);
    if (x != i) bad(line, key, "expected an integer, got '" + v + "'");
    return i;
}

bool onoff(int line, const std::string& key, const std::string& v) {
    if (v == "on" || v == "true" || v == "1") return true;
    if (v == "off" || v == "false" || v == "0") return false;
    bad(line, key, "expected on/off, got '" + v + "'");
}

} // namespace

FlowConfig parse_config(const std::string& text) {
    FlowConfig c;
    bool saw_alpha = false, saw_mu = false;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const std::string s = trim(raw);
        if (s.empty()) continue;
        const auto eq = s.find('=');
        if (eq == std::string::npos) {
            std::ostringstream msg;
            msg << "config line " << line << ": expected key = value, got '" << s
                << "'";
            throw InvalidConfig(msg.str());
        }
        const std::string key = trim(s.substr(0, eq));
        const std::string val = trim(s.substr(eq + 1));
        if (val.empty()) bad(line, key, "empty value");
        if (key == "n") {
            c.n = static_cast<int>(integer(line, key, val));
            if (c.n != 1 && c.n != 2) bad(line, key, "n must be 1 or 2");
        } else if (key == "k") {
            c.k = static_cast<int>(integer(line, key, val));
            if (c.k < 1) bad(line, key, "k must be at least 1");
        } else if (key == "alpha") {
            c.alpha = num(line, key, val);
            if (!(c.alpha > 0)) bad(line, key, "alpha must be positive");
            saw_alpha = true;
        } else if (key == "mu") {
            c.mu_name = val;
            c.homogeneous = false;
            saw_mu = true;
        } else if (key == "constraint") {
            c.constraint = val;
        } else if (key == "resolution") {
            c.resolution = val;
        } else if (key == "cfl") {
            c.cfl = num(line, key, val);
            if (!(c.cfl > 0) || c.cfl >= 0.5)
                bad(line, key, "cfl must lie in (0, 0.5)");
        } else if (key == "projection") {
            c.projection = onoff(line, key, val);
        } else if (key == "tol_conv") {
            c.tol_conv = num(line, key, val);
            if (!(c.tol_conv > 0)) bad(line, key, "tol_conv must be positive");
        } else if (key == "t_max") {
            c.t_max = num(line, key, val);
            if (!(c.t_max > 0)) bad(line, key, "t_max must be positive");
        } else if (key == "snapshot_every") {
            const long v = integer(line, key, val);
            if (v < 1) bad(line, key, "snapshot_every must be at least 1");
            c.snapshot_every = static_cast<std::size_t>(v);
        } else if (key == "out_dir") {
            c.out_dir = val;
        } else if (key == "seed") {
            const long v = integer(line, key, val);
            if (v < 0) bad(line, key, "seed must be nonnegative");
            c.seed = static_cast<std::uint64_t>(v);
        } else if (key == "shape") {
            c.shape = val;
        } else {
            bad(line, key, "unknown key");
        }
        if (saw_alpha && saw_mu)
            bad(line, key, "alpha and mu are mutually exclusive");
    }
    if (c.k > c.n) throw InvalidConfig("k must not exceed n");
    // Validate the composite fields eagerly for early error messages.
    make_shape(c.shape, c.n);
    if (!c.homogeneous) SpeedSpec::from_catalog(c.k, c.mu_name);
    return c;
}

FlowConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidConfig("cannot read config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string render_config(const FlowConfig& c) {
    std::ostringstream out;
    out.precision(17);
    out << "n = " << c.n << "\n";
    out << "k = " << c.k << "\n";
    if (c.homogeneous)
        out << "alpha = " << c.alpha << "\n";
    else
        out << "mu = " << c.mu_name << "\n";
    out << "constraint = " << c.constraint << "\n";
    out << "resolution = " << c.resolution << "\n";
    out << "cfl = " << c.cfl << "\n";
    out << "projection = " << (c.projection ? "on" : "off") << "\n";
    out << "tol_conv = " << c.tol_conv << "\n";
    out << "t_max = " << c.t_max << "\n";
    out << "snapshot_every = " << c.snapshot_every << "\n";
    out << "out_dir = " << c.out_dir << "\n";
    out << "seed = " << c.seed << "\n";
    out << "shape = " << c.shape << "\n";
    return out.str();
}

namespace {

ConstraintSpec parse_constraint(const std::string& v) {
    if (v == "volume") return ConstraintSpec::volume();
    if (v == "quermass") return ConstraintSpec::quermass();
    if (v.rfind("general:", 0) == 0) {
        const std::string arg = v.substr(8);
        try {
            std::size_t used = 0;
            const double theta = std::stod(arg, &used);
            if (used != arg.size()) throw std::invalid_argument(arg);
            return ConstraintSpec::general(theta);
        } catch (const InvalidConfig&) {
            throw;
        } catch (const std::exception&) {
            throw InvalidConfig("bad constraint exponent '" + arg + "'");
        }
    }
    if (v.rfind("external:", 0) == 0) {
        const std::string arg = v.substr(9);
        try {
            std::size_t used = 0;
            const double scale = std::stod(arg, &used);
            if (used != arg.size()) throw std::invalid_argument(arg);
            return ConstraintSpec::external(scale);
        } catch (const std::exception&) {
            throw InvalidConfig("bad external forcing scale '" + arg + "'");
        }
    }
    throw InvalidConfig("unknown constraint '" + v + "'");
}

SphereGrid parse_resolution(int n, const std::string& v) {
    const auto x = v.find('x');
    try {
        if (n == 1) {
            if (x != std::string::npos)
                throw InvalidConfig("resolution for n = 1 is a single count");
            return SphereGrid::circle(static_cast<std::size_t>(std::stoul(v)));
        }
        if (x == std::string::npos)
            return SphereGrid::sphere(static_cast<std::size_t>(std::stoul(v)));
        const auto lat = std::stoul(v.substr(0, x));
        const auto lon = std::stoul(v.substr(x + 1));
        return SphereGrid::sphere(lat, lon);
    } catch (const FlowError&) {
        throw;
    } catch (const std::exception&) {
        throw InvalidConfig("bad resolution '" + v + "'");
    }
}

// Relative quadrature error estimate: Richardson comparison of the
// quermassintegrals against the half-resolution grid at t = 0.
double quadrature_error(const SphereGrid& fine, const Shape& shape,
                        const ScalarField& s0) {
    SymField tau;
    RadiiField radii;
    tau_and_radii(fine, s0, tau, radii);
    const Quermass qf = quermassintegrals(fine, s0, radii);
    const SphereGrid coarse = fine.coarsened();
    const ScalarField sc = sample_support(shape, coarse);
    tau_and_radii(coarse, sc, tau, radii);
    const Quermass qc = quermassintegrals(coarse, sc, radii);
    double worst = 0;
    for (int j = 1; j <= fine.dim + 1; ++j)
        worst = std::max(worst, std::abs(qf.V[j] - qc.V[j]) / std::abs(qf.V[j]));
    return worst;
}

} // namespace

Assembled assemble(const FlowConfig& c) {
    Assembled a;
    a.grid = parse_resolution(c.n, c.resolution);
    a.shape = make_shape(c.shape, c.n);
    a.s0 = sample_support(a.shape, a.grid);
    a.params.speed = c.homogeneous ? SpeedSpec::power(c.k, c.alpha)
                                   : SpeedSpec::from_catalog(c.k, c.mu_name);
    a.params.constraint = parse_constraint(c.constraint);
    a.params.cfl = c.cfl;
    a.params.projection = c.projection;
    a.params.tol_conv = c.tol_conv;
    a.params.t_max = c.t_max;
    a.params.snapshot_every = c.snapshot_every;
    a.params.seed = c.seed;
    a.params.eps_quad = quadrature_error(a.grid, a.shape, a.s0);
    return a;
}

} // namespace cvx
