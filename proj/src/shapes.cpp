#include "cvx/shapes.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <sstream>

#include "cvx/errors.hpp"

namespace cvx {

namespace {

std::string trim(std::string_view v) {
    const auto a = v.find_first_not_of(" \t");
    if (a == std::string_view::npos) return {};
    const auto b = v.find_last_not_of(" \t");
    return std::string(v.substr(a, b - a + 1));
}

std::vector<double> parse_args(const std::string& name, const std::string& args,
                               std::size_t lo, std::size_t hi) {
    std::vector<double> out;
    std::stringstream ss(args);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            std::size_t used = 0;
            const double v = std::stod(tok, &used);
            while (used < tok.size() && std::isspace(static_cast<unsigned char>(tok[used])))
                ++used;
            if (used != tok.size()) throw std::invalid_argument(tok);
            out.push_back(v);
        } catch (const std::exception&) {
            throw InvalidConfig("shape '" + name + "': bad numeric argument '" + tok + "'");
        }
    }
    if (out.size() < lo || out.size() > hi) {
        std::ostringstream msg;
        msg << "shape '" << name << "' expects " << lo;
        if (hi != lo) msg << ".." << hi;
        msg << " arguments, got " << out.size();
        throw InvalidConfig(msg.str());
    }
    return out;
}

Shape make_term(const std::string& term, int dim) {
    const auto colon = term.find(':');
    const std::string name = trim(term.substr(0, colon));
    const std::string args = colon == std::string::npos ? "" : term.substr(colon + 1);
    Shape sh;
    sh.spec = term;

    if (name == "ball") {
        const auto a = parse_args(name, args, 1, dim == 1 ? 3 : 4);
        const double r = a[0];
        if (r <= 0) throw InvalidConfig("ball radius must be positive");
        const Vec3 c{a.size() > 1 ? a[1] : 0.0, a.size() > 2 ? a[2] : 0.0,
                     a.size() > 3 ? a[3] : 0.0};
        sh.support = [r, c](const Vec3& z) { return r + dot(c, z); };
        return sh;
    }
    if (name == "ellipse" || name == "ellipsoid") {
        if (name == "ellipse" && dim != 1)
            throw InvalidConfig("use ellipsoid:a,b,c on S^2");
        if (name == "ellipsoid" && dim != 2)
            throw InvalidConfig("use ellipse:a,b on S^1");
        const auto a = parse_args(name, args, dim + 1u, dim + 1u);
        for (double ax : a)
            if (ax <= 0) throw InvalidConfig("semiaxes must be positive");
        const double ax = a[0], ay = a[1], az = dim == 2 ? a[2] : 0.0;
        sh.support = [ax, ay, az](const Vec3& z) {
            return std::sqrt(ax * ax * z.x * z.x + ay * ay * z.y * z.y +
                             az * az * z.z * z.z);
        };
        return sh;
    }
    if (name == "pcube") {
        const auto a = parse_args(name, args, 2, 2);
        const double p = a[0], scale = a[1];
        if (p <= 1.0) throw InvalidConfig("pcube exponent must exceed 1");
        if (scale <= 0) throw InvalidConfig("pcube scale must be positive");
        const double q = p / (p - 1.0);
        const bool flat = dim == 1;
        sh.support = [q, scale, flat](const Vec3& z) {
            double acc = std::pow(std::abs(z.x), q) + std::pow(std::abs(z.y), q);
            if (!flat) acc += std::pow(std::abs(z.z), q);
            return scale * std::pow(acc, 1.0 / q);
        };
        return sh;
    }
    if (name == "perturbed-ball") {
        const auto a = parse_args(name, args, 3, 3);
        const double r = a[0], amp = a[2];
        const int m = static_cast<int>(a[1]);
        if (r <= 0) throw InvalidConfig("perturbed-ball radius must be positive");
        if (m < 2 || a[1] != m)
            throw InvalidConfig("perturbed-ball mode must be an integer >= 2");
        if (dim == 1) {
            sh.support = [r, m, amp](const Vec3& z) {
                return r * (1.0 + amp * std::cos(m * std::atan2(z.y, z.x)));
            };
        } else {
            const unsigned um = static_cast<unsigned>(m);
            sh.support = [r, um, amp](const Vec3& z) {
                return r * (1.0 + amp * std::legendre(um, z.z));
            };
        }
        return sh;
    }
    throw InvalidConfig("unknown shape '" + name + "'");
}

} // namespace

Shape make_shape(std::string_view spec, int dim) {
    if (dim != 1 && dim != 2) throw InvalidConfig("shape dimension must be 1 or 2");
    // Split on top-level '+' (Minkowski sum).
    std::vector<std::string> terms;
    std::string cur;
    for (char ch : spec) {
        if (ch == '+') {
            terms.push_back(trim(cur));
            cur.clear();
        } else {
            cur += ch;
        }
    }
    terms.push_back(trim(cur));
    for (const auto& t : terms)
        if (t.empty()) throw InvalidConfig("empty term in shape '" + std::string(spec) + "'");

    std::vector<Shape> parts;
    parts.reserve(terms.size());
    for (const auto& t : terms) parts.push_back(make_term(t, dim));
    if (parts.size() == 1) return std::move(parts.front());

    Shape sum;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) sum.spec += " + ";
        sum.spec += parts[i].spec;
    }
    sum.support = [parts](const Vec3& z) {
        double acc = 0;
        for (const auto& p : parts) acc += p.support(z);
        return acc;
    };
    return sum;
}

ScalarField sample_support(const Shape& shape, const SphereGrid& g) {
    ScalarField s(g.count);
    for (std::size_t i = 0; i < g.count; ++i) s[i] = shape.support(g.node[i]);
    return s;
}

Shape random_catalog_shape(std::mt19937_64& rng, int dim) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    auto uni = [&](double a, double b) { return a + (b - a) * u01(rng); };
    std::uniform_int_distribution<int> fam(0, 4);
    std::ostringstream spec;
    spec.precision(17);
    switch (fam(rng)) {
    case 0: { // off-center ball
        const double r = uni(0.5, 2.0);
        const double off = 0.3 * r * u01(rng);
        const double ang = uni(0.0, 2.0 * std::numbers::pi);
        spec << "ball:" << r << "," << off * std::cos(ang) << ","
             << off * std::sin(ang);
        if (dim == 2) spec << "," << 0.3 * r * (u01(rng) - 0.5);
        break;
    }
    case 1: { // ellipse / ellipsoid
        spec << (dim == 1 ? "ellipse:" : "ellipsoid:") << uni(0.8, 2.2) << ","
             << uni(0.8, 2.2);
        if (dim == 2) spec << "," << uni(0.8, 2.2);
        break;
    }
    case 2: { // l^p unit ball; its dual-norm support Hessian blows up on the
              // coordinate circles, so only p = 4 stays resolvable on S^2
        static const int ps[] = {4, 6, 8};
        const int p =
            dim == 1 ? ps[std::uniform_int_distribution<int>(0, 2)(rng)] : 4;
        spec << "pcube:" << p << "," << uni(0.7, 1.5);
        break;
    }
    case 3: { // perturbed ball, amplitude kept convexity-safe
        const int m = std::uniform_int_distribution<int>(2, 4)(rng);
        const double cap =
            dim == 1 ? 0.8 / (m * m - 1.0) : 0.5 / (m * (m + 1.0));
        spec << "perturbed-ball:" << uni(0.8, 1.5) << "," << m << ","
             << uni(0.2, 1.0) * cap;
        break;
    }
    default: { // Minkowski sum of a ball and an ellipse/ellipsoid
        spec << "ball:" << uni(0.3, 1.0) << " + "
             << (dim == 1 ? "ellipse:" : "ellipsoid:") << uni(0.8, 1.8) << ","
             << uni(0.8, 1.8);
        if (dim == 2) spec << "," << uni(0.8, 1.8);
        break;
    }
    }
    return make_shape(spec.str(), dim);
}

std::vector<std::string> catalog_summary() {
    return {
        "ball:r[,cx,cy[,cz]]      ball of radius r, optionally off-center",
        "ellipse:a,b              (S^1) ellipse with the given semiaxes",
        "ellipsoid:a,b,c          (S^2) ellipsoid with the given semiaxes",
        "pcube:p,scale            unit l^p ball scaled; support is the dual l^q norm",
        "perturbed-ball:r,m,amp   cosine (S^1) or zonal Legendre (S^2) perturbation",
        "A + B                    Minkowski sum of catalog entries (supports add)",
    };
}

} // namespace cvx
