#include "cvx/io.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cvx/errors.hpp"
#include "cvx/mixed_volumes.hpp"
#include "cvx/support_geometry.hpp"

namespace cvx {

namespace {

std::ofstream open_out(const std::string& path) {
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(parent, ec);
    }
    std::ofstream out(path);
    if (!out) throw FlowError("cannot write '" + path + "'");
    out.precision(17);
    return out;
}

} // namespace

void export_timeseries(const Trajectory& traj, const std::string& path) {
    if (traj.rec.empty())
        throw FlowError("trajectory has no records to export");
    auto out = open_out(path);
    const int n = traj.n;
    out << "t";
    for (int j = 0; j <= n + 1; ++j) out << ",V" << j;
    for (int j = 1; j <= n + 1; ++j) out << ",r" << j;
    out << ",I_iso,phi,Ek_min,Ek_max,rho_minus,rho_plus,steiner_x,steiner_y";
    if (n == 2) out << ",steiner_z";
    out << ",d_ball,tso_W,ekflat\n";
    for (const DiagRecord& r : traj.rec) {
        out << r.t;
        for (int j = 0; j <= n + 1; ++j) out << ',' << r.Q.V[j];
        for (int j = 1; j <= n + 1; ++j) out << ',' << r.r[j - 1];
        out << ',' << r.I_iso << ',' << r.phi << ',' << r.ek_min << ','
            << r.ek_max << ',' << r.rho_minus << ',' << r.rho_plus << ','
            << r.steiner.x << ',' << r.steiner.y;
        if (n == 2) out << ',' << r.steiner.z;
        out << ',' << r.d_ball << ',' << r.tso_W << ',' << r.ekflat << '\n';
    }
    if (!out) throw FlowError("write failed for '" + path + "'");
}

void export_svg(const SphereGrid& g, const ScalarField& s,
                const std::string& path) {
    if (g.dim != 1) throw InvalidConfig("svg export is for plane curves only");
    const auto X = embed_boundary(g, s);
    const BallDeviation b = ball_deviation(g, s);
    double xmin = X[0].x, xmax = X[0].x, ymin = X[0].y, ymax = X[0].y;
    for (const Vec3& p : X) {
        xmin = std::min(xmin, p.x);
        xmax = std::max(xmax, p.x);
        ymin = std::min(ymin, p.y);
        ymax = std::max(ymax, p.y);
    }
    const double margin = 0.05 * std::max(xmax - xmin, ymax - ymin);
    xmin -= margin;
    xmax += margin;
    ymin -= margin;
    ymax += margin;
    auto out = open_out(path);
    out.precision(8);
    // y is negated so the mathematical orientation matches screen coordinates.
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << xmin << ' '
        << -ymax << ' ' << (xmax - xmin) << ' ' << (ymax - ymin) << "\">\n";
    out << "<polygon fill=\"none\" stroke=\"black\" stroke-width=\""
        << 0.004 * (xmax - xmin) << "\" points=\"";
    for (std::size_t i = 0; i < X.size(); ++i) {
        if (i) out << ' ';
        out << X[i].x << ',' << -X[i].y;
    }
    out << "\"/>\n";
    out << "<circle fill=\"none\" stroke=\"#888\" stroke-dasharray=\""
        << 0.02 * (xmax - xmin) << "\" stroke-width=\"" << 0.003 * (xmax - xmin)
        << "\" cx=\"" << b.steiner.x << "\" cy=\"" << -b.steiner.y << "\" r=\""
        << b.rhat << "\"/>\n";
    out << "</svg>\n";
    if (!out) throw FlowError("write failed for '" + path + "'");
}

namespace {

// Pole vertex by linear extrapolation in cos(theta) of the ring means of the
// embedded coordinates; the O(1 - cos theta) term of a smooth ring mean
// cancels, and the result is exact for balls.
Vec3 pole_vertex(const SphereGrid& g, const std::vector<Vec3>& X,
                 std::size_t ring0, std::size_t ring1, double target_cos) {
    const std::size_t P = g.nlon;
    Vec3 m0{}, m1{};
    for (std::size_t j = 0; j < P; ++j) {
        m0 += X[ring0 * P + j];
        m1 += X[ring1 * P + j];
    }
    m0 *= 1.0 / static_cast<double>(P);
    m1 *= 1.0 / static_cast<double>(P);
    const double c0 = g.costh[ring0], c1 = g.costh[ring1];
    const double w = (target_cos - c1) / (c0 - c1);
    return m1 + (m0 - m1) * w;
}

} // namespace

void export_mesh(const SphereGrid& g, const ScalarField& s,
                 const std::string& path) {
    if (g.dim != 2) throw InvalidConfig("mesh export is for surfaces only");
    const auto X = embed_boundary(g, s);
    const std::size_t L = g.nlat, P = g.nlon;
    const Vec3 north = pole_vertex(g, X, 0, 1, 1.0);
    const Vec3 south = pole_vertex(g, X, L - 1, L - 2, -1.0);
    auto out = open_out(path);
    for (const Vec3& p : X)
        out << "v " << p.x << ' ' << p.y << ' ' << p.z << '\n';
    out << "v " << north.x << ' ' << north.y << ' ' << north.z << '\n';
    out << "v " << south.x << ' ' << south.y << ' ' << south.z << '\n';
    const auto id = [P](std::size_t i, std::size_t j) {
        return i * P + (j % P) + 1; // OBJ indices are 1-based
    };
    const std::size_t north_id = L * P + 1, south_id = L * P + 2;
    for (std::size_t j = 0; j < P; ++j)
        out << "f " << north_id << ' ' << id(0, j) << ' ' << id(0, j + 1) << '\n';
    for (std::size_t i = 0; i + 1 < L; ++i)
        for (std::size_t j = 0; j < P; ++j) {
            out << "f " << id(i, j) << ' ' << id(i + 1, j) << ' '
                << id(i + 1, j + 1) << '\n';
            out << "f " << id(i, j) << ' ' << id(i + 1, j + 1) << ' '
                << id(i, j + 1) << '\n';
        }
    for (std::size_t j = 0; j < P; ++j)
        out << "f " << south_id << ' ' << id(L - 1, j + 1) << ' '
            << id(L - 1, j) << '\n';
    if (!out) throw FlowError("write failed for '" + path + "'");
}

} // namespace cvx
