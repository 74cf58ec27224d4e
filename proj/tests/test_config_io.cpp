#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cvx/config.hpp"
#include "cvx/errors.hpp"
#include "cvx/flow.hpp"
#include "cvx/io.hpp"
#include "cvx/shapes.hpp"
#include "doctest.h"

using namespace cvx;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::istringstream in(line);
    std::string tok;
    while (std::getline(in, tok, sep)) out.push_back(tok);
    return out;
}

struct TempDir {
    std::filesystem::path p;
    TempDir() : p(std::filesystem::temp_directory_path() / "cvx_io_test") {
        std::filesystem::create_directories(p);
    }
    ~TempDir() { std::filesystem::remove_all(p); }
    std::string file(const std::string& name) const { return (p / name).string(); }
};

} // namespace

TEST_CASE("config parsing") {
    const auto c = parse_config("n = 1\n"
                                "k = 1\n"
                                "# comment line\n"
                                "alpha = 2.0   # trailing comment\n"
                                "constraint = general:0.25\n"
                                "resolution = 128\n"
                                "cfl = 0.1\n"
                                "projection = off\n"
                                "shape = ellipse:2,1\n");
    CHECK(c.n == 1);
    CHECK(c.alpha == 2.0);
    CHECK(c.constraint == "general:0.25");
    CHECK(c.cfl == 0.1);
    CHECK(!c.projection);
    CHECK(c.shape == "ellipse:2,1");
    CHECK(c.tol_conv == 1e-4); // default survives

    const auto d = parse_config(""); // all defaults
    CHECK(d.n == 1);
    CHECK(d.k == 1);
    CHECK(d.homogeneous);
    CHECK(d.shape == "ball:1.3");
}

TEST_CASE("config round-trips through its rendering") {
    auto c = parse_config("n = 2\nk = 2\nalpha = 0.5\nresolution = 24x48\n"
                          "shape = ellipsoid:1.5,1.2,1.0\nseed = 9\n"
                          "t_max = 12.5\n");
    const auto c2 = parse_config(render_config(c));
    CHECK(render_config(c2) == render_config(c));
    CHECK(c2.n == 2);
    CHECK(c2.seed == 9);
    CHECK(c2.t_max == 12.5);
}

TEST_CASE("config rejects bad input") {
    CHECK_THROWS_AS(parse_config("unknown_key = 3\n"), InvalidConfig);
    CHECK_THROWS_AS(parse_config("n = 3\n"), InvalidConfig);
    CHECK_THROWS_AS(parse_config("n = 1\nk = 2\n"), InvalidConfig);
    CHECK_THROWS_AS(parse_config("alpha = -1\n"), InvalidConfig);
    CHECK_THROWS_AS(parse_config("alpha = 1\nmu = z+z^3\n"), InvalidConfig);
    CHECK_THROWS_AS(parse_config("cfl = 0.6\n"), InvalidConfig);
    CHECK_THROWS_AS(parse_config("just words\n"), InvalidConfig);
    CHECK_THROWS_AS(parse_config("shape = frustum:1\n"), InvalidConfig);
    CHECK_THROWS_AS(parse_config("mu = nope\n"), InvalidConfig);
    CHECK_THROWS_AS(parse_config_file("/nonexistent/path.cfg"), InvalidConfig);
    // the error message names the offending key and line
    try {
        parse_config("n = 1\nbogus = 2\n");
        FAIL("expected InvalidConfig");
    } catch (const InvalidConfig& e) {
        const std::string msg = e.what();
        CHECK(msg.find("bogus") != std::string::npos);
        CHECK(msg.find("line 2") != std::string::npos);
    }
}

TEST_CASE("assembly wires the configuration together") {
    auto c = parse_config("n = 1\nresolution = 128\nshape = ellipse:2,1\n"
                          "constraint = quermass\ncfl = 0.15\n");
    const auto a = assemble(c);
    CHECK(a.grid.count == 128);
    CHECK(a.s0.size() == 128);
    CHECK(a.params.cfl == 0.15);
    CHECK(a.params.constraint.kind == ConstraintKind::Quermass);
    CHECK(std::isfinite(a.params.eps_quad));
    CHECK(a.params.eps_quad > 0);
    CHECK(a.params.eps_quad < 1e-2);

    auto c2 = parse_config("n = 2\nresolution = 12x28\nshape = ball:1.3\n");
    const auto a2 = assemble(c2);
    CHECK(a2.grid.nlat == 12);
    CHECK(a2.grid.nlon == 28);
    // mu catalog goes through the assembly too
    auto c3 = parse_config("mu = z+z^3\nshape = ellipse:2,1\n");
    const auto a3 = assemble(c3);
    CHECK(!a3.params.speed.homogeneous);
    CHECK(a3.params.speed.value(2.0) == doctest::Approx(10.0));
}

TEST_CASE("time series export") {
    TempDir tmp;
    const auto g = SphereGrid::circle(128);
    FlowParams p;
    p.speed = SpeedSpec::power(1, 1.0);
    p.constraint = ConstraintSpec::volume();
    p.tol_conv = 1e-3;
    p.snapshot_every = 100;
    p.full_every = 2;
    FlowEngine eng(g, p, sample_support(make_shape("ellipse:1.5,1", 1), g));
    const auto res = eng.run();
    REQUIRE(res.traj.rec.size() >= 3);

    const auto csv = tmp.file("ts.csv");
    export_timeseries(res.traj, csv);
    const auto text = slurp(csv);
    const auto lines = split(text, '\n');
    REQUIRE(lines.size() >= res.traj.rec.size() + 1);
    CHECK(lines[0] ==
          "t,V0,V1,V2,r1,r2,I_iso,phi,Ek_min,Ek_max,rho_minus,rho_plus,"
          "steiner_x,steiner_y,d_ball,tso_W,ekflat");
    // 17 significant digits round-trip exactly
    const auto row = split(lines[1], ',');
    REQUIRE(row.size() == 17);
    CHECK(std::stod(row[0]) == res.traj.rec[0].t);
    CHECK(std::stod(row[2]) == res.traj.rec[0].Q.V[1]);
    CHECK(std::stod(row[7]) == res.traj.rec[0].phi);
    CHECK(std::stod(row[10]) == res.traj.rec[0].rho_minus); // full record
    // a cheap record carries nan in the deep columns
    bool saw_cheap = false, cheap_all_nan = true;
    for (std::size_t i = 0; i < res.traj.rec.size(); ++i)
        if (!res.traj.rec[i].full) {
            saw_cheap = true;
            cheap_all_nan &= std::isnan(std::stod(split(lines[1 + i], ',')[10]));
        }
    CHECK(saw_cheap);
    CHECK(cheap_all_nan);

    Trajectory empty;
    CHECK_THROWS_AS(export_timeseries(empty, tmp.file("none.csv")), FlowError);
}

TEST_CASE("svg export of a plane curve") {
    TempDir tmp;
    const auto g = SphereGrid::circle(256);
    const auto s = sample_support(make_shape("ellipse:2,1", 1), g);
    const auto path = tmp.file("curve.svg");
    export_svg(g, s, path);
    const auto text = slurp(path);
    CHECK(text.find("<svg") != std::string::npos);
    CHECK(text.find("<polygon") != std::string::npos);
    CHECK(text.find("<circle") != std::string::npos);
    // viewBox spans the 4 x 2 extent plus a 5% margin on each side
    const auto vb = text.find("viewBox=\"");
    REQUIRE(vb != std::string::npos);
    const auto rest = text.substr(vb + 9);
    const auto nums = split(rest.substr(0, rest.find('"')), ' ');
    REQUIRE(nums.size() == 4);
    CHECK(std::stod(nums[2]) == doctest::Approx(4.4).epsilon(1e-2));
    CHECK(std::stod(nums[3]) == doctest::Approx(2.4).epsilon(1e-2));

    const auto g2 = SphereGrid::sphere(8);
    CHECK_THROWS_AS(
        export_svg(g2, sample_support(make_shape("ball:1", 2), g2), path),
        InvalidConfig);
}

TEST_CASE("mesh export of a surface") {
    TempDir tmp;
    const auto g = SphereGrid::sphere(16);
    const Vec3 c{0.1, -0.05, 0.2};
    const auto s = sample_support(make_shape("ball:1.3,0.1,-0.05,0.2", 2), g);
    const auto path = tmp.file("surface.obj");
    export_mesh(g, s, path);

    std::ifstream in(path);
    REQUIRE(in.good());
    std::vector<Vec3> verts;
    std::vector<std::size_t> face_ids;
    std::string kind;
    while (in >> kind) {
        if (kind == "v") {
            Vec3 v;
            in >> v.x >> v.y >> v.z;
            verts.push_back(v);
        } else if (kind == "f") {
            std::size_t a, b, cc;
            in >> a >> b >> cc;
            face_ids.insert(face_ids.end(), {a, b, cc});
        }
    }
    const std::size_t V = verts.size(), F = face_ids.size() / 3, E = 3 * F / 2;
    for (std::size_t id : face_ids) {
        REQUIRE(id >= 1);
        REQUIRE(id <= V);
    }
    CHECK(V == 16 * 32 + 2);
    CHECK(F == 2 * 16 * 32);
    CHECK(static_cast<long>(V) - static_cast<long>(E) + static_cast<long>(F) == 2);
    // every vertex of the ball mesh, poles included, sits on the sphere
    for (const Vec3& v : verts)
        CHECK(norm(v - c) == doctest::Approx(1.3).epsilon(1e-10));

    const auto g1 = SphereGrid::circle(64);
    CHECK_THROWS_AS(
        export_mesh(g1, sample_support(make_shape("ball:1", 1), g1), path),
        InvalidConfig);
}
