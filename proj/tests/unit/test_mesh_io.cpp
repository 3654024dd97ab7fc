#include <catch_amalgamated.hpp>

#include "soliton_forge/io.hpp"
#include "soliton_forge/mesh.hpp"

#include <cmath>
#include <filesystem>

using namespace soliton_forge;
using Catch::Approx;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
    const auto dir = fs::temp_directory_path() / "soliton_forge_mesh_io";
    fs::create_directories(dir);
    return dir;
}

ProfileCurve bowl(double K, int n = 2, double r_max = 4.0) {
    StopPolicy stop;
    stop.r_max = r_max;
    return solve_bowl({1.0, n, Family::bowl, 0.0, make_builtin_warp_ptr(WarpKind::rotational, K)}, stop);
}

ProfileCurve wing(double K, double eps, int branch = -1) {
    StopPolicy stop;
    stop.r_max = 4.0;
    return solve_wing({1.0, 2, Family::wing, eps, make_builtin_warp_ptr(WarpKind::rotational, K)}, branch,
                      stop);
}

}  // namespace

TEST_CASE("bowl mesh is a disk", "[mesh]") {
    const auto curve = bowl(0.0);
    const auto mesh = revolve_profile(curve, {32});
    CHECK(mesh.faces_valid());
    CHECK(mesh.euler_characteristic() == 1);
    REQUIRE(curve.size() <= 400);
    CHECK(mesh.vertices.size() == 1 + (curve.size() - 1) * 32);
    // axis vertex at (t0, 0, 0)
    CHECK(mesh.vertices.front()[0] == 0.0);
    CHECK(mesh.vertices.front()[1] == 0.0);
    CHECK(mesh.vertices.front()[2] == 0.0);
    CHECK_FALSE(mesh.equatorial_slice);
}

TEST_CASE("wing mesh is an annulus with inner radius epsilon", "[mesh]") {
    const auto mesh = revolve_profile(wing(0.0, 0.75), {24});
    CHECK(mesh.euler_characteristic() == 0);
    double inner = 1e9;
    for (const auto& v : mesh.vertices) inner = std::min(inner, std::hypot(v[1], v[2]));
    CHECK(inner == Approx(0.75).epsilon(1e-12));

    const auto joined = join_wing_branches(wing(-1.0, 0.5, 1), wing(-1.0, 0.5, -1));
    CHECK(revolve_profile(joined, {16}).euler_characteristic() == 0);
}

TEST_CASE("charts", "[mesh]") {
    const auto curve = bowl(-1.0);
    const auto cyl = revolve_profile(curve, {16, MeshChart::cylindrical});
    const auto disk = revolve_profile(curve, {16, MeshChart::poincare_disk});
    const auto hyp = revolve_profile(curve, {16, MeshChart::hyperboloid});
    REQUIRE(cyl.vertices.size() == disk.vertices.size());
    for (std::size_t i = 1; i < cyl.vertices.size(); i += 37) {
        const double r = cyl.attributes[i].r;
        CHECK(std::hypot(disk.vertices[i][1], disk.vertices[i][2]) == Approx(std::tanh(r / 2)));
        CHECK(std::hypot(hyp.vertices[i][1], hyp.vertices[i][2]) == Approx(std::sinh(r)));
        CHECK(disk.vertices[i][0] == cyl.vertices[i][0]);
    }
    for (const auto& v : disk.vertices) CHECK(std::hypot(v[1], v[2]) < 1.0);

    CHECK_THROWS_AS(revolve_profile(bowl(0.0), {16, MeshChart::poincare_disk}), std::invalid_argument);
    CHECK(mesh_chart_from_string("poincare") == MeshChart::poincare_disk);
    CHECK_THROWS(mesh_chart_from_string("klein"));
}

TEST_CASE("mesh options and limits", "[mesh]") {
    CHECK_THROWS_AS(revolve_profile(bowl(0.0), {4}), std::invalid_argument);

    const auto big = bowl(-1.0, 2, 40.0);
    REQUIRE(big.size() > 100);
    const auto mesh = revolve_profile(big, {8, MeshChart::cylindrical, 100});
    CHECK(mesh.vertices.size() == 1 + 99 * 8);
    CHECK(mesh.euler_characteristic() == 1);

    const auto slice = revolve_profile(bowl(-1.0, 3), {16});
    CHECK(slice.equatorial_slice);
    CHECK(mesh_obj(slice).find("equatorial slice") != std::string::npos);
}

TEST_CASE("OBJ export", "[io]") {
    const auto dir = scratch_dir();
    const auto mesh = revolve_profile(bowl(0.0), {16});
    const auto path = dir / "bowl.obj";
    write_text_file(path, mesh_obj(mesh, {"test header"}));
    const auto counts = read_obj_counts(path);
    CHECK(counts.vertices == mesh.vertices.size());
    CHECK(counts.faces == mesh.faces.size());

    const auto text = read_text_file(path);
    CHECK(text.rfind("# test header\n# chart cylindrical\n", 0) == 0);
    CHECK(text.find("\nf 1 2 3\n") != std::string::npos);

    // byte-identical across runs
    const auto again = revolve_profile(bowl(0.0), {16});
    CHECK(mesh_obj(again, {"test header"}) == text);

    CHECK_THROWS_WITH(mesh_obj(SolitonMesh{}), "nothing to export");
    CHECK_THROWS_AS(write_text_file(dir / "missing" / "x.obj", "x"), IoError);
    CHECK_THROWS_AS(read_text_file(dir / "missing.obj"), IoError);
}

TEST_CASE("CSV round trips", "[io]") {
    const auto dir = scratch_dir();
    const auto curve = bowl(-1.0);

    write_text_file(dir / "bowl.csv", profile_csv(curve));
    const auto back = read_profile_csv(dir / "bowl.csv");
    REQUIRE(back.size() == curve.size());
    for (std::size_t i = 0; i < back.size(); ++i) {
        const auto st = curve.sample(i);
        CHECK(back[i].s == st.s);
        CHECK(back[i].r == st.r);
        CHECK(back[i].t == st.t);
        CHECK(back[i].phi == st.phi);
    }
    CHECK(read_text_file(dir / "bowl.csv").rfind("s,r,t,phi\n", 0) == 0);
    CHECK(format_double(0.1) == "0.10000000000000001");

    std::vector<HeightPoint> pts = {{radial_point(2, 0.5), 1.25}, {lorentz_origin(2), -3.0}};
    write_text_file(dir / "pts.csv", points_csv(pts));
    const auto pback = read_points_csv(dir / "pts.csv");
    REQUIRE(pback.size() == 2);
    CHECK((pback[0].p - pts[0].p).norm() == 0.0);
    CHECK(pback[1].height == -3.0);

    auto state = make_flow_grid(1.0, 2, make_builtin_warp_ptr(WarpKind::rotational, 0.0), 2.0, 21);
    for (std::size_t i = 0; i < state.size(); ++i) state.u[i] = 0.5 * state.r[i];
    state.tau = 0.125;
    write_text_file(dir / "snap.csv", snapshot_csv(state));
    auto other = make_flow_grid(1.0, 2, state.warp, 2.0, 21);
    read_snapshot_csv(dir / "snap.csv", other);
    CHECK(other.u == state.u);
    auto wrong = make_flow_grid(1.0, 2, state.warp, 2.0, 11);
    CHECK_THROWS_AS(read_snapshot_csv(dir / "snap.csv", wrong), IoError);

    write_text_file(dir / "bad.csv", "s,r,t\n1,2,3\n");
    CHECK_THROWS_AS(read_profile_csv(dir / "bad.csv"), IoError);
}

TEST_CASE("JSON descriptions", "[io]") {
    const auto curve = bowl(-1.0);
    const auto meta = profile_metadata(curve);
    CHECK(meta["spec"]["family"] == "bowl");
    CHECK(meta["termination"] == "max_radius");
    const auto spec = spec_from_json(meta["spec"]);
    CHECK(spec.c == 1.0);
    CHECK(spec.warp->builtin_curvature() == -1.0);
    CHECK(spec.warp->kind() == WarpKind::rotational);

    CHECK(json_number(std::nan("")).is_null());
    const auto d = map_descriptor_from_json(json::parse(R"({"type": "parabolic", "param": 0.7})"));
    CHECK(d.type == "parabolic");
    CHECK(d.param == 0.7);

    // a user table sampled from sinh reproduces the builtin model between rows
    json table = json::array();
    for (int i = 0; i <= 200; ++i) {
        const double r = 0.025 * i;
        table.push_back({{"r", r}, {"xi", std::sinh(r)}, {"dxi", std::cosh(r)}, {"ddxi", std::sinh(r)}});
    }
    const auto user = warp_from_json({{"kind", "rotational"}, {"table", table}});
    CHECK(user.xi(1.2345) == Approx(std::sinh(1.2345)).epsilon(1e-12));
    CHECK(radial_curvature(user, 2.01) == Approx(-1.0).epsilon(1e-8));
    CHECK(validate_warp(user, {0.5, 1.0, 4.9}).empty());
    CHECK_THROWS_AS(warp_from_json({{"kind", "rotational"}, {"table", table}, {"interpolation", "linear"}}),
                    std::invalid_argument);

    DiagnosticsReport rep;
    rep.add(not_applicable("x", "y"));
    const auto j = to_json(rep);
    CHECK(j.dump() == to_json(rep).dump());
}
