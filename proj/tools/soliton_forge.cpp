// soliton-forge: solve, verify, flow, transform and sweep translating solitons.
//
// Exit status: 0 success, 1 usage or runtime error, 2 a verification check failed.

#include <CLI11.hpp>

#include <soliton_forge/diagnostics.hpp>
#include <soliton_forge/flow.hpp>
#include <soliton_forge/graph.hpp>
#include <soliton_forge/io.hpp>
#include <soliton_forge/lorentz.hpp>
#include <soliton_forge/mesh.hpp>
#include <soliton_forge/profile.hpp>
#include <soliton_forge/warp.hpp>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <thread>

namespace fs = std::filesystem;
using namespace soliton_forge;

namespace {

constexpr int kVerifyFailed = 2;

struct GlobalOptions {
    std::string config;
    std::string out = ".";
    double tol_rel = IntegratorOptions{}.rel_tol;
    double tol_abs = IntegratorOptions{}.abs_tol;
    std::uint64_t seed = 20240611;
};

struct SpecOptions {
    double K = 0.0;
    int n = 2;
    double c = 1.0;
    double epsilon = 0.0;
    double r_max = 10.0;
    std::string warp_file;
};

void add_spec_flags(CLI::App* app, SpecOptions& s) {
    app->add_option("--K", s.K, "sectional curvature of the builtin base (<= 0)")->capture_default_str();
    app->add_option("--n", s.n, "dimension of the base")->capture_default_str();
    app->add_option("--c", s.c, "soliton speed")->capture_default_str();
    app->add_option("--epsilon", s.epsilon, "wing radius / ideal family parameter");
    app->add_option("--r-max", s.r_max, "radius at which solves stop")->capture_default_str();
    app->add_option("--warp", s.warp_file, "user warp JSON table")->check(CLI::ExistingFile);
}

IntegratorOptions integrator(const GlobalOptions& g) {
    IntegratorOptions o;
    o.rel_tol = g.tol_rel;
    o.abs_tol = g.tol_abs;
    return o;
}

WarpPtr make_warp(const SpecOptions& s, WarpKind kind) {
    if (!s.warp_file.empty()) {
        auto w = std::make_shared<const WarpModel>(warp_from_json(json::parse(read_text_file(s.warp_file))));
        if (w->kind() != kind)
            throw std::invalid_argument("warp table has kind " + std::string(to_string(w->kind())) +
                                        ", expected " + to_string(kind));
        return w;
    }
    return make_builtin_warp_ptr(kind, s.K);
}

SolitonSpec make_spec(const SpecOptions& s, Family family) {
    WarpKind kind = WarpKind::rotational;
    if (family == Family::ideal) kind = WarpKind::busemann;
    if (family == Family::grim) kind = WarpKind::equidistant;
    SolitonSpec spec{s.c, s.n, family, s.epsilon, make_warp(s, kind)};
    spec.validate();
    return spec;
}

StopPolicy stop_policy(const SpecOptions& s) {
    StopPolicy st;
    st.r_max = s.r_max;
    return st;
}

fs::path output_dir(const GlobalOptions& g) {
    fs::path out(g.out);
    fs::create_directories(out);
    return out;
}

/// Fills options not given on the command line from `cfg`; keys are long
/// option names. A nested object under the subcommand's name wins over
/// top-level keys.
void apply_config(CLI::App* app, const json& cfg) {
    auto apply = [&](const json& obj) {
        for (auto* opt : app->get_options()) {
            const auto& name = opt->get_single_name();
            if (name.empty() || name == "help" || opt->count() > 0 || !obj.contains(name)) continue;
            const auto& v = obj.at(name);
            if (v.is_array()) {
                for (const auto& e : v) opt->add_result(e.is_string() ? e.get<std::string>() : e.dump());
            } else {
                opt->add_result(v.is_string() ? v.get<std::string>() : v.dump());
            }
            opt->run_callback();
        }
    };
    if (cfg.contains(app->get_name()) && cfg.at(app->get_name()).is_object()) apply(cfg.at(app->get_name()));
    apply(cfg);
}

void print_report(const DiagnosticsReport& rep) {
    for (const auto& r : rep.records) {
        if (!r.applicable) {
            std::printf("  %-24s n/a   %s\n", r.check.c_str(), r.note.c_str());
            continue;
        }
        std::printf("  %-24s %s  max %.3e  tol %.1e\n", r.check.c_str(), r.pass ? "ok  " : "FAIL",
                    r.max_abs, r.tol);
    }
}

int finish(const DiagnosticsReport& rep) {
    print_report(rep);
    return rep.all_pass() ? 0 : kVerifyFailed;
}

void export_profile(const ProfileCurve& curve, const fs::path& stem) {
    write_text_file(stem.string() + ".csv", profile_csv(curve));
    write_text_file(stem.string() + ".json", dump(profile_metadata(curve)));
}

void export_mesh(const ProfileCurve& curve, const fs::path& path, int segments, MeshChart chart) {
    const auto mesh = revolve_profile(curve, {segments, chart, 400});
    const auto& spec = curve.spec();
    std::vector<std::string> header = {
        "soliton-forge " + std::string(to_string(spec.family)) + " c=" + format_double(spec.c) +
        " n=" + std::to_string(spec.n) + " warp=" + spec.warp->label()};
    if (spec.family == Family::wing) header.push_back("epsilon=" + format_double(spec.epsilon));
    write_text_file(path, mesh_obj(mesh, header));
}

// ---------------------------------------------------------------------------
// soliton

struct SolitonCmd {
    std::string family;
    SpecOptions spec;
    int segments = 64;
    std::string chart = "cylindrical";
    double phi0 = 0.0;
};

int run_soliton(const GlobalOptions& g, const SolitonCmd& cmd) {
    const auto family = family_from_string(cmd.family);
    if (family == Family::wing && !(cmd.spec.epsilon > 0.0))
        throw CLI::ValidationError("--epsilon", "wing solitons need --epsilon > 0");
    SpecOptions so = cmd.spec;
    if ((family == Family::ideal || family == Family::grim) && so.K == 0.0 && so.warp_file.empty()) so.K = -1.0;
    const auto spec = make_spec(so, family);
    const auto out = output_dir(g);
    const auto opts = integrator(g);
    const auto chart = mesh_chart_from_string(cmd.chart);
    DiagnosticsReport rep;

    switch (family) {
    case Family::bowl: {
        const auto curve = solve_bowl(spec, stop_policy(so), opts);
        export_profile(curve, out / "bowl");
        export_mesh(curve, out / "bowl.obj", cmd.segments, chart);
        rep = verify_profile(curve);
        break;
    }
    case Family::wing: {
        auto st = stop_policy(so);
        const auto plus = solve_wing(spec, +1, st, opts);
        const auto minus = solve_wing(spec, -1, st, opts);
        export_profile(plus, out / "wing_plus");
        export_profile(minus, out / "wing_minus");
        export_mesh(join_wing_branches(plus, minus), out / "wing.obj", cmd.segments, chart);
        for (const auto* b : {&plus, &minus}) {
            const auto r = verify_profile(*b);
            for (auto rec : r.records) {
                rec.check += b == &plus ? "_plus" : "_minus";
                rep.add(rec);
            }
        }
        if (find_turning_point(minus)) {
            const auto wh = wing_height_report(minus);
            for (const auto& r : wh.checks.records) rep.add(r);
            std::printf("wing: r0 %.9g  gap %.9g  bounds [%.9g, %.9g]\n", wh.r0, wh.gap, wh.lower, wh.upper);
        } else {
            rep.add(not_applicable("wing_height", "lower branch does not turn before r-max"));
        }
        break;
    }
    case Family::ideal: {
        ProfileState init{0.0, 0.0, 0.0, cmd.phi0};
        StopPolicy st = stop_policy(so);
        st.s_max = 4 * so.r_max;
        const auto curve = solve_ideal_parametric(spec, init, st, opts);
        export_profile(curve, out / "ideal");
        rep = verify_profile(curve);
        break;
    }
    case Family::grim: {
        GraphOptions go;
        go.integrator = opts;
        const auto graph = solve_grim(spec.c, spec.n, spec.warp, -so.r_max, so.r_max, {}, go);
        write_text_file(out / "grim.csv", graph_csv(graph));
        write_text_file(out / "grim.json", dump(graph_metadata(graph)));
        CheckRecord entire;
        entire.check = "grim_entire";
        entire.n = graph.size();
        entire.pass = !graph.gradient_blowup && !graph.step_failure && graph.r.front() <= -so.r_max &&
                      graph.r.back() >= so.r_max;
        for (double d : graph.du) entire.max_abs = std::max(entire.max_abs, std::abs(d));
        entire.rms = entire.max_abs;
        entire.note = "max |u'| over the span";
        rep.add(entire);
        break;
    }
    }
    write_text_file(out / (cmd.family + "_diagnostics.json"), dump(to_json(rep)));
    return finish(rep);
}

// ---------------------------------------------------------------------------
// verify

struct VerifyCmd {
    std::string input;
    std::string family = "bowl";
    SpecOptions spec;
    std::size_t samples = 10000;
    double tol_integral = VerifyTolerances{}.integral;
    double tol_algebraic = VerifyTolerances{}.algebraic;
};

int run_verify(const GlobalOptions& g, const VerifyCmd& cmd) {
    const auto out = output_dir(g);
    const VerifyTolerances tol{cmd.tol_integral, cmd.tol_algebraic};
    std::optional<ProfileCurve> curve;
    if (!cmd.input.empty()) {
        fs::path sidecar = fs::path(cmd.input).replace_extension(".json");
        SolitonSpec spec;
        if (fs::exists(sidecar)) {
            const auto meta = json::parse(read_text_file(sidecar));
            spec = spec_from_json(meta.at("spec"));
        } else {
            spec = make_spec(cmd.spec, family_from_string(cmd.family));
        }
        curve = ProfileCurve::from_samples(spec, read_profile_csv(cmd.input));
    } else {
        const auto family = family_from_string(cmd.family);
        const auto spec = make_spec(cmd.spec, family);
        if (family == Family::bowl) curve = solve_bowl(spec, stop_policy(cmd.spec), integrator(g));
        else if (family == Family::wing) curve = solve_wing(spec, -1, stop_policy(cmd.spec), integrator(g));
        else throw CLI::ValidationError("--family", "verify solves bowl or wing profiles; pass --input otherwise");
    }
    auto rep = verify_profile(*curve, tol);
    rep.add(drift_identity_random(curve->spec(), cmd.samples, g.seed, std::min(tol.algebraic, 1e-10)));
    write_text_file(out / "verify.json", dump(to_json(rep)));
    return finish(rep);
}

// ---------------------------------------------------------------------------
// flow

struct FlowCmd {
    std::string chart = "polar";
    SpecOptions spec;
    double R = 10.0;
    std::size_t nodes = 1001;
    double dtau = 0.0;
    double horizon = 1.0;
    std::string scheme = "explicit";
    std::string bc = "robin";
    std::string initial = "soliton";
    double amplitude = 0.5;
    double width = 1.0;
    std::size_t record_every = 100;
    std::size_t snapshot_every = 0;
};

int run_flow_cmd(const GlobalOptions& g, const FlowCmd& cmd) {
    WarpKind kind = WarpKind::rotational;
    if (cmd.chart == "busemann") kind = WarpKind::busemann;
    else if (cmd.chart == "equidistant") kind = WarpKind::equidistant;
    else if (cmd.chart != "polar") throw CLI::ValidationError("--chart", "expected polar, busemann or equidistant");
    auto state = make_flow_grid(cmd.spec.c, cmd.spec.n, make_warp(cmd.spec, kind), cmd.R, cmd.nodes);

    FlowBoundary bc;
    if (cmd.initial == "soliton") {
        bc = soliton_initial(state);
    } else if (cmd.initial == "bump") {
        bc = discrete_soliton_initial(state);
        add_bump(state, cmd.amplitude, cmd.width);
    } else if (cmd.initial == "flat") {
        bc = asymptotic_boundary(state);
    } else if (cmd.initial.rfind("csv:", 0) == 0) {
        read_snapshot_csv(cmd.initial.substr(4), state);
        bc = asymptotic_boundary(state);
    } else {
        throw CLI::ValidationError("--initial", "expected soliton, flat, bump or csv:<path>");
    }
    bc.kind = boundary_kind_from_string(cmd.bc);

    FlowRunOptions ro;
    ro.dtau = cmd.dtau;
    ro.horizon = cmd.horizon;
    ro.record_every = cmd.record_every;
    ro.snapshot_every = cmd.snapshot_every;
    ro.step.scheme = flow_scheme_from_string(cmd.scheme);
    const auto u0 = state.u;
    const auto traj = run_flow(state, bc, ro);

    const auto out = output_dir(g);
    write_text_file(out / "flow_trajectory.csv", trajectory_csv(traj));
    for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
        char name[64];
        std::snprintf(name, sizeof name, "flow_snapshot_%04zu.csv", i);
        write_text_file(out / name, snapshot_csv(traj.snapshots[i]));
    }

    bool monotone = true;
    double worst = 0.0;
    for (std::size_t i = 1; i < traj.samples.size(); ++i)
        if (traj.samples[i].F > traj.samples[i - 1].F) monotone = false;
    for (const auto& s : traj.samples)
        if (std::isfinite(s.dFdtau))
            worst = std::max(worst, std::abs(s.dFdtau + s.D - s.B) / (1e-3 * std::abs(s.D) + 1e-6));
    json summary{{"chart", cmd.chart}, {"c", cmd.spec.c}, {"n", cmd.spec.n}, {"R", cmd.R},
                 {"nodes", cmd.nodes}, {"scheme", cmd.scheme}, {"bc", cmd.bc}, {"initial", cmd.initial},
                 {"dtau", traj.dtau}, {"steps", traj.steps}, {"F_nonincreasing", monotone},
                 {"max_defect_ratio", worst}};
    if (cmd.initial == "soliton" && !traj.snapshots.empty()) {
        const auto& last = traj.snapshots.back();
        double err = 0.0;
        for (std::size_t i = 0; i < last.size(); ++i)
            err = std::max(err, std::abs(last.u[i] - u0[i] - cmd.spec.c * last.tau));
        summary["translation_error"] = err;
    }
    write_text_file(out / "flow.json", dump(summary));
    std::printf("flow: %zu steps, dtau %.3e, F non-increasing %s, max |dF/dtau + D - B| ratio %.3g\n",
                traj.steps, traj.dtau, monotone ? "yes" : "no", worst);
    return 0;
}

// ---------------------------------------------------------------------------
// isometry

struct IsometryCmd {
    std::string map_file;
    std::string type = "hyperbolic";
    double param = 0.0;
    std::string points;
    std::string profile;
    int segments = 64;
};

int run_isometry(const GlobalOptions& g, const IsometryCmd& cmd) {
    LorentzMapDescriptor d{cmd.type, cmd.param};
    if (!cmd.map_file.empty()) d = map_descriptor_from_json(json::parse(read_text_file(cmd.map_file)));
    const auto out = output_dir(g);
    if (cmd.points.empty() == cmd.profile.empty())
        throw CLI::ValidationError("isometry", "pass exactly one of --points or --profile");

    if (!cmd.points.empty()) {
        const auto pts = read_points_csv(cmd.points);
        if (pts.empty()) throw IoError("nothing to transform in " + cmd.points);
        const int n = static_cast<int>(pts.front().p.size()) - 1;
        const auto moved = transform_points(make_lorentz_map(n, d), pts);
        write_text_file(out / "isometry_points.csv", points_csv(moved));
        std::printf("isometry: %zu points\n", moved.size());
        return 0;
    }

    // a profile of a soliton in R x H^2: rotate, lift, map, project to the disk
    const fs::path sidecar = fs::path(cmd.profile).replace_extension(".json");
    if (!fs::exists(sidecar)) throw IoError("profile " + cmd.profile + " has no metadata sidecar");
    const auto spec = spec_from_json(json::parse(read_text_file(sidecar)).at("spec"));
    const double K = spec.warp->builtin_curvature();
    if (spec.warp->kind() != WarpKind::rotational || !(K < 0.0))
        throw std::invalid_argument("isometries act on profiles over a hyperbolic base");
    const double k = std::sqrt(-K);
    const auto curve = ProfileCurve::from_samples(spec, read_profile_csv(cmd.profile));
    auto mesh = revolve_profile(curve, {cmd.segments, MeshChart::cylindrical, 400});
    std::vector<HeightPoint> pts;
    pts.reserve(mesh.vertices.size());
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
        const auto& v = mesh.vertices[i];
        const double r = mesh.attributes[i].r;
        Eigen::Vector2d omega(1.0, 0.0);
        if (r > 0.0) omega = Eigen::Vector2d(v[1], v[2]).normalized();
        pts.push_back({embed_polar(k * r, omega), v[0]});
    }
    const auto moved = transform_points(make_lorentz_map(2, d), pts);
    for (std::size_t i = 0; i < moved.size(); ++i) {
        const Eigen::VectorXd q = to_poincare(moved[i].p) / k;
        mesh.vertices[i] = {moved[i].height, q(0), q(1)};
    }
    mesh.chart = MeshChart::poincare_disk;
    write_text_file(out / "isometry.obj",
                    mesh_obj(mesh, {"soliton-forge isometry " + d.type + " param=" + format_double(d.param)}));
    write_text_file(out / "isometry_points.csv", points_csv(moved));
    std::printf("isometry: %zu mesh vertices\n", moved.size());
    return 0;
}

// ---------------------------------------------------------------------------
// sweep

struct SweepCmd {
    std::string family = "wing";
    std::string param = "epsilon";
    std::vector<double> values;
    SpecOptions spec;
};

unsigned sweep_threads() {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("SOLITON_FORGE_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) hw = std::min<unsigned>(hw, static_cast<unsigned>(v));
    }
    return hw;
}

int run_sweep(const GlobalOptions& g, const SweepCmd& cmd) {
    const auto family = family_from_string(cmd.family);
    if (family != Family::bowl && family != Family::wing)
        throw CLI::ValidationError("--family", "sweeps run over bowl or wing families");
    if (cmd.param != "epsilon" && cmd.param != "c")
        throw CLI::ValidationError("--param", "expected epsilon or c");
    if (cmd.values.empty()) throw CLI::ValidationError("--values", "need at least one value");
    const auto out = output_dir(g) / "sweep";
    fs::create_directories(out);

    struct Row {
        double value = 0;
        bool ok = false;
        std::string error;
        DiagnosticsReport rep;
        std::optional<WingHeightReport> wing;
    };
    std::vector<Row> rows(cmd.values.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < rows.size(); i = next++) {
            Row& row = rows[i];
            row.value = cmd.values[i];
            try {
                SpecOptions so = cmd.spec;
                (cmd.param == "c" ? so.c : so.epsilon) = row.value;
                const auto spec = make_spec(so, family);
                char stem[96];
                std::snprintf(stem, sizeof stem, "%s_%s_%03zu", cmd.family.c_str(), cmd.param.c_str(), i);
                auto st = stop_policy(so);
                const auto curve = family == Family::bowl ? solve_bowl(spec, st, integrator(g))
                                                          : solve_wing(spec, -1, st, integrator(g));
                export_profile(curve, out / stem);
                row.rep = verify_profile(curve);
                if (family == Family::wing) {
                    row.wing = wing_height_report(curve);
                    for (const auto& r : row.wing->checks.records) row.rep.add(r);
                }
                row.ok = true;
            } catch (const std::exception& e) {
                row.error = e.what();
            }
        }
    };
    const unsigned nthreads = std::min<unsigned>(sweep_threads(), static_cast<unsigned>(rows.size()));
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    json summary = json::array();
    bool all_pass = true;
    for (const auto& row : rows) {
        json j{{cmd.param, row.value}, {"ok", row.ok}};
        if (!row.ok) {
            j["error"] = row.error;
            all_pass = false;
        } else {
            j["report"] = to_json(row.rep);
            all_pass = all_pass && row.rep.all_pass();
            if (row.wing)
                j["wing"] = {{"r0", row.wing->r0}, {"gap", row.wing->gap}, {"lower", row.wing->lower},
                             {"upper", row.wing->upper}};
        }
        summary.push_back(j);
    }

    // the height gap shrinks as epsilon decreases toward 0
    json result{{"runs", summary}};
    if (family == Family::wing && cmd.param == "epsilon") {
        std::vector<std::pair<double, double>> gaps;
        bool hypothesis = cmd.spec.K < 0.0 && cmd.spec.warp_file.empty();
        for (const auto& row : rows)
            if (row.wing) {
                gaps.emplace_back(row.value, row.wing->gap);
                hypothesis = hypothesis && row.wing->monotone_hypothesis;
            }
        std::sort(gaps.begin(), gaps.end());
        bool monotone = true;
        for (std::size_t i = 1; i < gaps.size(); ++i)
            if (!(gaps[i].second > gaps[i - 1].second)) monotone = false;
        result["gap_monotone"] = monotone;
        result["gap_monotone_asserted"] = hypothesis;
        if (hypothesis && !monotone) all_pass = false;
        std::printf("sweep: gap monotone in epsilon: %s%s\n", monotone ? "yes" : "no",
                    hypothesis ? "" : " (not asserted)");
    }
    write_text_file(out / "sweep.json", dump(result));
    for (const auto& row : rows)
        std::printf("  %s=%-10g %s%s\n", cmd.param.c_str(), row.value,
                    row.ok ? (row.rep.all_pass() ? "ok" : "FAIL") : "error: ", row.error.c_str());
    return all_pass ? 0 : kVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Translating solitons of mean curvature flow in R x P"};
    app.require_subcommand(1);
    app.fallthrough();
    GlobalOptions g;
    app.add_option("--config", g.config, "JSON defaults; command-line flags take precedence")
        ->check(CLI::ExistingFile);
    app.add_option("--out", g.out, "output directory")->capture_default_str();
    app.add_option("--tol-rel", g.tol_rel, "integrator relative tolerance")->capture_default_str();
    app.add_option("--tol-abs", g.tol_abs, "integrator absolute tolerance")->capture_default_str();
    app.add_option("--seed", g.seed, "seed for randomized checks")->capture_default_str();

    SolitonCmd sol;
    auto* sol_app = app.add_subcommand("soliton", "solve a soliton and export profile, mesh and diagnostics");
    sol_app->add_option("family", sol.family, "bowl | wing | ideal | grim")
        ->required()
        ->check(CLI::IsMember({"bowl", "wing", "ideal", "grim"}));
    add_spec_flags(sol_app, sol.spec);
    sol_app->add_option("--segments", sol.segments, "angular mesh segments")->check(CLI::Range(8, 4096));
    sol_app->add_option("--chart", sol.chart, "cylindrical | poincare_disk | hyperboloid")->capture_default_str();
    sol_app->add_option("--phi0", sol.phi0, "initial angle of ideal solitons");

    VerifyCmd ver;
    auto* ver_app = app.add_subcommand("verify", "run the diagnostics suite on a profile CSV or a fresh solve");
    ver_app->add_option("--input", ver.input, "profile CSV (s,r,t,phi)")->check(CLI::ExistingFile);
    ver_app->add_option("--family", ver.family, "bowl | wing (when solving)")->capture_default_str();
    add_spec_flags(ver_app, ver.spec);
    ver_app->add_option("--samples", ver.samples, "random states for the drift identity")->capture_default_str();
    ver_app->add_option("--tol-integral", ver.tol_integral)->capture_default_str();
    ver_app->add_option("--tol-algebraic", ver.tol_algebraic)->capture_default_str();

    FlowCmd flow;
    auto* flow_app = app.add_subcommand("flow", "graphical mean curvature flow and its monotone functional");
    flow_app->add_option("--chart", flow.chart, "polar | busemann | equidistant")->capture_default_str();
    flow_app->add_option("--K", flow.spec.K)->capture_default_str();
    flow_app->add_option("--n", flow.spec.n)->capture_default_str();
    flow_app->add_option("--c", flow.spec.c)->capture_default_str();
    flow_app->add_option("--warp", flow.spec.warp_file)->check(CLI::ExistingFile);
    flow_app->add_option("--R", flow.R, "domain radius")->capture_default_str();
    flow_app->add_option("--nodes", flow.nodes)->capture_default_str();
    flow_app->add_option("--dtau", flow.dtau, "time step (0: automatic)")->capture_default_str();
    flow_app->add_option("--horizon", flow.horizon)->capture_default_str();
    flow_app->add_option("--scheme", flow.scheme)->check(CLI::IsMember({"explicit", "implicit"}))->capture_default_str();
    flow_app->add_option("--bc", flow.bc)->check(CLI::IsMember({"robin", "dirichlet"}))->capture_default_str();
    flow_app->add_option("--initial", flow.initial, "soliton | flat | bump | csv:<path>")->capture_default_str();
    flow_app->add_option("--amplitude", flow.amplitude, "bump amplitude")->capture_default_str();
    flow_app->add_option("--width", flow.width, "bump width")->capture_default_str();
    flow_app->add_option("--record-every", flow.record_every)->capture_default_str();
    flow_app->add_option("--snapshot-every", flow.snapshot_every)->capture_default_str();

    IsometryCmd iso;
    auto* iso_app = app.add_subcommand("isometry", "apply a hyperboloid isometry to points or a profile mesh");
    iso_app->add_option("--map", iso.map_file, "JSON {type, param}")->check(CLI::ExistingFile);
    iso_app->add_option("--type", iso.type)->check(CLI::IsMember({"hyperbolic", "parabolic"}))->capture_default_str();
    iso_app->add_option("--param", iso.param, "r0 or alpha");
    iso_app->add_option("--points", iso.points, "CSV x0,...,xn,height")->check(CLI::ExistingFile);
    iso_app->add_option("--profile", iso.profile, "profile CSV with metadata sidecar")->check(CLI::ExistingFile);
    iso_app->add_option("--segments", iso.segments)->check(CLI::Range(8, 4096));

    SweepCmd sw;
    auto* sw_app = app.add_subcommand("sweep", "solve over a grid of epsilon or c values in parallel");
    sw_app->add_option("--family", sw.family, "bowl | wing")->capture_default_str();
    sw_app->add_option("--param", sw.param, "epsilon | c")->capture_default_str();
    sw_app->add_option("--values", sw.values, "comma-separated grid")->delimiter(',');
    add_spec_flags(sw_app, sw.spec);

    try {
        app.parse(argc, argv);
        if (!g.config.empty()) {
            const auto cfg = json::parse(read_text_file(g.config));
            if (!cfg.is_object()) throw IoError(g.config + ": config must be a JSON object");
            apply_config(&app, cfg);
            for (auto* sub : app.get_subcommands()) apply_config(sub, cfg);
        }
        if (*sol_app) return run_soliton(g, sol);
        if (*ver_app) return run_verify(g, ver);
        if (*flow_app) return run_flow_cmd(g, flow);
        if (*iso_app) return run_isometry(g, iso);
        if (*sw_app) return run_sweep(g, sw);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "soliton-forge: %s\n", e.what());
        return 1;
    }
    return 1;
}
