#pragma once
/**
 * @file io.hpp
 * @brief CSV, OBJ and JSON export/import.
 *
 * Numbers are written with 17 significant digits through snprintf, so equal
 * inputs give byte-identical files.
 */

#include <nlohmann/json.hpp>

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "soliton_forge/diagnostics.hpp"
#include "soliton_forge/flow.hpp"
#include "soliton_forge/graph.hpp"
#include "soliton_forge/lorentz.hpp"
#include "soliton_forge/mesh.hpp"
#include "soliton_forge/profile.hpp"
#include "soliton_forge/warp.hpp"

namespace soliton_forge {

using json = nlohmann::ordered_json;

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

/// NaN and infinities become null; everything else is a number.
inline json json_number(double x) {
    if (!std::isfinite(x)) return nullptr;
    return x;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
    const auto parent = path.parent_path();
    if (!parent.empty() && !std::filesystem::is_directory(parent))
        throw IoError("cannot write " + path.string() + ": directory " + parent.string() +
                      " does not exist");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string() + ": " + std::strerror(errno));
    out << content;
    out.flush();
    if (!out) throw IoError("write to " + path.string() + " failed");
}

inline std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string() + ": " + std::strerror(errno));
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// ---------------------------------------------------------------------------
// CSV

namespace detail {

inline void csv_row(std::string& out, std::initializer_list<double> values) {
    bool first = true;
    for (double v : values) {
        if (!first) out += ',';
        out += format_double(v);
        first = false;
    }
    out += '\n';
}

inline std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
        while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
        cells.push_back(cell);
    }
    return cells;
}

/// Numeric table with a header row; `expected` names the leading columns.
inline std::vector<std::vector<double>> read_csv_table(const std::filesystem::path& path,
                                                       const std::vector<std::string>& expected) {
    std::istringstream in(read_text_file(path));
    std::string line;
    std::size_t lineno = 0;
    std::vector<std::vector<double>> rows;
    bool header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        const auto cells = split_csv(line);
        if (!header) {
            for (std::size_t k = 0; k < expected.size(); ++k)
                if (k >= cells.size() || cells[k] != expected[k])
                    throw IoError(path.string() + ":" + std::to_string(lineno) +
                                  ": expected column '" + expected[k] + "'");
            header = true;
            continue;
        }
        if (cells.size() < expected.size())
            throw IoError(path.string() + ":" + std::to_string(lineno) + ": too few columns");
        std::vector<double> row;
        for (const auto& c : cells) {
            std::size_t used = 0;
            double v = 0;
            try {
                v = std::stod(c, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != c.size() || c.empty())
                throw IoError(path.string() + ":" + std::to_string(lineno) + ": bad number '" + c +
                              "'");
            row.push_back(v);
        }
        rows.push_back(std::move(row));
    }
    if (!header) throw IoError(path.string() + ": missing header row");
    return rows;
}

}  // namespace detail

inline std::string profile_csv(const ProfileCurve& curve) {
    std::string out = "s,r,t,phi\n";
    for (const auto& nd : curve.nodes()) detail::csv_row(out, {nd.x, nd.y[0], nd.y[1], nd.y[2]});
    return out;
}

inline std::vector<ProfileState> read_profile_csv(const std::filesystem::path& path) {
    const auto rows = detail::read_csv_table(path, {"s", "r", "t", "phi"});
    std::vector<ProfileState> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back({r[0], r[1], r[2], r[3]});
    if (out.empty()) throw IoError(path.string() + ": no samples");
    return out;
}

inline std::string graph_csv(const RadialGraph& g) {
    std::string out = "r,u,du\n";
    for (std::size_t i = 0; i < g.size(); ++i) detail::csv_row(out, {g.r[i], g.u[i], g.du[i]});
    return out;
}

inline std::string trajectory_csv(const FlowTrajectory& tr) {
    std::string out = "tau,F,D,dFdtau,B\n";
    for (const auto& s : tr.samples) detail::csv_row(out, {s.tau, s.F, s.D, s.dFdtau, s.B});
    return out;
}

inline std::string snapshot_csv(const GraphFlowState& s) {
    std::string out = "# tau=" + format_double(s.tau) + "\nr,u\n";
    for (std::size_t i = 0; i < s.size(); ++i) detail::csv_row(out, {s.r[i], s.u[i]});
    return out;
}

/// Reads r,u columns into `state`; the radii must match the grid.
inline void read_snapshot_csv(const std::filesystem::path& path, GraphFlowState& state) {
    const auto rows = detail::read_csv_table(path, {"r", "u"});
    if (rows.size() != state.size())
        throw IoError(path.string() + ": " + std::to_string(rows.size()) + " rows, grid has " +
                      std::to_string(state.size()) + " nodes");
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (std::abs(rows[i][0] - state.r[i]) > 1e-9 * std::max(1.0, std::abs(state.r[i])))
            throw IoError(path.string() + ": radius " + format_double(rows[i][0]) +
                          " does not match the grid");
        state.u[i] = rows[i][1];
    }
}

/// Points of R x H^n as rows x0,...,xn,height.
inline std::string points_csv(const std::vector<HeightPoint>& pts) {
    if (pts.empty()) throw IoError("nothing to export");
    const auto dim = pts.front().p.size();
    std::string out;
    for (Eigen::Index k = 0; k < dim; ++k) out += "x" + std::to_string(k) + ",";
    out += "height\n";
    for (const auto& hp : pts) {
        for (Eigen::Index k = 0; k < dim; ++k) out += format_double(hp.p(k)) + ",";
        out += format_double(hp.height) + "\n";
    }
    return out;
}

inline std::vector<HeightPoint> read_points_csv(const std::filesystem::path& path) {
    std::istringstream in(read_text_file(path));
    std::string line;
    std::getline(in, line);
    const auto header = detail::split_csv(line);
    if (header.size() < 3 || header.back() != "height" || header.front() != "x0")
        throw IoError(path.string() + ": expected header x0,...,xn,height");
    std::vector<std::string> names(header.begin(), header.end());
    const auto rows = detail::read_csv_table(path, names);
    std::vector<HeightPoint> pts;
    for (const auto& row : rows) {
        HeightPoint hp;
        hp.p = Eigen::Map<const Eigen::VectorXd>(row.data(), static_cast<Eigen::Index>(row.size() - 1));
        hp.height = row.back();
        pts.push_back(std::move(hp));
    }
    return pts;
}

// ---------------------------------------------------------------------------
// OBJ

inline std::string mesh_obj(const SolitonMesh& mesh, const std::vector<std::string>& header = {}) {
    if (mesh.empty()) throw IoError("nothing to export");
    std::string out;
    for (const auto& h : header) out += "# " + h + "\n";
    out += "# chart " + std::string(to_string(mesh.chart)) + "\n";
    if (!mesh.label.empty()) out += "# " + mesh.label + "\n";
    if (mesh.equatorial_slice) out += "# equatorial slice of a higher-dimensional hypersurface\n";
    out += "# vertices " + std::to_string(mesh.vertices.size()) + " faces " +
           std::to_string(mesh.faces.size()) + "\n";
    for (const auto& v : mesh.vertices)
        out += "v " + format_double(v[0]) + " " + format_double(v[1]) + " " + format_double(v[2]) + "\n";
    for (const auto& f : mesh.faces)
        out += "f " + std::to_string(f[0] + 1) + " " + std::to_string(f[1] + 1) + " " +
               std::to_string(f[2] + 1) + "\n";
    return out;
}

struct ObjCounts {
    std::size_t vertices = 0;
    std::size_t faces = 0;
};

inline ObjCounts read_obj_counts(const std::filesystem::path& path) {
    std::istringstream in(read_text_file(path));
    std::string line;
    ObjCounts c;
    while (std::getline(in, line)) {
        if (line.rfind("v ", 0) == 0) ++c.vertices;
        else if (line.rfind("f ", 0) == 0) ++c.faces;
    }
    return c;
}

// ---------------------------------------------------------------------------
// JSON

inline json to_json(const CheckRecord& r) {
    json j;
    j["check"] = r.check;
    j["max_abs"] = json_number(r.max_abs);
    j["rms"] = json_number(r.rms);
    j["n"] = r.n;
    j["tol"] = json_number(r.tol);
    j["pass"] = r.pass;
    if (!r.applicable) j["applicable"] = false;
    if (!r.note.empty()) j["note"] = r.note;
    return j;
}

inline json to_json(const DiagnosticsReport& rep) {
    json j;
    j["pass"] = rep.all_pass();
    j["checks"] = json::array();
    for (const auto& r : rep.records) j["checks"].push_back(to_json(r));
    return j;
}

inline json warp_json(const WarpModel& w) {
    json j;
    j["kind"] = to_string(w.kind());
    j["label"] = w.label();
    if (std::isfinite(w.builtin_curvature())) j["curvature"] = w.builtin_curvature();
    return j;
}

inline json to_json(const SolitonSpec& s) {
    json j;
    j["family"] = to_string(s.family);
    j["c"] = s.c;
    j["n"] = s.n;
    if (s.family == Family::wing || s.family == Family::ideal) j["epsilon"] = s.epsilon;
    j["warp"] = warp_json(*s.warp);
    return j;
}

inline json to_json(const IntegratorOptions& o) {
    return json{{"rel_tol", o.rel_tol}, {"abs_tol", o.abs_tol}, {"max_step", o.max_step}};
}

inline json profile_metadata(const ProfileCurve& curve) {
    json j;
    j["spec"] = to_json(curve.spec());
    j["tolerances"] = to_json(curve.tolerances());
    j["termination"] = to_string(curve.termination());
    if (!curve.message().empty()) j["message"] = curve.message();
    j["samples"] = curve.size();
    j["s_range"] = {curve.s_begin(), curve.s_end()};
    return j;
}

inline json graph_metadata(const RadialGraph& g) {
    json j;
    j["spec"] = to_json(g.spec);
    j["chart"] = to_string(g.chart);
    j["samples"] = g.size();
    j["gradient_blowup"] = g.gradient_blowup;
    if (g.gradient_blowup) j["blowup_radius"] = json_number(g.blowup_radius);
    j["step_failure"] = g.step_failure;
    if (!g.message.empty()) j["message"] = g.message;
    return j;
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// Warp descriptions

/// Builtin warp by name: euclidean, hyperbolic, busemann, equidistant, or a
/// kind name plus curvature.
inline WarpPtr builtin_warp_by_name(const std::string& name, double curvature) {
    if (name == "euclidean") return make_builtin_warp_ptr(WarpKind::rotational, 0.0);
    if (name == "hyperbolic") return make_builtin_warp_ptr(WarpKind::rotational, curvature);
    return make_builtin_warp_ptr(warp_kind_from_string(name), curvature);
}

/// User warp from {"kind", "table": [{r, xi, dxi, ddxi[, chi, dchi, ddchi]}],
/// "interpolation": "cubic-hermite"}. Between table rows xi is the quintic
/// Hermite interpolant of (xi, xi', xi''), whose derivatives are exact
/// derivatives of the interpolant.
inline WarpModel warp_from_json(const json& j) {
    if (!j.contains("table")) {
        const double K = j.value("curvature", 0.0);
        return *builtin_warp_by_name(j.value("kind", std::string("rotational")), K);
    }
    const auto kind = warp_kind_from_string(j.value("kind", std::string("rotational")));
    const auto interp = j.value("interpolation", std::string("cubic-hermite"));
    if (interp != "cubic-hermite" && interp != "hermite")
        throw std::invalid_argument("unsupported warp interpolation '" + interp + "'");
    const auto& table = j.at("table");
    if (!table.is_array() || table.size() < 2)
        throw std::invalid_argument("warp table needs at least two rows");

    const bool has_chi = table.front().contains("chi");
    auto xi_nodes = std::make_shared<std::vector<HermiteNode<1>>>();
    auto chi_nodes = std::make_shared<std::vector<HermiteNode<1>>>();
    for (const auto& row : table) {
        const double r = row.at("r").get<double>();
        if (!xi_nodes->empty() && !(r > xi_nodes->back().x))
            throw std::invalid_argument("warp table radii must increase");
        xi_nodes->push_back({r, {row.at("xi").get<double>()}, {row.at("dxi").get<double>()},
                             {row.at("ddxi").get<double>()}});
        if (has_chi)
            chi_nodes->push_back({r, {row.at("chi").get<double>()}, {row.at("dchi").get<double>()},
                                  {row.at("ddchi").get<double>()}});
    }
    auto fn = [](std::shared_ptr<std::vector<HermiteNode<1>>> nodes) {
        auto eval = [nodes](double r) { return hermite_eval<1>(*nodes, r); };
        return WarpFunction{[eval](double r) { return eval(r).value[0]; },
                            [eval](double r) { return eval(r).first[0]; },
                            [eval](double r) { return eval(r).second[0]; }};
    };
    const Interval domain{xi_nodes->front().x, xi_nodes->back().x};
    std::optional<WarpFunction> chi;
    if (kind == WarpKind::equidistant) {
        if (!has_chi) throw std::invalid_argument("equidistant warp table needs chi columns");
        chi = fn(chi_nodes);
    }
    double xi3 = 0.0;
    if (kind == WarpKind::rotational) {
        const auto& a = (*xi_nodes)[0];
        const auto& b = (*xi_nodes)[1];
        xi3 = (b.d2[0] - a.d2[0]) / (b.x - a.x);
    }
    return WarpModel(kind, fn(xi_nodes), std::move(chi), domain, j.value("label", std::string("user")),
                     xi3);
}

/// Inverse of to_json(SolitonSpec) for builtin warps.
inline SolitonSpec spec_from_json(const json& j) {
    SolitonSpec s;
    s.family = family_from_string(j.at("family").get<std::string>());
    s.c = j.at("c").get<double>();
    s.n = j.at("n").get<int>();
    s.epsilon = j.value("epsilon", 0.0);
    const auto& w = j.at("warp");
    if (!w.contains("curvature") && !w.contains("table"))
        throw std::invalid_argument("spec names a user warp ('" + w.value("label", std::string()) +
                                    "'); supply its table");
    s.warp = std::make_shared<const WarpModel>(warp_from_json(w));
    return s;
}

inline LorentzMapDescriptor map_descriptor_from_json(const json& j) {
    LorentzMapDescriptor d;
    d.type = j.at("type").get<std::string>();
    d.param = j.at("param").get<double>();
    return d;
}

}  // namespace soliton_forge
