#include "cli.hpp"

#include "battery.hpp"

#include "conelab/error.hpp"
#include "conelab/io.hpp"
#include "conelab/parallel.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <sstream>

namespace conelab::cli {

namespace {

struct UsageProblem : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Settings {
    std::string op = "laplacian";
    int n = 1;
    int modes = 8;
    std::string spectrum = "preset";
    double gamma = 0.0;
    double p = 2.0;
    double theta = std::numbers::pi / 2;
    std::string extension = "friedrichs";
    int extension_index = -1;
    bool csv = false;
    int jobs = 0;
    std::string plot;

    std::vector<double> strip{-3.0, 3.0};
    std::string filter = "all";
    std::string e3_method = "both";
    std::vector<double> samples;
    double t_min_e3 = 1e-6;
    double slope_margin = 0.05;
    double e3_tolerance = 1e-11;
    int e1_angles = 256;
    int e1_radii = 256;

    std::string symbol = "laplacian";
    double gamma1 = 0.5;
    double gamma2 = 2.5;
    std::string input;
    bool oracle = false;
    std::vector<double> t_samples;
    double mellin_tolerance = 1e-13;
    int contour_nodes = 2048;

    int nodes = 400;
    double t_min = 1e-6;
    std::vector<double> lambda{-1.0, 0.0};
    double ray = std::numbers::pi;
    std::vector<double> magnitudes{1, 10, 100, 1000, 10000};
    int iterations = 20;
    bool values = false;

    std::vector<double> interval{0.0, 50.0};
    double tol = 1e-9;

    double T = 4.0;
    int steps = 400;
    double q = 2.0;
    std::string scheme = "implicit-euler";

    std::vector<std::string> criteria;
    bool full = false;
};

// Header plus rows, rendered when --csv is given.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

struct Output {
    Json doc;
    std::optional<Table> table;
    int code = Success;
};

std::string fmt(double x) {
    std::ostringstream os;
    os << std::setprecision(17) << x;
    return os.str();
}

std::string csv_cell(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
    return out + "\"";
}

void flatten(const Json& j, const std::string& path, Table& t) {
    if (j.is_object()) {
        for (auto it = j.begin(); it != j.end(); ++it) flatten(it.value(), path.empty() ? it.key() : path + "." + it.key(), t);
    } else if (j.is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], path + "[" + std::to_string(i) + "]", t);
    } else {
        t.rows.push_back({path, j.is_string() ? j.get<std::string>() : j.dump()});
    }
}

void write_csv(const Table& t, std::ostream& out) {
    for (std::size_t i = 0; i < t.header.size(); ++i) out << (i ? "," : "") << csv_cell(t.header[i]);
    out << '\n';
    for (const auto& r : t.rows) {
        for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << csv_cell(r[i]);
        out << '\n';
    }
}

void write_plot(const std::string& path, const std::vector<std::string>& columns, const std::vector<std::vector<double>>& rows) {
    if (path.empty()) return;
    std::ofstream f(path);
    if (!f) throw UsageProblem("cannot write plot data to " + path);
    f << '#';
    for (const auto& c : columns) f << ' ' << c;
    f << '\n';
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) f << (i ? " " : "") << fmt(r[i]);
        f << '\n';
    }
}

Json read_json_file(const std::string& raw) {
    const std::string path = !raw.empty() && raw[0] == '@' ? raw.substr(1) : raw;
    std::ifstream f(path);
    if (!f) throw UsageProblem("cannot open " + path);
    try {
        return Json::parse(f);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidInput, "io", path + ": " + e.what());
    }
}

bool names_file(const std::string& s) { return (!s.empty() && s[0] == '@') || std::filesystem::exists(s); }

ConeOperator load_operator(const Settings& s) {
    if (s.op == "laplacian") return ConeOperator::laplacian(s.n);
    if (s.op == "example-abcd") return ConeOperator::example_abcd();
    if (names_file(s.op)) return operator_from_json(read_json_file(s.op));
    throw UsageProblem("unknown operator '" + s.op + "' (laplacian, example-abcd or a JSON file)");
}

std::shared_ptr<const BoundarySpectrum> load_spectrum(const Settings& s, int n) {
    if (s.modes < 1) throw UsageProblem("--modes must be positive");
    if (s.spectrum == "preset") return std::make_shared<BoundarySpectrum>(preset_spectrum(n, s.modes));
    if (!names_file(s.spectrum)) throw UsageProblem("unknown spectrum '" + s.spectrum + "' (preset or a JSON file)");
    auto S = std::make_shared<BoundarySpectrum>(spectrum_from_json(read_json_file(s.spectrum)));
    if (S->dim_boundary() != n) throw Error(ErrorCode::DimensionMismatch, "boundary", "spectrum dimension differs from the operator's n");
    return S;
}

Extension load_extension(const Settings& s, const ConeOperator& A, std::shared_ptr<const BoundarySpectrum> S) {
    if (!s.extension.empty() && s.extension[0] == '@') {
        Json j = read_json_file(s.extension);
        if (j.contains("extensions")) {
            const Json& list = j.at("extensions");
            if (s.extension_index >= 0) {
                if (s.extension_index >= static_cast<int>(list.size())) throw UsageProblem("--extension-index out of range");
                j = list.at(static_cast<std::size_t>(s.extension_index));
            } else if (list.size() == 1) {
                j = list.at(0);
            } else {
                throw UsageProblem("the file lists several extensions; pick one with --extension-index");
            }
        }
        Extension e = extension_from_json(j);
        if (e.n != A.n()) throw Error(ErrorCode::DimensionMismatch, "domains", "extension and operator dimensions differ");
        return e;
    }
    return extension_from_spec(s.extension, A, std::move(S), s.gamma, s.p);
}

// Every option value is echoed as a string; lists are space separated.
Json config_of(const CLI::App& app, const std::string& name) {
    Json opts = Json::object();
    for (const CLI::Option* o : app.get_options()) {
        if (o->get_lnames().empty() || o->get_lnames()[0] == "help") continue;
        const bool flag = o->get_type_size_max() == 0;
        std::string value;
        if (o->count() == 0) {
            value = flag ? "false" : o->get_default_str();
            if (value.size() >= 2 && value.front() == '[' && value.back() == ']') {
                value = value.substr(1, value.size() - 2);
                std::replace(value.begin(), value.end(), ',', ' ');
            }
        } else if (flag) {
            value = "true";
        } else {
            for (const auto& r : o->results()) value += (value.empty() ? "" : " ") + r;
        }
        opts[o->get_lnames()[0]] = value;
    }
    return Json{{"subcommand", name}, {"options", opts}, {"jobs", default_jobs()}};
}

std::vector<RadialFunction> green_inputs(const Settings& s, std::size_t modes) {
    std::vector<RadialFunction> u(modes, RadialFunction::bump(0.3, 2.0));
    if (s.input.empty()) return u;
    const Json j = read_json_file(s.input);
    std::fill(u.begin(), u.end(), RadialFunction::zero());
    std::size_t idx = 0;
    for (const auto& m : j.at("modes")) {
        const std::size_t mode = m.value("mode", idx++);
        if (mode >= modes) throw Error(ErrorCode::InvalidInput, "io", "input mode outside the spectrum truncation");
        u[mode] = radial_function_from_json(m);
    }
    return u;
}

std::vector<ModeInput> resolvent_inputs(const Settings& s) {
    if (s.input.empty()) return {{0, {}, RadialFunction::bump(0.2, 0.8)}, {1, {}, RadialFunction::bump(0.2, 0.8)}};
    const Json j = read_json_file(s.input);
    std::vector<ModeInput> out;
    for (const auto& m : j.at("modes")) {
        ModeInput in;
        in.mode = m.at("mode").get<std::size_t>();
        if (m.contains("component")) {
            const auto& c = m.at("component");
            in.component.resize(static_cast<Eigen::Index>(c.size()));
            for (std::size_t i = 0; i < c.size(); ++i) in.component(static_cast<Eigen::Index>(i)) = complex_from_json(c[i]);
        }
        in.profile = radial_function_from_json(m.at("profile"));
        out.push_back(std::move(in));
    }
    return out;
}

// ---- subcommands ----

Output cmd_poles(const Settings& s) {
    if (s.strip.size() != 2) throw UsageProblem("--strip takes two numbers");
    const auto A = load_operator(s);
    const auto S = load_spectrum(s, A.n());
    const auto sigma = conormal_symbol(A, *S);
    const auto pts = nonbijectivity_points(sigma, s.strip[0], s.strip[1]);
    const auto inv = invert_conormal(sigma);
    Output o;
    Json points = Json::array(), modes = Json::array();
    Table t{{"q_re", "q_im", "exact", "order", "modes"}, {}};
    for (const auto& p : pts) {
        points.push_back(to_json(p));
        std::string ms;
        for (auto m : p.modes) ms += (ms.empty() ? "" : " ") + std::to_string(m);
        t.rows.push_back({fmt(p.q.real()), fmt(p.q.imag()), p.exact ? to_string(*p.exact) : "", std::to_string(p.order), ms});
    }
    for (const auto& g : inv) modes.push_back(to_json(g));
    o.doc = Json{{"operator", to_json(A)},
                 {"spectrum", to_json(*S)},
                 {"strip", s.strip},
                 {"points", points},
                 {"inverse", modes}};
    o.table = t;
    return o;
}

Output cmd_domains(const Settings& s) {
    const auto A = load_operator(s);
    const auto S = load_spectrum(s, A.n());
    const auto dmin = minimal_domain(A, *S, s.gamma, s.p);
    const auto dmax = maximal_domain(A, *S, s.gamma, s.p);
    Json entries = Json::array();
    Table t{{"q_re", "q_im", "exact", "log_powers", "modes", "coupling"}, {}};
    if (dmax.asymptotics) {
        for (const auto& e : dmax.asymptotics->entries) {
            entries.push_back(Json{{"q", to_json(e.q)}, {"log_powers", e.log_powers}, {"modes", e.modes}, {"coupling", e.coupled}});
            std::string ms;
            for (auto m : e.modes) ms += (ms.empty() ? "" : " ") + std::to_string(m);
            t.rows.push_back({fmt(e.q.real()), fmt(e.q.imag()), e.exact ? to_string(*e.exact) : "", std::to_string(e.log_powers),
                              ms, e.coupled ? "true" : "false"});
        }
    }
    Json exts = Json::array();
    const bool laplacian = A.laplacian_scale().has_value();
    if (laplacian) {
        for (const auto& e : enumerate_extensions(A, S, s.gamma, s.p, ExtensionFilter::DilationInvariant)) exts.push_back(to_json(e));
    }
    Output o;
    o.doc = Json{{"operator", to_json(A)},
                 {"minimal", to_json(dmin)},
                 {"maximal", to_json(dmax)},
                 {"maximal_asymptotics", entries},
                 {"extensions_supported", laplacian},
                 {"extensions", exts}};
    o.table = t;
    return o;
}

Output cmd_extensions(const Settings& s) {
    ExtensionFilter f;
    if (s.filter == "all") f = ExtensionFilter::All;
    else if (s.filter == "dilation-invariant") f = ExtensionFilter::DilationInvariant;
    else throw UsageProblem("--filter is all or dilation-invariant");
    const auto A = load_operator(s);
    const auto S = load_spectrum(s, A.n());
    const auto list = enumerate_extensions(A, S, s.gamma, s.p, f);
    Json exts = Json::array();
    Table t{{"label", "dimension", "dilation_invariant", "selfadjoint"}, {}};
    const bool classify = s.gamma == 0.0 && s.p == 2.0;
    for (const auto& e : list) {
        Json j = to_json(e);
        std::string sa = "";
        if (classify && e.dilation_invariant()) {
            const bool v = is_selfadjoint(e);
            j["selfadjoint"] = v;
            sa = v ? "true" : "false";
        } else {
            j["selfadjoint"] = nullptr;
        }
        exts.push_back(j);
        t.rows.push_back({e.label, std::to_string(e.dimension()), e.dilation_invariant() ? "true" : "false", sa});
    }
    Output o;
    o.doc = Json{{"count", list.size()}, {"extensions", exts}};
    o.table = t;
    return o;
}

Output cmd_adjoint(const Settings& s) {
    const auto A = load_operator(s);
    const auto S = load_spectrum(s, A.n());
    const auto ext = load_extension(s, A, S);
    const auto adj = adjoint_extension(ext);
    Output o;
    o.doc = Json{{"extension", to_json(ext)},
                 {"adjoint", to_json(adj)},
                 {"selfadjoint", ext.gamma == 0.0 && ext.p == 2.0 ? Json(is_selfadjoint(ext)) : Json(nullptr)},
                 {"bidual_matches", same_extension(adjoint_extension(adj), ext)}};
    return o;
}

Output cmd_check(const Settings& s) {
    E3Method method;
    if (s.e3_method == "rule") method = E3Method::Rule;
    else if (s.e3_method == "numeric") method = E3Method::Numeric;
    else if (s.e3_method == "both") method = E3Method::Both;
    else throw UsageProblem("--e3-method is rule, numeric or both");
    if (!(s.theta >= 0.0 && s.theta < std::numbers::pi)) throw UsageProblem("--theta must lie in [0, pi)");
    if (s.samples.size() % 2) throw UsageProblem("--samples takes (re, im) pairs");
    const auto A = load_operator(s);
    const auto S = load_spectrum(s, A.n());
    const auto ext = load_extension(s, A, S);
    const Sector sector(s.theta);
    std::vector<Complex> samples;
    for (std::size_t i = 0; i < s.samples.size(); i += 2) samples.emplace_back(s.samples[i], s.samples[i + 1]);
    NumericOptions no;
    no.t_min = s.t_min_e3;
    no.slope_margin = s.slope_margin;
    no.tolerance = s.e3_tolerance;
    EllipticityReport rep = check_ellipticity(A, ext, sector, method, samples, no);
    if (s.e1_angles != 256 || s.e1_radii != 256) {
        rep.e1 = check_E1(A, sector, s.e1_angles, s.e1_radii);
        rep.overall = rep.e1.pass && rep.e2.pass && rep.e3 == Verdict::Pass;
    }
    Json used = Json::array();
    for (const auto& z : samples.empty() ? sector.default_samples() : samples) used.push_back(to_json(z));
    Output o;
    o.doc = Json{{"extension", to_json(ext)},
                 {"theta", s.theta},
                 {"e3_method", s.e3_method},
                 {"samples", used},
                 {"tolerances",
                  Json{{"t_min", no.t_min}, {"t_max_scale", no.t_max_scale}, {"slope_margin", no.slope_margin},
                       {"tolerance", no.tolerance}, {"fit_points", no.fit_points}}},
                 {"report", to_json(rep)},
                 {"overall", rep.overall}};
    o.code = rep.overall ? Success : CheckFailed;
    return o;
}

Output cmd_green(const Settings& s) {
    Settings os = s;
    std::vector<ModeMeromorphic> g;
    std::shared_ptr<const BoundarySpectrum> S;
    int n = s.n;
    if (s.symbol == "laplacian" || s.symbol == "example-abcd") {
        os.op = s.symbol;
        const auto A = load_operator(os);
        n = A.n();
        S = load_spectrum(s, n);
        g = invert_conormal(conormal_symbol(A, *S));
    } else if (names_file(s.symbol)) {
        g = symbol_from_json(read_json_file(s.symbol));
    } else {
        throw UsageProblem("unknown symbol '" + s.symbol + "' (laplacian, example-abcd or a JSON file)");
    }
    const auto u = green_inputs(s, g.size());
    MellinOptions mo;
    mo.tolerance = s.mellin_tolerance;
    const auto act = green_action(g, n, s.gamma1, s.gamma2, u, mo);
    std::vector<double> ts = s.t_samples;
    if (ts.empty())
        for (int i = 0; i < 10; ++i) ts.push_back(0.01 + 0.19 * i / 9);
    Json samples = Json::array();
    Table t{{"mode", "t", "re", "im"}, {}};
    for (std::size_t m = 0; m < g.size(); ++m) {
        for (double x : ts) {
            const Complex v = act.value(m, x);
            samples.push_back(Json{{"mode", m}, {"t", x}, {"value", to_json(v)}});
            t.rows.push_back({std::to_string(m), fmt(x), fmt(v.real()), fmt(v.imag())});
        }
    }
    Json inputs = Json::array();
    for (const auto& x : u) inputs.push_back(to_json(x));
    Json oracle = nullptr;
    if (s.oracle) {
        ContourOptions co;
        co.nodes_per_side = s.contour_nodes;
        co.mellin = mo;
        const auto rows = green_action_contour_oracle(g, n, s.gamma1, s.gamma2, u, ts, co);
        double scale = 0.0, rel = 0.0, abs_gap = 0.0;
        for (const auto& r : rows)
            for (const auto& v : r) scale = std::max(scale, std::abs(v));
        Json jr = Json::array();
        for (std::size_t m = 0; m < rows.size(); ++m) {
            Json row = Json::array();
            for (std::size_t k = 0; k < ts.size(); ++k) {
                const Complex a = act.value(m, ts[k]), c = rows[m][k];
                const double gap = std::abs(a - c), size = std::max(std::abs(a), std::abs(c));
                if (size > 1e-4 * scale) rel = std::max(rel, gap / size);
                else abs_gap = std::max(abs_gap, gap);
                row.push_back(to_json(c));
            }
            jr.push_back(row);
        }
        oracle = Json{{"nodes_per_side", co.nodes_per_side}, {"values", jr}, {"max_relative_gap", rel},
                      {"max_absolute_gap_vanishing", abs_gap}};
    }
    Output o;
    o.doc = Json{{"n", n},
                 {"gamma1", s.gamma1},
                 {"gamma2", s.gamma2},
                 {"tolerances", Json{{"mellin", mo.tolerance}, {"max_depth", mo.max_depth}}},
                 {"inputs", inputs},
                 {"action", to_json(act)},
                 {"samples", samples},
                 {"oracle", oracle}};
    o.table = t;
    return o;
}

DiscreteDomain discrete_domain(const Settings& s) {
    if (s.op != "laplacian") throw Error(ErrorCode::UnsupportedOperator, "resolvent", "the radial solver handles the Laplacian only");
    const auto A = load_operator(s);
    const auto S = load_spectrum(s, A.n());
    if (s.nodes < 10) throw UsageProblem("--nodes must be at least 10");
    if (!(s.t_min > 0.0 && s.t_min < 1.0)) throw UsageProblem("--t-min must lie in (0, 1)");
    return DiscreteDomain::build(load_extension(s, A, S), s.nodes, s.t_min);
}

Json grid_json(const DiscreteDomain& dd) { return Json{{"nodes", dd.nodes}, {"t_min", dd.t_min}, {"h", dd.h}}; }

Output cmd_resolvent(const Settings& s) {
    if (s.lambda.size() != 2) throw UsageProblem("--lambda takes re and im");
    const auto dd = discrete_domain(s);
    const Complex lambda(s.lambda[0], s.lambda[1]);
    const auto res = resolvent_apply(dd, lambda, resolvent_inputs(s));
    const auto est = resolvent_norm(dd, lambda, s.iterations);
    Output o;
    Json decay = nullptr;
    Table t{{"magnitude", "norm", "residual"}, {}};
    if (!s.magnitudes.empty()) {
        const auto fit = norm_decay_fit(dd, s.ray, s.magnitudes);
        decay = to_json(fit);
        decay["arg"] = s.ray;
        std::vector<std::vector<double>> plot;
        for (std::size_t i = 0; i < fit.magnitudes.size(); ++i) {
            t.rows.push_back({fmt(fit.magnitudes[i]), fmt(fit.norms[i]), fmt(fit.residuals[i])});
            plot.push_back({fit.magnitudes[i], fit.norms[i]});
        }
        write_plot(s.plot, {"abs_lambda", "norm"}, plot);
    }
    o.doc = Json{{"extension", to_json(dd.extension)},
                 {"grid", grid_json(dd)},
                 {"tolerances", Json{{"ill_conditioned_rcond", 1e-12}, {"diagnostic_relative", 1e-6}, {"power_iterations", s.iterations},
                                     {"seed", 0x5EED}}},
                 {"result", to_json(res, s.values)},
                 {"norm", Json{{"lambda", to_json(lambda)}, {"value", est.norm}, {"residual", est.residual}}},
                 {"decay", decay}};
    o.table = t;
    return o;
}

Output cmd_spectrum(const Settings& s) {
    if (s.interval.size() != 2) throw UsageProblem("--interval takes two numbers");
    const auto dd = discrete_domain(s);
    const auto sp = detect_spectrum(dd, s.interval[0], s.interval[1], s.tol);
    Json list = Json::array();
    Table t{{"value", "mode", "part", "multiplicity", "rcond"}, {}};
    std::vector<std::vector<double>> plot;
    for (const auto& p : sp) {
        list.push_back(to_json(p));
        t.rows.push_back({fmt(p.value), std::to_string(p.mode), std::to_string(p.part), std::to_string(p.multiplicity), fmt(p.rcond)});
        plot.push_back({double(plot.size()), p.value});
    }
    write_plot(s.plot, {"index", "eigenvalue"}, plot);
    Output o;
    o.doc = Json{{"extension", to_json(dd.extension)},
                 {"grid", grid_json(dd)},
                 {"interval", s.interval},
                 {"tolerance", s.tol},
                 {"eigenvalues", list}};
    o.table = t;
    return o;
}

Output cmd_heat(const Settings& s) {
    HeatScheme scheme;
    if (s.scheme == "implicit-euler") scheme = HeatScheme::ImplicitEuler;
    else if (s.scheme == "crank-nicolson") scheme = HeatScheme::CrankNicolson;
    else throw UsageProblem("--scheme is implicit-euler or crank-nicolson");
    const auto dd = discrete_domain(s);
    const auto rep = heat_solve(dd, heat_forcing_battery(dd.modes()), s.T, s.steps, s.q, scheme);
    Table t;
    t.header.push_back("time");
    for (const auto& tr : rep.trajectories) t.header.push_back(tr.forcing);
    std::vector<std::vector<double>> plot;
    for (std::size_t k = 0; k < rep.trajectories.front().times.size(); ++k) {
        std::vector<std::string> row{fmt(rep.trajectories.front().times[k])};
        std::vector<double> prow{rep.trajectories.front().times[k]};
        for (const auto& tr : rep.trajectories) {
            row.push_back(fmt(tr.norms[k]));
            prow.push_back(tr.norms[k]);
        }
        t.rows.push_back(row);
        plot.push_back(prow);
    }
    write_plot(s.plot, t.header, plot);
    Output o;
    o.doc = Json{{"extension", to_json(dd.extension)}, {"grid", grid_json(dd)}, {"report", to_json(rep)}};
    o.table = t;
    return o;
}

int cmd_selftest(const Settings& s, std::ostream& out) {
    std::vector<std::string> ids = s.criteria.empty() ? acceptance::criterion_ids() : s.criteria;
    for (auto& id : ids) {
        const std::string norm = acceptance::normalize_id(id);
        if (norm.empty()) throw UsageProblem("unknown criterion '" + id + "'");
        id = norm;
    }
    std::vector<std::string> failed;
    for (const auto& id : ids) {
        const auto o = acceptance::run_criterion(id, {!s.full});
        out << acceptance::format_line(o) << std::endl;
        if (!o.pass) failed.push_back(id);
    }
    if (failed.empty()) {
        out << "all " << ids.size() << " criteria passed\n";
        return Success;
    }
    out << "failed:";
    for (const auto& f : failed) out << ' ' << f;
    out << '\n';
    return CheckFailed;
}

void add_model_options(CLI::App* c, Settings& s) {
    c->add_option("--operator", s.op, "laplacian, example-abcd or an operator JSON file (@path)");
    c->add_option("--n", s.n, "Cross-section dimension for the laplacian preset")->check(CLI::NonNegativeNumber);
    c->add_option("--modes", s.modes, "Boundary spectrum truncation");
    c->add_option("--spectrum", s.spectrum, "preset or a spectrum JSON file (@path)");
}

void add_weight_options(CLI::App* c, Settings& s) {
    c->add_option("--gamma", s.gamma, "Weight");
    c->add_option("--p", s.p, "Integrability exponent");
}

void add_extension_options(CLI::App* c, Settings& s, const std::string& fallback) {
    s.extension = fallback;
    c->add_option("--extension", s.extension, "minimal, maximal, friedrichs, q=<v>:<kind>;... or @file");
    c->add_option("--extension-index", s.extension_index, "Entry to use when the file lists several extensions");
}

void add_grid_options(CLI::App* c, Settings& s) {
    c->add_option("--nodes", s.nodes, "Radial grid nodes");
    c->add_option("--t-min", s.t_min, "Inner radius of the truncated cone");
    c->add_option("--plot-data", s.plot, "Write x y columns to this file");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    Settings s;
    CLI::App app{"Closed extensions, ellipticity and resolvents of cone Laplacians", "cone_lab"};
    app.option_defaults()->always_capture_default();
    app.require_subcommand(1);
    app.fallthrough();
    app.add_flag("--csv", s.csv, "Emit CSV instead of JSON");
    app.add_option("--jobs", s.jobs, "Worker cap (falls back to CONE_LAB_JOBS)")->check(CLI::NonNegativeNumber);

    auto* poles = app.add_subcommand("poles", "Non-bijectivity points of the conormal symbol");
    add_model_options(poles, s);
    poles->add_option("--strip", s.strip, "Real-part window a b")->expected(2);

    auto* domains = app.add_subcommand("domains", "Minimal and maximal domains");
    add_model_options(domains, s);
    add_weight_options(domains, s);

    auto* extensions = app.add_subcommand("extensions", "Enumerate closed extensions of the Laplacian");
    add_model_options(extensions, s);
    add_weight_options(extensions, s);
    extensions->add_option("--filter", s.filter, "all or dilation-invariant");

    auto* adjoint = app.add_subcommand("adjoint", "Adjoint of a dilation invariant extension");
    add_model_options(adjoint, s);
    add_weight_options(adjoint, s);
    add_extension_options(adjoint, s, "friedrichs");

    auto* check = app.add_subcommand("check", "Ellipticity conditions E1-E3");
    add_model_options(check, s);
    add_weight_options(check, s);
    add_extension_options(check, s, "friedrichs");
    check->add_option("--theta", s.theta, "Sector angle");
    check->add_option("--e3-method", s.e3_method, "rule, numeric or both");
    check->add_option("--samples", s.samples, "Resolvent samples as re im pairs");
    check->add_option("--e3-t-min", s.t_min_e3, "Inner radius of the numeric model cone");
    check->add_option("--slope-margin", s.slope_margin, "Inconclusive band around the slope boundary");
    check->add_option("--e3-tolerance", s.e3_tolerance, "ODE integration tolerance");
    check->add_option("--e1-angles", s.e1_angles, "E1 grid angles");
    check->add_option("--e1-radii", s.e1_radii, "E1 grid radii");

    auto* green = app.add_subcommand("green", "Finite rank Green operator from the residue formula");
    green->add_option("--symbol", s.symbol, "laplacian, example-abcd or a symbol JSON file (@path)");
    green->add_option("--n", s.n, "Cross-section dimension")->check(CLI::NonNegativeNumber);
    green->add_option("--modes", s.modes, "Boundary spectrum truncation");
    green->add_option("--spectrum", s.spectrum, "preset or a spectrum JSON file (@path)");
    green->add_option("--gamma1", s.gamma1, "Lower weight");
    green->add_option("--gamma2", s.gamma2, "Upper weight");
    green->add_option("--input", s.input, "Radial function JSON file");
    green->add_option("--t", s.t_samples, "Sample radii");
    green->add_flag("--oracle", s.oracle, "Cross-check against the contour integral");
    green->add_option("--mellin-tolerance", s.mellin_tolerance, "Mellin quadrature tolerance");
    green->add_option("--contour-nodes", s.contour_nodes, "Trapezoid nodes per rectangle side");

    auto* resolvent = app.add_subcommand("resolvent", "Resolvent solve, norm and decay fit");
    add_model_options(resolvent, s);
    add_weight_options(resolvent, s);
    add_extension_options(resolvent, s, "friedrichs");
    add_grid_options(resolvent, s);
    resolvent->add_option("--lambda", s.lambda, "Spectral parameter re im")->expected(2);
    resolvent->add_option("--ray", s.ray, "Argument of the decay ray");
    resolvent->add_option("--magnitudes", s.magnitudes, "|lambda| values for the decay fit");
    resolvent->add_option("--iterations", s.iterations, "Power iterations");
    resolvent->add_option("--input", s.input, "Right-hand side JSON file");
    resolvent->add_flag("--values", s.values, "Include nodal solution values");

    auto* spectrum = app.add_subcommand("spectrum", "Eigenvalues of a selfadjoint realization");
    add_model_options(spectrum, s);
    add_extension_options(spectrum, s, "friedrichs");
    add_grid_options(spectrum, s);
    spectrum->add_option("--interval", s.interval, "Search interval a b")->expected(2);
    spectrum->add_option("--tol", s.tol, "Bisection tolerance");

    auto* heat = app.add_subcommand("heat", "Heat problem over the forcing battery");
    add_model_options(heat, s);
    add_extension_options(heat, s, "friedrichs");
    add_grid_options(heat, s);
    heat->add_option("--T", s.T, "Final time");
    heat->add_option("--steps", s.steps, "Time steps");
    heat->add_option("--q", s.q, "Time integrability exponent");
    heat->add_option("--scheme", s.scheme, "implicit-euler or crank-nicolson");

    auto* selftest = app.add_subcommand("selftest", "Run the acceptance battery");
    selftest->add_option("--criteria", s.criteria, "Subset such as A2 A5");
    selftest->add_flag("--full", s.full, "Use the full resolution grids");

    std::vector<const char*> args(argv, argv + argc);
    try {
        app.parse(argc, args.data());
    } catch (const CLI::CallForHelp& e) {
        app.exit(e, out, err);
        return Success;
    } catch (const CLI::CallForAllHelp& e) {
        app.exit(e, out, err);
        return Success;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n';
        return UsageError;
    }
    if (s.jobs > 0) set_default_jobs(static_cast<unsigned>(s.jobs));

    CLI::App* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    Json config = config_of(*sub, name);
    config["options"]["csv"] = s.csv ? "true" : "false";
    config["options"]["jobs"] = std::to_string(s.jobs);

    try {
        if (name == "selftest") return cmd_selftest(s, out);
        Output o;
        if (name == "poles") o = cmd_poles(s);
        else if (name == "domains") o = cmd_domains(s);
        else if (name == "extensions") o = cmd_extensions(s);
        else if (name == "adjoint") o = cmd_adjoint(s);
        else if (name == "check") o = cmd_check(s);
        else if (name == "green") o = cmd_green(s);
        else if (name == "resolvent") o = cmd_resolvent(s);
        else if (name == "spectrum") o = cmd_spectrum(s);
        else if (name == "heat") o = cmd_heat(s);
        Json doc{{"config", config}};
        for (auto it = o.doc.begin(); it != o.doc.end(); ++it) doc[it.key()] = it.value();
        if (s.csv) {
            Table t = o.table ? *o.table : Table{{"key", "value"}, {}};
            if (!o.table) flatten(o.doc, "", t);
            write_csv(t, out);
        } else {
            out << doc.dump(2) << '\n';
        }
        return o.code;
    } catch (const UsageProblem& e) {
        err << "usage error: " << e.what() << '\n';
        return UsageError;
    } catch (const Error& e) {
        err << e.name() << " (" << e.module() << "): " << e.what() << '\n';
        if (!s.csv) {
            Json doc{{"config", config}, {"error", Json{{"name", e.name()}, {"module", e.module()}, {"message", e.what()}}}};
            out << doc.dump(2) << '\n';
        }
        return NumericalError;
    } catch (const nlohmann::json::exception& e) {
        err << "InvalidInput (io): " << e.what() << '\n';
        if (!s.csv) {
            Json doc{{"config", config}, {"error", Json{{"name", "InvalidInput"}, {"module", "io"}, {"message", e.what()}}}};
            out << doc.dump(2) << '\n';
        }
        return NumericalError;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return NumericalError;
    }
}

}  // namespace conelab::cli
