#include "conelab/io.hpp"
#include "conelab/error.hpp"

#include <cmath>
#include <sstream>

namespace conelab {

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::InvalidInput, "io", what); }

const Json& field(const Json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) bad(std::string("missing field '") + key + "'");
    return j.at(key);
}

Json optional_rational(const std::optional<Rational>& r) { return r ? Json(to_string(*r)) : Json(nullptr); }

Json rational_poly_json(const RationalPoly& p) {
    Json a = Json::array();
    for (const auto& c : p.coeffs()) a.push_back(to_string(c));
    return a;
}

RationalPoly rational_poly_from_json(const Json& j) {
    if (!j.is_array()) bad("polynomial coefficients must be an array");
    std::vector<Rational> c;
    for (const auto& x : j) c.push_back(rational_from_json(x));
    return RationalPoly(std::move(c));
}

Json matrix_json(const Eigen::MatrixXcd& M) {
    Json cols = Json::array();
    for (Eigen::Index c = 0; c < M.cols(); ++c) {
        Json col = Json::array();
        for (Eigen::Index r = 0; r < M.rows(); ++r) col.push_back(to_json(M(r, c)));
        cols.push_back(col);
    }
    return cols;
}

SelectionKind kind_from_string(const std::string& s) {
    if (s == "zero") return SelectionKind::Zero;
    if (s == "full") return SelectionKind::Full;
    if (s == "omega") return SelectionKind::Omega;
    if (s == "log-only") return SelectionKind::LogOnly;
    if (s == "subspace") return SelectionKind::Subspace;
    bad("unknown selection kind '" + s + "'");
}

std::string q_text(const Exponent& e) {
    if (e.exact) return to_string(*e.exact);
    std::ostringstream os;
    os.precision(12);
    os << e.q.real();
    return os.str();
}

}  // namespace

Json to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Complex complex_from_json(const Json& j) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) return {j[0].get<double>(), j[1].get<double>()};
    bad("complex numbers are written as [re, im]");
}

Rational rational_from_json(const Json& j) {
    if (j.is_number_integer()) return Rational(j.get<long long>());
    if (j.is_number()) {
        const double x = j.get<double>();
        if (auto r = rationalize(x)) return *r;
        return exact_rational(x);
    }
    if (j.is_string()) return parse_rational(j.get<std::string>());
    bad("expected a rational number");
}

ConeOperator operator_from_json(const Json& j) {
    const int mu = field(j, "mu").get<int>();
    const int n = field(j, "n").get<int>();
    if (mu < 1) bad("mu must be at least 1");
    std::vector<std::vector<CoefficientTerm>> coeffs(static_cast<std::size_t>(mu + 1));
    for (const auto& entry : field(j, "coeffs")) {
        if (!entry.is_array() || entry.size() != 2) bad("each coefficient entry is [j, [[t_power, poly], ...]]");
        const int idx = entry[0].get<int>();
        if (idx < 0 || idx > mu) bad("coefficient index outside 0..mu");
        for (const auto& term : entry[1]) {
            if (!term.is_array() || term.size() != 2) bad("each term is [t_power, [lambda coefficients]]");
            coeffs[static_cast<std::size_t>(idx)].push_back({term[0].get<int>(), rational_poly_from_json(term[1])});
        }
    }
    const std::string name = j.value("name", std::string("custom"));
    const std::string interior = j.value("interior", std::string("cone-metric"));
    return ConeOperator(mu, n, std::move(coeffs), name, interior);
}

Json to_json(const ConeOperator& A) {
    Json coeffs = Json::array();
    for (int j = 0; j <= A.mu(); ++j) {
        Json terms = Json::array();
        for (const auto& t : A.coefficient(j)) terms.push_back(Json::array({t.t_power, rational_poly_json(t.lambda_poly)}));
        coeffs.push_back(Json::array({j, terms}));
    }
    return Json{{"name", A.name()}, {"mu", A.mu()}, {"n", A.n()}, {"interior", A.interior()}, {"coeffs", coeffs}};
}

BoundarySpectrum spectrum_from_json(const Json& j) {
    const int dim = field(j, "dim_boundary").get<int>();
    std::vector<std::pair<double, int>> entries;
    for (const auto& e : field(j, j.contains("modes") ? "modes" : "eigenvalues")) {
        if (e.is_number()) entries.push_back({e.get<double>(), 1});
        else if (e.is_array() && e.size() == 2) entries.push_back({e[0].get<double>(), e[1].get<int>()});
        else if (e.is_object()) entries.push_back({field(e, "eigenvalue").get<double>(), e.value("multiplicity", 1)});
        else bad("modes are numbers, [value, multiplicity] pairs or {eigenvalue, multiplicity} objects");
    }
    return custom_spectrum(entries, dim);
}

Json to_json(const BoundarySpectrum& S) {
    Json modes = Json::array();
    for (const auto& m : S.modes()) {
        modes.push_back(Json{{"label", m.label}, {"eigenvalue", m.eigenvalue}, {"exact", optional_rational(m.exact)},
                             {"multiplicity", m.multiplicity}});
    }
    Json j{{"source", to_string(S.source())}, {"dim_boundary", S.dim_boundary()}, {"modes", modes}};
    if (S.source() == SpectrumSource::Sphere) j["sphere_dimension"] = S.sphere_dimension();
    return j;
}

Json to_json(const ModeMeromorphic& g) {
    Json poles = Json::array();
    for (const auto& p : g.poles()) {
        Json laurent = Json::array();
        for (const auto& c : p.laurent) laurent.push_back(to_json(c));
        Json le = Json::array();
        for (const auto& c : p.laurent_exact) le.push_back(to_string(c));
        poles.push_back(Json{{"q", to_json(p.value)}, {"exact", optional_rational(p.exact)}, {"order", p.order},
                             {"laurent", laurent}, {"laurent_exact", le}});
    }
    return Json{{"mode", g.mode()}, {"exact", g.is_exact()}, {"poles", poles}};
}

Json to_json(const NonBijectivityPoint& p) {
    Json modes = Json::array();
    for (auto m : p.modes) modes.push_back(m);
    return Json{{"q", to_json(p.q)}, {"exact", optional_rational(p.exact)}, {"order", p.order}, {"modes", modes}};
}

Json to_json(const AsymptoticSpace& space) {
    Json entries = Json::array();
    for (const auto& e : space.entries) {
        entries.push_back(Json{{"q", to_json(e.q)}, {"exact", optional_rational(e.exact)}, {"log_powers", e.log_powers},
                               {"modes", e.modes}, {"coupling", e.coupled}});
    }
    Json gens = Json::array();
    for (const auto& g : space.generators) {
        Json terms = Json::array();
        for (const auto& t : g.terms) {
            terms.push_back(Json{{"q", to_json(t.q)}, {"q_exact", optional_rational(t.q_exact)}, {"log_power", t.log_power},
                                 {"coefficient", to_json(t.coeff)}, {"coefficient_exact", optional_rational(t.coeff_exact)}});
        }
        gens.push_back(Json{{"mode", g.mode}, {"multiplicity", g.multiplicity}, {"terms", terms}});
    }
    return Json{{"n", space.n},
                {"mu", space.mu},
                {"gamma", space.gamma},
                {"window", Json::array({space.window_lower, space.window_upper})},
                {"epsilon", space.epsilon},
                {"directness", space.directness},
                {"dimension", space.dimension},
                {"entries", entries},
                {"generators", gens}};
}

Json to_json(const DomainDescription& d) {
    Json poles = Json::array();
    for (const auto& p : d.critical_line_poles) poles.push_back(to_json(p));
    Json j{{"kind", to_string(d.kind)},
           {"sobolev_s", d.sobolev_s},
           {"weight", d.weight},
           {"space", "H^{" + std::to_string(d.sobolev_s) + "," + [&] {
                std::ostringstream os;
                os << d.weight;
                return os.str();
            }() + "}"},
           {"critical_line", d.critical_line},
           {"critical_line_poles", poles}};
    if (d.asymptotics) j["asymptotics"] = to_json(*d.asymptotics);
    return j;
}

Json to_json(const Selection& s) {
    const auto& e = s.exponent;
    Json j{{"q", to_json(e.q)},       {"q_exact", optional_rational(e.exact)}, {"mode", e.mode},
           {"sign", e.sign},          {"log_pair", e.log_pair},                {"multiplicity", e.multiplicity},
           {"kind", to_string(s.kind)}, {"dimension", s.dimension()}};
    if (s.kind == SelectionKind::Subspace) j["basis"] = matrix_json(s.basis);
    return j;
}

Json to_json(const Extension& ext) {
    Json sels = Json::array();
    for (const auto& s : ext.selections) sels.push_back(to_json(s));
    Json spectrum{{"source", ext.spectrum ? to_string(ext.spectrum->source()) : "custom"}};
    if (ext.spectrum) {
        spectrum["modes"] = ext.spectrum->size();
        spectrum["dim_boundary"] = ext.spectrum->dim_boundary();
        if (ext.spectrum->source() == SpectrumSource::Sphere) spectrum["sphere_dimension"] = ext.spectrum->sphere_dimension();
        if (ext.spectrum->source() == SpectrumSource::Custom) {
            Json ev = Json::array();
            for (const auto& m : ext.spectrum->modes()) ev.push_back(Json::array({m.eigenvalue, m.multiplicity}));
            spectrum["eigenvalues"] = ev;
        }
    }
    return Json{{"operator", ext.operator_name},
                {"n", ext.n},
                {"gamma", ext.gamma},
                {"p", ext.p},
                {"label", ext.label},
                {"spec", selection_spec(ext)},
                {"dimension", ext.dimension()},
                {"dilation_invariant", ext.dilation_invariant()},
                {"spectrum", spectrum},
                {"selections", sels}};
}

Extension extension_from_json(const Json& j) {
    Extension ext;
    ext.operator_name = j.value("operator", std::string("laplacian"));
    ext.n = field(j, "n").get<int>();
    ext.gamma = field(j, "gamma").get<double>();
    ext.p = j.value("p", 2.0);
    ext.label = j.value("label", std::string());
    const Json& sp = field(j, "spectrum");
    const std::string source = field(sp, "source").get<std::string>();
    if (source == "custom") {
        Json doc{{"dim_boundary", field(sp, "dim_boundary")}, {"eigenvalues", field(sp, "eigenvalues")}};
        ext.spectrum = std::make_shared<BoundarySpectrum>(spectrum_from_json(doc));
    } else if (source == "circle") {
        ext.spectrum = std::make_shared<BoundarySpectrum>(circle_spectrum(field(sp, "modes").get<int>()));
    } else if (source == "sphere") {
        ext.spectrum = std::make_shared<BoundarySpectrum>(
            sphere_spectrum(field(sp, "sphere_dimension").get<int>(), field(sp, "modes").get<int>()));
    } else {
        bad("unknown spectrum source '" + source + "'");
    }
    if (ext.spectrum->dim_boundary() != ext.n) bad("spectrum dimension differs from n");
    const auto exps = admissible_exponents(ext.n, *ext.spectrum, ext.gamma);
    for (const auto& js : field(j, "selections")) {
        const std::size_t mode = field(js, "mode").get<std::size_t>();
        const int sign = js.value("sign", 1);
        const Exponent* e = nullptr;
        for (const auto& x : exps)
            if (x.mode == mode && (x.log_pair || x.sign == sign)) e = &x;
        if (!e) bad("selection refers to an exponent outside I_gamma");
        const SelectionKind kind = kind_from_string(field(js, "kind").get<std::string>());
        if ((kind == SelectionKind::Omega || kind == SelectionKind::LogOnly) && !e->log_pair) {
            bad("omega and log-only selections exist only for the log pair");
        }
        if (kind == SelectionKind::Subspace) {
            const Json& cols = field(js, "basis");
            Eigen::MatrixXcd B(e->multiplicity, static_cast<Eigen::Index>(cols.size()));
            for (std::size_t c = 0; c < cols.size(); ++c) {
                if (cols[c].size() != static_cast<std::size_t>(e->multiplicity)) bad("basis vector has the wrong length");
                for (int r = 0; r < e->multiplicity; ++r)
                    B(r, static_cast<Eigen::Index>(c)) = complex_from_json(cols[c][static_cast<std::size_t>(r)]);
            }
            ext.selections.push_back(make_subspace_selection(*e, B));
        } else {
            ext.selections.push_back({*e, kind, {}});
        }
    }
    for (const auto& e : exps)
        if (!ext.find(e)) ext.selections.push_back({e, SelectionKind::Zero, {}});
    std::stable_sort(ext.selections.begin(), ext.selections.end(), [](const Selection& a, const Selection& b) {
        if (a.exponent.q.real() != b.exponent.q.real()) return a.exponent.q.real() < b.exponent.q.real();
        return a.exponent.mode < b.exponent.mode;
    });
    if (ext.label.empty()) ext.label = selection_spec(ext);
    return ext;
}

std::string selection_spec(const Extension& ext) {
    if (ext.selections.empty()) return "minimal";
    std::string out;
    for (const auto& s : ext.selections) {
        if (!out.empty()) out += ';';
        std::string kind = to_string(s.kind);
        if (s.kind == SelectionKind::Subspace && s.basis.cols() == 1) {
            for (Eigen::Index i = 0; i < s.basis.rows(); ++i)
                if (std::abs(std::abs(s.basis(i, 0)) - 1.0) < 1e-12) kind = "e" + std::to_string(i);
        }
        out += "q=" + q_text(s.exponent) + ":" + kind;
    }
    return out;
}

Extension extension_from_spec(const std::string& spec, const ConeOperator& A, std::shared_ptr<const BoundarySpectrum> S,
                              double gamma, double p) {
    if (spec == "minimal") return minimal_extension(A, S, gamma, p);
    if (spec == "maximal") return maximal_extension(A, S, gamma, p);
    if (spec == "friedrichs") {
        if (!A.laplacian_scale()) throw Error(ErrorCode::UnsupportedOperator, "io", "the Friedrichs extension needs the Laplacian");
        Extension e = friedrichs_domain(S, A.n(), gamma);
        e.operator_name = A.name();
        e.p = p;
        return e;
    }
    Extension ext = minimal_extension(A, S, gamma, p);
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ';')) {
        if (item.empty()) continue;
        const auto colon = item.find(':');
        if (item.rfind("q=", 0) != 0 || colon == std::string::npos) bad("selection items look like q=<value>:<kind>, got '" + item + "'");
        const std::string qs = item.substr(2, colon - 2);
        const std::string kind = item.substr(colon + 1);
        const Rational qv = parse_rational(qs);
        Selection* sel = nullptr;
        for (auto& s : ext.selections) {
            const bool match = s.exponent.exact ? *s.exponent.exact == qv : std::abs(s.exponent.q.real() - to_double(qv)) < 1e-9;
            if (match) sel = &s;
        }
        if (!sel) bad("q=" + qs + " is not an exponent of I_gamma");
        if (kind.size() > 1 && kind[0] == 'e' && std::isdigit(static_cast<unsigned char>(kind[1]))) {
            const int i = std::stoi(kind.substr(1));
            if (sel->exponent.log_pair || i < 0 || i >= sel->exponent.multiplicity) bad("coordinate vector " + kind + " out of range");
            Eigen::MatrixXcd v = Eigen::MatrixXcd::Zero(sel->exponent.multiplicity, 1);
            v(i, 0) = 1.0;
            *sel = make_subspace_selection(sel->exponent, v);
            continue;
        }
        const SelectionKind k = kind_from_string(kind);
        if (k == SelectionKind::Subspace) bad("general subspaces are given in a JSON extension file");
        if ((k == SelectionKind::Omega || k == SelectionKind::LogOnly) && !sel->exponent.log_pair) {
            bad("omega and log-only apply to the log pair only");
        }
        sel->kind = k;
        sel->basis.resize(0, 0);
    }
    ext.label = selection_spec(ext);
    return ext;
}

Json to_json(const E1Result& r) {
    Json j{{"pass", r.pass}, {"grid", Json::array({r.angles, r.radii})}, {"symbol_real_range", Json::array({r.min_real, r.max_real})},
           {"symbol_max_abs_imag", r.max_abs_imag}};
    if (r.witness) {
        j["witness"] = Json{{"xi_norm_sq", r.witness->xi_norm_sq}, {"tau", r.witness->tau}, {"t", r.witness->t},
                            {"value_of_minus_A", to_json(r.witness->value)}};
    } else {
        j["witness"] = nullptr;
    }
    return j;
}

Json to_json(const RuleResult& r) { return Json{{"verdict", to_string(r.verdict)}, {"rule", r.rule}, {"reason", r.reason}}; }

Json to_json(const NumericResult& r) {
    Json details = Json::array();
    for (const auto& d : r.details) {
        details.push_back(Json{{"mode", d.mode},
                               {"lambda", to_json(d.lambda)},
                               {"nu", d.nu},
                               {"q_plus", to_json(d.q_plus)},
                               {"q_minus", to_json(d.q_minus)},
                               {"plus", to_string(d.plus)},
                               {"minus", to_string(d.minus)},
                               {"slope", d.slope},
                               {"dominant_present", d.dominant_present},
                               {"subdominant_present", d.subdominant_present},
                               {"subdominant_ratio", std::isfinite(d.subdominant_ratio) ? Json(d.subdominant_ratio) : Json(nullptr)},
                               {"index", d.index},
                               {"kernel_dimension", d.kernel_dimension},
                               {"inconclusive", d.inconclusive},
                               {"spectral", d.spectral}});
    }
    return Json{{"verdict", to_string(r.verdict)},
                {"reason", r.reason},
                {"inconclusive", r.inconclusive},
                {"witness", r.witness ? Json(*r.witness) : Json(nullptr)},
                {"details", details}};
}

Json to_json(const EllipticityReport& r) {
    Json e2{{"pass", r.e2.pass}, {"offending", r.e2.offending}};
    return Json{{"e1", to_json(r.e1)},
                {"e2", e2},
                {"e3", Json{{"verdict", to_string(r.e3)},
                            {"rule", r.e3_rule ? to_json(*r.e3_rule) : Json(nullptr)},
                            {"numeric", r.e3_numeric ? to_json(*r.e3_numeric) : Json(nullptr)}}},
                {"overall", r.overall}};
}

RadialFunction radial_function_from_json(const Json& j) {
    const std::string base = field(j, "base").get<std::string>();
    RadialFunction u;
    if (base == "zero") return u;
    if (base == "bump") u = RadialFunction::bump(field(j, "a").get<double>(), field(j, "b").get<double>());
    else if (base == "indicator") u = RadialFunction::indicator(field(j, "a").get<double>(), field(j, "b").get<double>());
    else if (base == "cutoff") u = RadialFunction::cutoff();
    else if (base == "samples") {
        std::vector<double> t = field(j, "t").get<std::vector<double>>();
        std::vector<Complex> v;
        for (const auto& x : field(j, "values")) v.push_back(complex_from_json(x));
        u = RadialFunction::samples(std::move(t), std::move(v));
    } else {
        bad("unknown radial function base '" + base + "'");
    }
    if (j.contains("power")) u.power = complex_from_json(j.at("power"));
    if (j.contains("log_power")) u.log_power = j.at("log_power").get<int>();
    if (j.contains("scale")) u.scale = complex_from_json(j.at("scale"));
    return u;
}

Json to_json(const RadialFunction& u) {
    Json j{{"base", to_string(u.base)}};
    if (u.base == RadialFunction::Base::Bump || u.base == RadialFunction::Base::Indicator) {
        j["a"] = u.a;
        j["b"] = u.b;
    }
    if (u.base == RadialFunction::Base::Samples) {
        j["t"] = u.t;
        Json v = Json::array();
        for (const auto& x : u.values) v.push_back(to_json(x));
        j["values"] = v;
    }
    j["power"] = to_json(u.power);
    j["log_power"] = u.log_power;
    j["scale"] = to_json(u.scale);
    return j;
}

Json to_json(const GreenAction& a) {
    Json terms = Json::array();
    for (const auto& t : a.terms) {
        terms.push_back(Json{{"mode", t.mode}, {"pole", to_json(t.pole)}, {"pole_exact", optional_rational(t.pole_exact)},
                             {"log_power", t.log_power}, {"zeta", to_json(t.zeta)}});
    }
    return Json{{"n", a.n}, {"gamma1", a.gamma1}, {"gamma2", a.gamma2}, {"rank", a.rank()}, {"generators", terms}};
}

std::vector<ModeMeromorphic> symbol_from_json(const Json& j) {
    std::vector<ModeMeromorphic> out;
    std::size_t idx = 0;
    for (const auto& m : field(j, "modes")) {
        const RationalPoly num = rational_poly_from_json(field(m, "num"));
        const RationalPoly den = rational_poly_from_json(field(m, "den"));
        if (den.is_zero()) bad("symbol denominator vanishes");
        out.push_back(ModeMeromorphic::from_exact(m.value("mode", idx), RationalFunctionQ(num, den)));
        ++idx;
    }
    return out;
}

Json to_json(const DomainDiagnostic& d) {
    return Json{{"mode", d.mode},
                {"part", d.part},
                {"behaviour", to_string(d.behaviour)},
                {"q_plus", to_json(d.q_plus)},
                {"q_minus", to_json(d.q_minus)},
                {"coeff_allowed", to_json(d.coeff_allowed)},
                {"coeff_excluded", to_json(d.coeff_excluded)},
                {"excluded_relative", d.excluded_relative},
                {"continuum_excluded_relative", d.continuum_excluded_relative},
                {"ok", d.ok}};
}

Json to_json(const ResolventResult& r, bool include_values) {
    Json sols = Json::array();
    for (const auto& s : r.solutions) {
        Json comp = Json::array();
        for (Eigen::Index i = 0; i < s.component.size(); ++i) comp.push_back(to_json(s.component(i)));
        Json js{{"mode", s.mode}, {"part", s.part}, {"component", comp}};
        if (include_values) {
            Json v = Json::array();
            for (Eigen::Index i = 0; i < s.values.size(); ++i) v.push_back(to_json(s.values(i)));
            js["values"] = v;
        }
        sols.push_back(js);
    }
    Json diags = Json::array();
    for (const auto& d : r.diagnostics) diags.push_back(to_json(d));
    return Json{{"lambda", to_json(r.lambda)}, {"residual", r.residual}, {"norm_u", r.norm_u}, {"norm_f", r.norm_f},
                {"solutions", sols}, {"diagnostics", diags}};
}

Json to_json(const DecayFit& f) {
    return Json{{"slope", f.slope},       {"intercept", f.intercept}, {"tail_slope", f.tail_slope},
                {"magnitudes", f.magnitudes}, {"norms", f.norms},         {"residuals", f.residuals}};
}

Json to_json(const SpectralPoint& p) {
    return Json{{"value", p.value}, {"mode", p.mode}, {"part", p.part}, {"multiplicity", p.multiplicity}, {"rcond", p.rcond}};
}

Json to_json(const HeatReport& r) {
    Json trs = Json::array();
    for (const auto& t : r.trajectories) {
        trs.push_back(Json{{"forcing", t.forcing}, {"ratio", t.ratio}, {"times", t.times}, {"norms", t.norms},
                           {"final_norm", t.final_state.norm_u}});
    }
    return Json{{"scheme", r.scheme == HeatScheme::ImplicitEuler ? "implicit-euler" : "crank-nicolson"},
                {"T", r.T},
                {"steps", r.steps},
                {"q", r.q},
                {"first_eigenvalue", r.first_eigenvalue},
                {"oracle_bound", r.oracle_bound},
                {"max_ratio", r.max_ratio},
                {"trajectories", trs}};
}

}  // namespace conelab
