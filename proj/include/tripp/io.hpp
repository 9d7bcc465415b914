#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tripp/pipeline.hpp"

namespace tripp {

using Json = nlohmann::json;

/// Any failure to read the input data: malformed literals, malformed JSON
/// (the message carries the byte position), missing required fields.
struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

// ---------------------------------------------------------------------------
// Rational numbers as `num` or `num/den` text.
// ---------------------------------------------------------------------------

inline std::string format_rational(Rational r) {
    std::string s = std::to_string(r.num);
    if (r.den != 1) s += "/" + std::to_string(r.den);
    return s;
}

inline Rational parse_rational_text(const std::string& s) {
    auto slash = s.find('/');
    if (slash == std::string::npos) return Rational(std::stol(s));
    return Rational(std::stol(s.substr(0, slash)), std::stol(s.substr(slash + 1)));
}

// ---------------------------------------------------------------------------
// JSON building blocks: fields, characters, rationals, form records.
// ---------------------------------------------------------------------------

namespace detail {

inline const Json& require(const Json& j, const char* key, const char* where) {
    auto it = j.find(key);
    if (it == j.end())
        throw ParseError(std::string(where) + ": missing required field `" + key + "`");
    return *it;
}

inline Rational parse_rational_json(const Json& j) {
    if (j.is_number_integer()) return Rational(j.get<long>());
    return parse_rational_text(j.get_ref<const std::string&>());
}

} // namespace detail

inline Json emit_field(const FieldPtr& F) {
    Json e = Json::array();
    // Eisenstein coefficients in the unramified power basis, lowest degree first
    if (F->ram_degree > 1)
        for (const auto& row : F->eis_lower) {
            Json coeff = Json::array();
            for (const auto& c : row) coeff.push_back(c.get_str());
            e.push_back(coeff);
        }
    return Json{{"p", F->p},
                {"unram_degree", F->unram_degree},
                {"eisenstein", e},
                {"precision_cap", F->precision_cap}};
}

inline FieldPtr parse_field(const Json& j) {
    long p = detail::require(j, "p", "field").get<long>();
    int f = j.value("unram_degree", 1);
    if (!j.contains("precision_cap")) throw ParseError("field: precision fields missing");
    int cap = j["precision_cap"].get<int>();
    std::vector<std::vector<mpz_class>> eis;
    if (j.contains("eisenstein")) {
        for (const auto& coeff : j["eisenstein"]) {
            std::vector<mpz_class> row;
            for (const auto& c : coeff)
                row.emplace_back(c.is_string() ? mpz_class(c.get<std::string>(), 10)
                                               : mpz_class(c.get<long>()));
            eis.push_back(std::move(row));
        }
    }
    return make_field(p, f, eis, cap);
}

inline Json emit_character(const DirichletCharacter& chi) {
    Json vals = Json::array();
    for (const auto& v : chi.values) vals.push_back(to_literal(v));
    return Json{{"modulus", chi.modulus}, {"values", vals}};
}

/// Characters are ingested as a full value table on residues; the table is
/// validated (support on units, multiplicativity on a full residue scan).
inline DirichletCharacter parse_character(const Json& j, const FieldPtr& F, const char* where) {
    if (j.is_null()) return DirichletCharacter::trivial(F);
    long mod = detail::require(j, "modulus", where).get<long>();
    const Json& vals = detail::require(j, "values", where);
    std::vector<LocalFieldElement> table;
    for (const auto& v : vals) table.push_back(parse_literal(F, v.get_ref<const std::string&>()));
    try {
        return DirichletCharacter(F, mod, std::move(table));
    } catch (const std::invalid_argument& e) {
        throw ParseError(std::string(where) + ": " + e.what());
    }
}

/// A form record per the ingestion schema: weight, level, character, sparse
/// coefficient list, and the optional eigen-data fields.
struct FormRecord {
    QExpansion form;
    std::optional<LocalFieldElement> ap;
    std::optional<LocalFieldElement> mu;
    std::optional<LocalFieldElement> lambda_M1;
    long level_M1 = 0; // 0 = absent
    std::map<long, LocalFieldElement> hecke_eigenvalues;
};

inline Json emit_form(const QExpansion& x) {
    Json coeffs = Json::array();
    for (long n = 1; n <= x.q_precision; ++n)
        coeffs.push_back(Json::array({n, to_literal(x.coeff(n))}));
    Json out{{"weight", x.weight},
             {"level", x.level},
             {"a0", to_literal(x.a0)},
             {"coeffs", coeffs}};
    if (!x.character.is_trivial() || x.character.modulus > 1)
        out["character"] = emit_character(x.character);
    return out;
}

inline FormRecord parse_form(const Json& j, const FieldPtr& F, long qprec, const char* where) {
    FormRecord rec;
    int weight = detail::require(j, "weight", where).get<int>();
    long level = j.value("level", 1L);
    long maxn = 0;
    for (const auto& pair : detail::require(j, "coeffs", where))
        maxn = std::max(maxn, pair.at(0).get<long>());
    long N = qprec > 0 ? qprec : maxn;
    QExpansion x(F, N, weight, level);
    if (j.contains("character")) x.character = parse_character(j["character"], F, where);
    if (j.contains("a0")) x.a0 = parse_literal(F, j["a0"].get_ref<const std::string&>());
    for (const auto& pair : j["coeffs"]) {
        long n = pair.at(0).get<long>();
        if (n >= 1 && n <= N)
            x.set_coeff(n, parse_literal(F, pair.at(1).get_ref<const std::string&>()));
    }
    rec.form = std::move(x);
    if (j.contains("ap")) rec.ap = parse_literal(F, j["ap"].get_ref<const std::string&>());
    if (j.contains("mu")) rec.mu = parse_literal(F, j["mu"].get_ref<const std::string&>());
    if (j.contains("lambda_M1"))
        rec.lambda_M1 = parse_literal(F, j["lambda_M1"].get_ref<const std::string&>());
    if (j.contains("level_M1")) rec.level_M1 = j["level_M1"].get<long>();
    if (j.contains("hecke_eigenvalues"))
        for (const auto& pair : j["hecke_eigenvalues"])
            rec.hecke_eigenvalues[pair.at(0).get<long>()] =
                parse_literal(F, pair.at(1).get_ref<const std::string&>());
    return rec;
}

// ---------------------------------------------------------------------------
// Triple record files.
// ---------------------------------------------------------------------------

constexpr int kSchemaVersion = 1;

struct TripleFile {
    TripleConfig config;
    std::vector<std::string> violations; // schema and semantic, empty on success
    std::string basis_file;              // optional reference, empty when absent
    long qprec = 0;                      // declared q-precision, 0 = derive
};

inline Json parse_json_text(const std::string& text, const char* what) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ParseError(std::string(what) + ": " + e.what()); // carries the byte position
    }
}

inline TripleFile parse_triple_text(const std::string& text) {
    Json j = parse_json_text(text, "triple record");
    TripleFile out;
    auto& v = out.violations;

    int ver = j.value("schema_version", -1);
    if (ver != kSchemaVersion) {
        v.push_back("unsupported or missing schema_version (expected " +
                    std::to_string(kSchemaVersion) + ")");
        return out;
    }
    if (!j.contains("field")) {
        v.push_back("missing field description");
        return out;
    }
    FieldPtr F = parse_field(j["field"]);
    TripleConfig& tc = out.config;
    tc.F = F;

    const Json& lv = detail::require(j, "levels", "triple record");
    tc.M = lv.value("M", 1L);
    tc.M1 = lv.value("M1", 1L);
    tc.t = lv.value("t", 1L);
    tc.s = lv.value("s", 1L);

    const Json& w = detail::require(j, "weights", "triple record");
    tc.k = w.at(0).get<int>();
    tc.l = w.at(1).get<int>();
    tc.m = w.at(2).get<int>();
    if (j.contains("teichmuller_exponents")) {
        tc.k0 = j["teichmuller_exponents"].at(0).get<long>();
        tc.l0 = j["teichmuller_exponents"].at(1).get<long>();
        tc.m0 = j["teichmuller_exponents"].at(2).get<long>();
    }
    tc.inertia_a = j.value("inertia_a", 1);
    tc.f_semistable = j.value("f_semistable", false);
    out.qprec = j.value("qprec", 0L);
    out.basis_file = j.value("basis_file", std::string());

    auto get_char = [&](const char* key) {
        if (j.contains("characters") && j["characters"].contains(key))
            return parse_character(j["characters"][key], F, key);
        return DirichletCharacter::trivial(F);
    };
    tc.chi_f = get_char("chi_f");
    tc.chi_g = get_char("chi_g");
    tc.chi_h = get_char("chi_h");
    tc.eps_f = get_char("eps_f");
    tc.eps_g = get_char("eps_g");
    tc.eps_h = get_char("eps_h");
    if (j.contains("characters") && j["characters"].contains("psi_sqrt")) {
        tc.has_psi_sqrt = true;
        tc.psi_sqrt = parse_character(j["characters"]["psi_sqrt"], F, "psi_sqrt");
    }

    const Json& forms = detail::require(j, "forms", "triple record");
    FormRecord f = parse_form(detail::require(forms, "f", "forms"), F, out.qprec, "forms/f");
    if (!f.ap) v.push_back("forms/f: missing `ap` (ordinarity undeclared)");
    tc.f.form = f.form;
    tc.f.a_p = f.ap ? *f.ap : F->zero();
    tc.f.hecke_eigenvalues = f.hecke_eigenvalues;
    tc.f.lambda_M1 = f.lambda_M1 ? *f.lambda_M1 : F->zero();
    tc.f.level_M1 = f.level_M1 > 0 ? f.level_M1 : tc.M1;
    if (forms.contains("f_breve")) {
        FormRecord fb = parse_form(forms["f_breve"], F, out.qprec, "forms/f_breve");
        EigenformRecord rec;
        rec.form = fb.form;
        rec.a_p = fb.ap ? *fb.ap : tc.f.a_p;
        rec.hecke_eigenvalues = fb.hecke_eigenvalues;
        rec.lambda_M1 = fb.lambda_M1 ? *fb.lambda_M1 : F->zero();
        rec.level_M1 = fb.level_M1 > 0 ? fb.level_M1 : tc.M1;
        tc.f_breve = rec;
    }
    FormRecord g = parse_form(detail::require(forms, "g", "forms"), F, out.qprec, "forms/g");
    FormRecord h = parse_form(detail::require(forms, "h", "forms"), F, out.qprec, "forms/h");
    tc.g_form = g.form;
    tc.h_form = h.form;
    if (!g.mu)
        v.push_back("forms/g: missing `mu` (supercuspidal Frobenius scalar)");
    else
        tc.mu_g = *g.mu;
    if (!h.mu)
        v.push_back("forms/h: missing `mu` (supercuspidal Frobenius scalar)");
    else
        tc.mu_h = *h.mu;

    // level consistency between the records and the declared tower
    if (tc.M % tc.f.level_M1 != 0 && tc.f.level_M1 % tc.M != 0)
        v.push_back("inconsistent levels: f's level_M1 is incompatible with M");
    for (const auto* rec : {&g, &h})
        if (rec->form.level > 1 && tc.level_upper() % rec->form.level != 0)
            v.push_back("inconsistent levels: a supercuspidal leg's level does not divide M p^t");

    auto sem = validate(tc);
    v.insert(v.end(), sem.begin(), sem.end());
    return out;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open `" + path + "`");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline TripleFile parse_triple(const std::string& path) { return parse_triple_text(read_file(path)); }

inline std::string emit_triple(const TripleConfig& tc, const std::string& basis_file = "",
                               long qprec = 0) {
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["field"] = emit_field(tc.F);
    j["levels"] = Json{{"M", tc.M}, {"M1", tc.M1}, {"t", tc.t}, {"s", tc.s}};
    j["weights"] = Json::array({tc.k, tc.l, tc.m});
    j["teichmuller_exponents"] = Json::array({tc.k0, tc.l0, tc.m0});
    j["inertia_a"] = tc.inertia_a;
    j["f_semistable"] = tc.f_semistable;
    if (qprec > 0) j["qprec"] = qprec;
    if (!basis_file.empty()) j["basis_file"] = basis_file;
    Json chars;
    chars["chi_f"] = emit_character(tc.chi_f);
    chars["chi_g"] = emit_character(tc.chi_g);
    chars["chi_h"] = emit_character(tc.chi_h);
    chars["eps_f"] = emit_character(tc.eps_f);
    chars["eps_g"] = emit_character(tc.eps_g);
    chars["eps_h"] = emit_character(tc.eps_h);
    if (tc.has_psi_sqrt) chars["psi_sqrt"] = emit_character(tc.psi_sqrt);
    j["characters"] = chars;

    Json f = emit_form(tc.f.form);
    f["ap"] = to_literal(tc.f.a_p);
    f["lambda_M1"] = to_literal(tc.f.lambda_M1);
    f["level_M1"] = tc.f.level_M1;
    Json eig = Json::array();
    for (const auto& [ell, val] : tc.f.hecke_eigenvalues)
        eig.push_back(Json::array({ell, to_literal(val)}));
    f["hecke_eigenvalues"] = eig;
    Json g = emit_form(tc.g_form);
    g["mu"] = to_literal(tc.mu_g);
    Json h = emit_form(tc.h_form);
    h["mu"] = to_literal(tc.mu_h);
    j["forms"] = Json{{"f", f}, {"g", g}, {"h", h}};
    return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Basis files.
// ---------------------------------------------------------------------------

struct BasisFile {
    FormSpaceBasis basis;
    std::vector<std::map<long, LocalFieldElement>> competing; // eigen-data of the complement
    DegeneracyData degeneracy;
};

inline BasisFile parse_basis_text(const std::string& text, const FieldPtr& F, long qprec = 0) {
    Json j = parse_json_text(text, "basis file");
    int ver = j.value("schema_version", -1);
    if (ver != kSchemaVersion) throw ParseError("basis file: unsupported schema_version");
    BasisFile out;
    out.basis.sturm_bound = detail::require(j, "sturm_bound", "basis file").get<long>();
    for (const auto& rec : detail::require(j, "forms", "basis file"))
        out.basis.basis.push_back(parse_form(rec, F, qprec, "basis form").form);
    out.basis.validate();
    if (j.contains("competing_eigensystems"))
        for (const auto& sys : j["competing_eigensystems"]) {
            std::map<long, LocalFieldElement> m;
            for (const auto& pair : sys)
                m[pair.at(0).get<long>()] =
                    parse_literal(F, pair.at(1).get_ref<const std::string&>());
            out.competing.push_back(std::move(m));
        }
    if (j.contains("degeneracy_matrices"))
        for (const auto& d : j["degeneracy_matrices"]) {
            long from = d.at("from").get<long>(), to = d.at("to").get<long>();
            const Json& rows = d.at("rows");
            int r = static_cast<int>(rows.size());
            int c = r ? static_cast<int>(rows.at(0).size()) : 0;
            PMatrix M(F, r, c);
            for (int i = 0; i < r; ++i)
                for (int jj = 0; jj < c; ++jj)
                    M.at(i, jj) =
                        parse_literal(F, rows.at(i).at(jj).get_ref<const std::string&>());
            out.degeneracy[{from, to}] = std::move(M);
        }
    return out;
}

inline BasisFile parse_basis(const std::string& path, const FieldPtr& F, long qprec = 0) {
    return parse_basis_text(read_file(path), F, qprec);
}

inline std::string emit_basis(const FormSpaceBasis& B,
                              const std::vector<std::map<long, LocalFieldElement>>& competing = {},
                              const DegeneracyData& degeneracy = {}) {
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["sturm_bound"] = B.sturm_bound;
    Json forms = Json::array();
    for (const auto& f : B.basis) forms.push_back(emit_form(f));
    j["forms"] = forms;
    Json comps = Json::array();
    for (const auto& sys : competing) {
        Json s = Json::array();
        for (const auto& [ell, val] : sys) s.push_back(Json::array({ell, to_literal(val)}));
        comps.push_back(s);
    }
    j["competing_eigensystems"] = comps;
    Json degs = Json::array();
    for (const auto& [key, M] : degeneracy) {
        Json rows = Json::array();
        for (int i = 0; i < M.rows; ++i) {
            Json row = Json::array();
            for (int c = 0; c < M.cols; ++c) row.push_back(to_literal(M.at(i, c)));
            rows.push_back(row);
        }
        degs.push_back(Json{{"from", key.first}, {"to", key.second}, {"rows", rows}});
    }
    j["degeneracy_matrices"] = degs;
    return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Period reports.
// ---------------------------------------------------------------------------

enum class ReportFormat { text, structured };

inline const char* verdict_name(ConvVerdict v) {
    switch (v) {
        case ConvVerdict::convenient: return "convenient";
        case ConvVerdict::not_convenient: return "not_convenient";
        case ConvVerdict::inconclusive: return "inconclusive";
        case ConvVerdict::not_crystalline: return "not_crystalline";
    }
    return "?";
}

inline ConvVerdict verdict_from_name(const std::string& s) {
    if (s == "convenient") return ConvVerdict::convenient;
    if (s == "not_convenient") return ConvVerdict::not_convenient;
    if (s == "inconclusive") return ConvVerdict::inconclusive;
    if (s == "not_crystalline") return ConvVerdict::not_crystalline;
    throw ParseError("unknown convenience verdict `" + s + "`");
}

inline Json emit_polynomial(const FpPolynomial& P) {
    Json coeffs = Json::array();
    for (int i = 0; i <= P.degree(); ++i) coeffs.push_back(to_literal(P.coeff(i)));
    return coeffs;
}

inline FpPolynomial parse_polynomial(const Json& j, const FieldPtr& F) {
    std::vector<LocalFieldElement> c;
    for (const auto& s : j) c.push_back(parse_literal(F, s.get_ref<const std::string&>()));
    return FpPolynomial(F, std::move(c));
}

inline std::string emit_report(const PeriodReport& r, ReportFormat format) {
    if (format == ReportFormat::structured) {
        Json j;
        j["schema_version"] = kSchemaVersion;
        j["period"] = to_literal(r.I_p);
        j["precision"] = format_rational(r.precision);
        j["intro_leg"] = r.intro_leg;
        Json conv;
        conv["verdict"] = verdict_name(r.convenience.verdict);
        conv["det_q_phi"] = to_literal(r.convenience.det_q_phi);
        conv["det_q_qphi"] = to_literal(r.convenience.det_q_qphi);
        Json slopes = Json::array();
        for (const auto& [val, mult] : r.convenience.audit.frobenius_slopes)
            slopes.push_back(Json::array({format_rational(val), mult}));
        Json entries = Json::array();
        for (const auto& e : r.convenience.audit.entries)
            entries.push_back(Json{{"j", e.j},
                                   {"tau", e.tau},
                                   {"eigenvalue", to_literal(e.eigenvalue)},
                                   {"abs_exponent", format_rational(e.abs_exponent)}});
        conv["audit"] = Json{{"entries", entries},
                             {"frobenius_slopes", slopes},
                             {"eigenvalue_one", r.convenience.audit.eigenvalue_one},
                             {"eigenvalue_q_inverse", r.convenience.audit.eigenvalue_q_inverse}};
        j["convenience"] = conv;
        j["polynomials"] = Json{{"P_f", emit_polynomial(r.polys.P_f)},
                                {"P_g", emit_polynomial(r.polys.P_g)},
                                {"P_h", emit_polynomial(r.polys.P_h)},
                                {"P_fgh", emit_polynomial(r.polys.P_fgh)},
                                {"fgh_at_1", to_literal(r.polys.fgh_at_1)},
                                {"fgh_at_qinv", to_literal(r.polys.fgh_at_qinv)},
                                {"certified", r.polys.certified}};
        j["ordinary_projection"] = emit_form(r.xi_ord);
        return j.dump(2) + "\n";
    }
    std::ostringstream os;
    os << "period report\n";
    os << "  period:     " << to_literal(r.I_p) << "\n";
    os << "  precision:  O(p^" << format_rational(r.precision) << ")\n";
    os << "  derivative: " << (r.intro_leg ? "h-leg" : "g-leg") << "\n";
    os << "  convenience verdict: " << verdict_name(r.convenience.verdict) << "\n";
    os << "  det Q(phi):   " << to_literal(r.convenience.det_q_phi) << "\n";
    os << "  det Q(q phi): " << to_literal(r.convenience.det_q_qphi) << "\n";
    os << "  frobenius slopes:";
    for (const auto& [val, mult] : r.convenience.audit.frobenius_slopes)
        os << " (" << format_rational(val) << " x" << mult << ")";
    os << "\n";
    for (const auto& e : r.convenience.audit.entries)
        os << "  audit j=" << e.j << " tau=" << e.tau << " |lambda| = p^"
           << format_rational(e.abs_exponent) << "  lambda = " << to_literal(e.eigenvalue)
           << "\n";
    os << "  P_fgh(1):   " << to_literal(r.polys.fgh_at_1) << "\n";
    os << "  P_fgh(1/q): " << to_literal(r.polys.fgh_at_qinv) << "\n";
    os << "  certificates: " << (r.polys.certified ? "pass" : "FAIL") << "\n";
    return os.str();
}

inline PeriodReport parse_report(const std::string& text, const FieldPtr& F) {
    Json j = parse_json_text(text, "period report");
    if (j.value("schema_version", -1) != kSchemaVersion)
        throw ParseError("period report: unsupported schema_version");
    ConvenienceReport conv;
    const Json& c = j.at("convenience");
    conv.verdict = verdict_from_name(c.at("verdict").get<std::string>());
    conv.det_q_phi = parse_literal(F, c.at("det_q_phi").get_ref<const std::string&>());
    conv.det_q_qphi = parse_literal(F, c.at("det_q_qphi").get_ref<const std::string&>());
    const Json& audit = c.at("audit");
    conv.audit.eigenvalue_one = audit.at("eigenvalue_one").get<bool>();
    conv.audit.eigenvalue_q_inverse = audit.at("eigenvalue_q_inverse").get<bool>();
    for (const auto& s : audit.at("frobenius_slopes"))
        conv.audit.frobenius_slopes.emplace_back(detail::parse_rational_json(s.at(0)),
                                                 s.at(1).get<long>());
    for (const auto& e : audit.at("entries")) {
        AuditEntry entry;
        entry.j = e.at("j").get<int>();
        entry.tau = e.at("tau").get<std::string>();
        entry.eigenvalue = parse_literal(F, e.at("eigenvalue").get_ref<const std::string&>());
        entry.abs_exponent = detail::parse_rational_json(e.at("abs_exponent"));
        conv.audit.entries.push_back(std::move(entry));
    }
    const Json& p = j.at("polynomials");
    PolynomialData polys{parse_polynomial(p.at("P_f"), F), parse_polynomial(p.at("P_g"), F),
                         parse_polynomial(p.at("P_h"), F), parse_polynomial(p.at("P_fgh"), F),
                         parse_literal(F, p.at("fgh_at_1").get_ref<const std::string&>()),
                         parse_literal(F, p.at("fgh_at_qinv").get_ref<const std::string&>()),
                         p.at("certified").get<bool>()};
    QExpansion xi = parse_form(j.at("ordinary_projection"), F, 0, "ordinary_projection").form;
    LocalFieldElement I_p = parse_literal(F, j.at("period").get_ref<const std::string&>());
    Rational prec = parse_rational_text(j.at("precision").get_ref<const std::string&>());
    return PeriodReport{I_p, prec, std::move(conv), std::move(xi), std::move(polys),
                        j.at("intro_leg").get<bool>()};
}

} // namespace tripp
