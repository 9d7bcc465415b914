#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <random>

#include "tripp/io.hpp"
#include "tripp/synthetic.hpp"

using namespace tripp;

namespace {

bool bit_exact(const LocalFieldElement& a, const LocalFieldElement& b) {
    return a.coords == b.coords && a.pshift == b.pshift && a.known_precision == b.known_precision;
}

// literal-level comparison, usable across distinct field instances
bool same_series(const QExpansion& a, const QExpansion& b) {
    if (a.q_precision != b.q_precision || to_literal(a.a0) != to_literal(b.a0)) return false;
    for (long n = 1; n <= a.q_precision; ++n)
        if (to_literal(a.coeff(n)) != to_literal(b.coeff(n))) return false;
    return true;
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

} // namespace

TEST_CASE("p-adic literal format") {
    auto Q5 = make_field(5, 1, {}, 30);
    auto R7 = planted_field();

    SUBCASE("explicit literals parse to the expected values") {
        LocalFieldElement x = parse_literal(Q5, "3 * p^-1 + O(p^5)");
        CHECK(eq_at_precision(x, Q5->from_int(3) * Q5->from_int(5).pow(-1)));
        CHECK(*x.valuation() == Rational(-1));
        LocalFieldElement z = parse_literal(Q5, "0 * p^0 + O(p^30)");
        CHECK(z.is_zero_at_precision());
    }

    SUBCASE("the canonical form round-trips bit-exactly") {
        std::mt19937_64 rng(99);
        std::uniform_int_distribution<long> dist(-1000000, 1000000);
        for (int trial = 0; trial < 50; ++trial) {
            LocalFieldElement x = Q5->from_int(dist(rng)) * Q5->from_int(5).pow(trial % 5 - 2);
            std::string lit = to_literal(x);
            LocalFieldElement y = parse_literal(Q5, lit);
            CHECK(eq_at_precision(x, y));
            CHECK(to_literal(y) == lit);
            LocalFieldElement u = R7->from_int(dist(rng)) +
                                  R7->from_int(dist(rng)) * R7->uniformizer().pow(trial % 3 - 1);
            std::string ulit = to_literal(u);
            LocalFieldElement v = parse_literal(R7, ulit);
            CHECK(eq_at_precision(u, v));
            CHECK(to_literal(v) == ulit);
        }
    }

    SUBCASE("malformed literals are rejected") {
        CHECK_THROWS_AS(parse_literal(Q5, "3 * p^"), std::invalid_argument);
        CHECK_THROWS_AS(parse_literal(Q5, "3 O(p^5)"), std::invalid_argument);
        CHECK_THROWS_AS(parse_literal(R7, "1 * p^0 + O(p^5)"), std::invalid_argument);
    }
}

TEST_CASE("triple record files") {
    PlantedTriple P = make_planted_triple();
    std::string text = emit_triple(P.tc);

    SUBCASE("minimal valid (2,2,2) file round-trips to a clean config") {
        TripleFile tf = parse_triple_text(text);
        CHECK(tf.violations.empty());
        CHECK(tf.config.r() == 0);
        CHECK(tf.config.M == 1);
        CHECK(tf.config.level_upper() == 7);
        CHECK(to_literal(tf.config.f.a_p) == to_literal(P.tc.f.a_p));
        CHECK(to_literal(tf.config.mu_g) == to_literal(P.tc.mu_g));
        CHECK(same_series(tf.config.g_form, P.tc.g_form));
        CHECK(same_series(tf.config.h_form, P.tc.h_form));
    }

    SUBCASE("odd weight sum is a reported violation") {
        TripleConfig odd = P.tc;
        odd.m = 3;
        TripleFile tf = parse_triple_text(emit_triple(odd));
        bool found = false;
        for (const auto& s : tf.violations) found = found || s.find("even") != std::string::npos;
        CHECK(found);
    }

    SUBCASE("truncated file is a parse error with a position") {
        try {
            parse_triple_text(text.substr(0, text.size() / 2));
            CHECK(false);
        } catch (const ParseError& e) {
            CHECK(std::string(e.what()).find("triple record") != std::string::npos);
        }
    }

    SUBCASE("missing eigen-data fields are reported") {
        Json j = Json::parse(text);
        j["forms"]["g"].erase("mu");
        TripleFile tf = parse_triple_text(j.dump());
        bool found = false;
        for (const auto& s : tf.violations) found = found || s.find("mu") != std::string::npos;
        CHECK(found);
    }

    SUBCASE("non-multiplicative character tables are rejected") {
        Json j = Json::parse(text);
        auto F = P.tc.F;
        // a table supported on all residues mod 3 cannot be multiplicative
        j["characters"]["chi_g"] =
            Json{{"modulus", 3},
                 {"values", Json::array({to_literal(F->one()), to_literal(F->one()),
                                         to_literal(F->from_int(2))})}};
        CHECK_THROWS_AS(parse_triple_text(j.dump()), ParseError);
    }

    SUBCASE("inconsistent levels are reported") {
        Json j = Json::parse(text);
        j["forms"]["g"]["level"] = 11;
        TripleFile tf = parse_triple_text(j.dump());
        bool found = false;
        for (const auto& s : tf.violations)
            found = found || s.find("inconsistent levels") != std::string::npos;
        CHECK(found);
    }
}

TEST_CASE("basis files") {
    PlantedTriple P = make_planted_triple();
    auto F = P.tc.F;
    DegeneracyData deg;
    PMatrix M = PMatrix::identity(F, 2);
    M.at(0, 1) = F->from_int(3);
    deg[{7, 49}] = M;

    std::string text = emit_basis(P.B, P.others, deg);
    BasisFile bf = parse_basis_text(text, F);
    CHECK(bf.basis.dim() == 2);
    CHECK(bf.basis.sturm_bound == P.B.sturm_bound);
    for (int i = 0; i < 2; ++i)
        CHECK(qexp_eq_at_precision(bf.basis.basis[static_cast<std::size_t>(i)],
                                   P.B.basis[static_cast<std::size_t>(i)]));
    REQUIRE(bf.competing.size() == 1);
    CHECK(to_literal(bf.competing[0].at(2)) == to_literal(P.others[0].at(2)));
    REQUIRE(bf.degeneracy.count({7, 49}) == 1);
    CHECK(to_literal(bf.degeneracy[{7, 49}].at(0, 1)) == to_literal(F->from_int(3)));
}

TEST_CASE("period reports") {
    PlantedTriple P = make_planted_triple();
    PeriodReport r = compute_period(P.tc, P.B, P.others);

    SUBCASE("structured emission is deterministic and round-trips field-by-field") {
        std::string s1 = emit_report(r, ReportFormat::structured);
        std::string s2 = emit_report(r, ReportFormat::structured);
        CHECK(s1 == s2);

        PeriodReport q = parse_report(s1, P.tc.F);
        CHECK(to_literal(q.I_p) == to_literal(r.I_p));
        CHECK(q.precision == r.precision);
        CHECK(q.intro_leg == r.intro_leg);
        CHECK(q.convenience.verdict == r.convenience.verdict);
        CHECK(to_literal(q.convenience.det_q_phi) ==
              to_literal(r.convenience.det_q_phi));
        CHECK(q.convenience.audit.frobenius_slopes == r.convenience.audit.frobenius_slopes);
        REQUIRE(q.convenience.audit.entries.size() == r.convenience.audit.entries.size());
        for (std::size_t i = 0; i < q.convenience.audit.entries.size(); ++i) {
            CHECK(q.convenience.audit.entries[i].tau == r.convenience.audit.entries[i].tau);
            CHECK(q.convenience.audit.entries[i].abs_exponent ==
                  r.convenience.audit.entries[i].abs_exponent);
        }
        CHECK(q.polys.certified == r.polys.certified);
        for (int i = 0; i <= r.polys.P_fgh.degree(); ++i)
            CHECK(to_literal(q.polys.P_fgh.coeff(i)) ==
                  to_literal(r.polys.P_fgh.coeff(i)));
        CHECK(to_literal(q.polys.fgh_at_1) == to_literal(r.polys.fgh_at_1));
        CHECK(qexp_eq_at_precision(q.xi_ord, r.xi_ord));
        // re-emission of the parsed report is byte-identical
        CHECK(emit_report(q, ReportFormat::structured) == s1);
    }

    SUBCASE("text emission names the verdict and the certificates") {
        std::string t = emit_report(r, ReportFormat::text);
        CHECK(t.find("convenient") != std::string::npos);
        CHECK(t.find("certificates: pass") != std::string::npos);
        CHECK(t.find(to_literal(r.I_p)) != std::string::npos);
    }
}

TEST_CASE("file round trip drives the full pipeline") {
    PlantedTriple P = make_planted_triple();
    const std::string tdir = "/tmp/tripp_io_test";
    std::system(("mkdir -p " + tdir).c_str());
    write_file(tdir + "/triple.json", emit_triple(P.tc, "basis.json"));
    write_file(tdir + "/basis.json", emit_basis(P.B, P.others));

    TripleFile tf = parse_triple(tdir + "/triple.json");
    REQUIRE(tf.violations.empty());
    CHECK(tf.basis_file == "basis.json");
    BasisFile bf = parse_basis(tdir + "/basis.json", tf.config.F);

    PeriodReport r = compute_period(tf.config, bf.basis, bf.competing);
    CHECK(eq_at_precision(r.I_p, tf.config.F->from_int(4)));
    CHECK(r.polys.certified);
}
