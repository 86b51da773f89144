#pragma once

/**
 * @file json_io.hpp
 * @brief JSON encodings of polynomials, forms, triples, automorphisms and
 * structure constants.
 *
 * Readers are strict: unknown keys, wrong types, out-of-range values and
 * malformed flags raise ValidationError with a JSON-pointer path to the
 * offending field.  Variable indices are 1-based in JSON.
 */

#include <json.hpp>

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "autom.hpp"
#include "divpow.hpp"
#include "error.hpp"
#include "field.hpp"
#include "flaginv.hpp"
#include "forms.hpp"
#include "hamalg.hpp"

namespace nalie::io {

using Json = nlohmann::ordered_json;

namespace detail {

[[noreturn]] inline void fail(const std::string& path, const std::string& msg) {
    throw ValidationError((path.empty() ? std::string("/") : path) + ": " + msg);
}

inline std::string at(const std::string& path, const std::string& key) { return path + "/" + key; }
inline std::string at(const std::string& path, std::size_t i) { return path + "/" + std::to_string(i); }

inline void expect_object(const Json& j, const std::string& path, std::initializer_list<const char*> required,
                          std::initializer_list<const char*> optional = {}) {
    if (!j.is_object()) fail(path, "expected an object");
    for (const char* k : required)
        if (!j.contains(k)) fail(path, std::string("missing key '") + k + "'");
    for (const auto& [k, v] : j.items()) {
        bool known = false;
        for (const char* r : required) known = known || k == r;
        for (const char* o : optional) known = known || k == o;
        if (!known) fail(path, "unknown key '" + k + "'");
    }
}

inline const Json& expect_array(const Json& j, const std::string& path) {
    if (!j.is_array()) fail(path, "expected an array");
    return j;
}

inline unsigned expect_uint(const Json& j, const std::string& path, unsigned lo, unsigned hi) {
    if (!j.is_number_integer()) fail(path, "expected an integer");
    auto v = j.get<long long>();
    if (v < lo || v > hi)
        fail(path, "value " + std::to_string(v) + " outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return static_cast<unsigned>(v);
}

inline bool expect_bool(const Json& j, const std::string& path) {
    if (!j.is_boolean()) fail(path, "expected a boolean");
    return j.get<bool>();
}

inline Elem expect_elem(const Json& j, const std::string& path, const Field& F) {
    if (!j.is_string()) fail(path, "expected a hex string");
    try {
        return F.from_hex(j.get<std::string>());
    } catch (const ValidationError& e) {
        fail(path, e.what());
    }
}

inline Vector expect_vector(const Json& j, const std::string& path, const Field& F, std::size_t n) {
    expect_array(j, path);
    if (j.size() != n) fail(path, "expected " + std::to_string(n) + " entries, got " + std::to_string(j.size()));
    Vector v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = expect_elem(j[i], at(path, i), F);
    return v;
}

inline Json elem_json(const Field& F, Elem c) { return F.to_hex(c); }

inline Json vector_json(const Field& F, const Vector& v) {
    Json a = Json::array();
    for (Elem c : v) a.push_back(elem_json(F, c));
    return a;
}

inline Json matrix_json(const Field& F, const Matrix& m) {
    Json a = Json::array();
    for (const auto& row : m) a.push_back(vector_json(F, row));
    return a;
}

inline Matrix expect_matrix(const Json& j, const std::string& path, const Field& F, std::size_t n) {
    expect_array(j, path);
    if (j.size() != n) fail(path, "expected " + std::to_string(n) + " rows, got " + std::to_string(j.size()));
    Matrix m;
    for (std::size_t i = 0; i < n; ++i) m.push_back(expect_vector(j[i], at(path, i), F, n));
    return m;
}

inline Json exponents_json(const Heights& h, Packed a) { return h.unpack(a); }

inline Packed expect_exponents(const Json& j, const std::string& path, const Heights& h) {
    expect_array(j, path);
    if (j.size() != h.n())
        fail(path, "multi-index has " + std::to_string(j.size()) + " entries, expected " + std::to_string(h.n()));
    Packed p = 0;
    for (unsigned i = 0; i < h.n(); ++i) {
        if (!j[i].is_number_integer() || j[i].get<long long>() < 0) fail(at(path, i), "expected a non-negative integer");
        auto e = j[i].get<long long>();
        if (e >= static_cast<long long>(h.bound(i)))
            fail(at(path, i), "exponent " + std::to_string(e) + " of x_" + std::to_string(i + 1) + " exceeds 2^" +
                                  std::to_string(h.height(i)) + " - 1");
        p |= static_cast<Packed>(e) << h.offset(i);
    }
    return p;
}

inline std::vector<unsigned> expect_heights(const Json& j, const std::string& path, std::size_t n) {
    expect_array(j, path);
    if (j.size() != n) fail(path, "expected " + std::to_string(n) + " heights, got " + std::to_string(j.size()));
    std::vector<unsigned> h;
    unsigned total = 0;
    for (std::size_t i = 0; i < n; ++i) {
        h.push_back(expect_uint(j[i], at(path, i), 1, Heights::kMaxTotal));
        total += h.back();
    }
    if (total > Heights::kMaxTotal) fail(path, "sum of heights exceeds " + std::to_string(Heights::kMaxTotal));
    return h;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Polynomials and derivations

inline Json to_json(const DPoly& f) {
    Json a = Json::array();
    for (auto [alpha, c] : f.terms()) {
        Json t;
        t["alpha"] = detail::exponents_json(f.heights(), alpha);
        t["c"] = detail::elem_json(f.field(), c);
        a.push_back(std::move(t));
    }
    return a;
}

inline DPoly dpoly_from_json(const Json& j, const RingPtr& R, const std::string& path = "") {
    detail::expect_array(j, path);
    DPoly f(R);
    std::set<Packed> seen;
    for (std::size_t k = 0; k < j.size(); ++k) {
        const std::string p = detail::at(path, k);
        detail::expect_object(j[k], p, {"alpha", "c"});
        Packed a = detail::expect_exponents(j[k]["alpha"], detail::at(p, "alpha"), R->heights());
        if (!seen.insert(a).second) detail::fail(p, "duplicate monomial");
        f.add_term(a, detail::expect_elem(j[k]["c"], detail::at(p, "c"), R->field()));
    }
    return f;
}

inline Json to_json(const SpecialDerivation& D) {
    Json comps = Json::array();
    for (unsigned i = 0; i < D.n(); ++i) comps.push_back(to_json(D.comp(i)));
    return Json{{"comps", comps}};
}

inline SpecialDerivation derivation_from_json(const Json& j, const RingPtr& R, const std::string& path = "") {
    detail::expect_object(j, path, {"comps"});
    const auto& c = detail::expect_array(j["comps"], detail::at(path, "comps"));
    if (c.size() != R->n()) detail::fail(detail::at(path, "comps"), "expected " + std::to_string(R->n()) + " components");
    std::vector<DPoly> comps;
    for (std::size_t i = 0; i < c.size(); ++i)
        comps.push_back(dpoly_from_json(c[i], R, detail::at(detail::at(path, "comps"), i)));
    return SpecialDerivation(std::move(comps));
}

// ---------------------------------------------------------------------------
// 2-forms

/// Form2 with an optional cohomology class listed as "eta" terms.
inline Json to_json(const Form2& w, const EtaClass& eta = {}) {
    const RingPtr& R = w.ring();
    Json terms = Json::array();
    for (const auto& [g, f] : w.terms()) {
        Json t;
        if (g[0] == g[1]) {
            t["kind"] = "sq";
            t["i"] = g[0] + 1;
        } else {
            t["kind"] = "mix";
            t["i"] = g[0] + 1;
            t["j"] = g[1] + 1;
        }
        t["poly"] = to_json(f);
        terms.push_back(std::move(t));
    }
    for (auto [ij, c] : eta) {
        if (c.is_zero()) continue;
        terms.push_back(Json{{"kind", "eta"}, {"i", ij.first + 1}, {"j", ij.second + 1}, {"c", R->field().to_hex(c)}});
    }
    Json out;
    out["n"] = R->n();
    out["heights"] = R->heights().heights();
    out["field_degree"] = R->field().degree();
    out["terms"] = std::move(terms);
    return out;
}

struct ParsedForm {
    Form2 base;   ///< sq and mix terms
    EtaClass eta; ///< eta terms
    Form2 total() const { return base + realize_eta(eta, base.ring()); }
};

inline RingPtr ring_from_json(const Json& j, const std::string& path) {
    unsigned n = detail::expect_uint(j["n"], detail::at(path, "n"), 1, Heights::kMaxTotal);
    auto h = detail::expect_heights(j["heights"], detail::at(path, "heights"), n);
    unsigned k = detail::expect_uint(j["field_degree"], detail::at(path, "field_degree"), 1, Field::kMaxDegree);
    return DivPowRing::make(h, k);
}

inline ParsedForm parse_form(const Json& j, const std::string& path = "") {
    detail::expect_object(j, path, {"n", "heights", "field_degree", "terms"});
    RingPtr R = ring_from_json(j, path);
    const unsigned n = R->n();
    ParsedForm out{Form2(R), {}};
    const std::string tp = detail::at(path, "terms");
    const auto& terms = detail::expect_array(j["terms"], tp);
    std::set<std::pair<unsigned, unsigned>> seen_base, seen_eta;
    for (std::size_t k = 0; k < terms.size(); ++k) {
        const std::string p = detail::at(tp, k);
        const Json& t = terms[k];
        if (!t.is_object() || !t.contains("kind") || !t["kind"].is_string())
            detail::fail(p, "expected an object with a string 'kind'");
        const std::string kind = t["kind"].get<std::string>();
        if (kind == "sq") {
            detail::expect_object(t, p, {"kind", "i", "poly"});
            unsigned i = detail::expect_uint(t["i"], detail::at(p, "i"), 1, n) - 1;
            if (!seen_base.insert({i, i}).second) detail::fail(p, "duplicate term");
            out.base.add_sq(i, dpoly_from_json(t["poly"], R, detail::at(p, "poly")));
        } else if (kind == "mix" || kind == "eta") {
            if (kind == "mix") detail::expect_object(t, p, {"kind", "i", "j", "poly"});
            else detail::expect_object(t, p, {"kind", "i", "j", "c"});
            unsigned i = detail::expect_uint(t["i"], detail::at(p, "i"), 1, n) - 1;
            unsigned jj = detail::expect_uint(t["j"], detail::at(p, "j"), 1, n) - 1;
            if (i >= jj) detail::fail(p, "indices must satisfy i < j");
            if (kind == "mix") {
                if (!seen_base.insert({i, jj}).second) detail::fail(p, "duplicate term");
                out.base.add_mix(i, jj, dpoly_from_json(t["poly"], R, detail::at(p, "poly")));
            } else {
                if (!seen_eta.insert({i, jj}).second) detail::fail(p, "duplicate term");
                Elem c = detail::expect_elem(t["c"], detail::at(p, "c"), R->field());
                if (!c.is_zero()) out.eta[{i, jj}] = c;
            }
        } else {
            detail::fail(detail::at(p, "kind"), "unknown term kind '" + kind + "'");
        }
    }
    return out;
}

inline Form2 form2_from_json(const Json& j, const std::string& path = "") { return parse_form(j, path).total(); }

// ---------------------------------------------------------------------------
// Flagged bilinear spaces

namespace detail {

/// Heights h with V_q = span{e_i : h_i <= q}, when the flag is coordinate.
inline std::optional<std::vector<unsigned>> coordinate_heights(const Triple& T) {
    GfqOps ops(*T.F, T.n);
    std::vector<unsigned> h(T.n);
    for (std::size_t i = 0; i < T.n; ++i) h[i] = static_cast<unsigned>(T.height(ops.unit(i)));
    Flag f = flag_from_heights(*T.F, h);
    if (f.length() != T.flag.length()) return std::nullopt;
    for (std::size_t q = 0; q < f.length(); ++q)
        if (!(f.levels[q] == T.flag.levels[q])) return std::nullopt;
    return h;
}

}  // namespace detail

inline Json to_json(const Triple& T) {
    Json out;
    out["n"] = T.n;
    out["field_degree"] = T.F->degree();
    out["matrix"] = detail::matrix_json(*T.F, T.b);
    if (auto h = detail::coordinate_heights(T)) {
        out["flag"] = Json{{"kind", "heights"}, {"h", *h}};
    } else {
        Json chain = Json::array();
        for (const auto& lv : T.flag.levels) {
            Json basis = Json::array();
            for (const auto& v : lv.basis()) basis.push_back(detail::vector_json(*T.F, v));
            chain.push_back(std::move(basis));
        }
        out["flag"] = Json{{"kind", "subspaces"}, {"chain", chain}};
    }
    return out;
}

inline Triple triple_from_json(const Json& j, const std::string& path = "") {
    using namespace detail;
    expect_object(j, path, {"n", "field_degree", "matrix", "flag"});
    const std::size_t n = expect_uint(j["n"], at(path, "n"), 1, 64);
    const Field& F = Field::gf(expect_uint(j["field_degree"], at(path, "field_degree"), 1, Field::kMaxDegree));
    Matrix b = expect_matrix(j["matrix"], at(path, "matrix"), F, n);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = r + 1; c < n; ++c)
            if (!(b[r][c] == b[c][r]))
                fail(at(at(at(path, "matrix"), r), c), "matrix is not symmetric");
    const std::string fp = at(path, "flag");
    const Json& fj = j["flag"];
    if (!fj.is_object() || !fj.contains("kind") || !fj["kind"].is_string())
        fail(fp, "expected an object with a string 'kind'");
    Flag flag;
    const std::string kind = fj["kind"].get<std::string>();
    if (kind == "heights") {
        expect_object(fj, fp, {"kind", "h"});
        const std::string hp = at(fp, "h");
        expect_array(fj["h"], hp);
        if (fj["h"].size() != n) fail(hp, "expected " + std::to_string(n) + " heights");
        std::vector<unsigned> h;
        for (std::size_t i = 0; i < n; ++i) h.push_back(expect_uint(fj["h"][i], at(hp, i), 1, 64));
        flag = flag_from_heights(F, h);
    } else if (kind == "subspaces") {
        expect_object(fj, fp, {"kind", "chain"});
        const std::string cp = at(fp, "chain");
        const auto& chain = expect_array(fj["chain"], cp);
        if (chain.empty()) fail(cp, "flag chain is empty");
        for (std::size_t q = 0; q < chain.size(); ++q) {
            const std::string lp = at(cp, q);
            expect_array(chain[q], lp);
            std::vector<Vector> vs;
            for (std::size_t v = 0; v < chain[q].size(); ++v) vs.push_back(expect_vector(chain[q][v], at(lp, v), F, n));
            Subspace s = Subspace::span(F, n, vs);
            if (q > 0 && !s.contains(flag.levels.back()))
                fail(lp, "flag chain is not increasing: level " + std::to_string(q + 1) +
                             " does not contain level " + std::to_string(q));
            flag.levels.push_back(std::move(s));
        }
        if (flag.levels.back().dim() != n) fail(at(cp, chain.size() - 1), "last flag level is not the whole space");
    } else {
        fail(at(fp, "kind"), "unknown flag kind '" + kind + "'");
    }
    Triple T{n, &F, std::move(b), std::move(flag)};
    T.validate();
    return T;
}

inline Json to_json(const InvariantTable& tab) {
    Json cells = Json::array();
    for (const auto& [qr, c] : tab) {
        if (c.n == 0 && c.n1 == 0) continue;
        cells.push_back(Json{{"q", qr.first}, {"r", qr.second}, {"n", c.n}, {"n1", c.n1}});
    }
    return Json{{"cells", cells}};
}

inline InvariantTable invariants_from_json(const Json& j, const std::string& path = "") {
    using namespace detail;
    expect_object(j, path, {"cells"});
    const auto& cells = expect_array(j["cells"], at(path, "cells"));
    InvariantTable tab;
    for (std::size_t k = 0; k < cells.size(); ++k) {
        const std::string p = at(at(path, "cells"), k);
        expect_object(cells[k], p, {"q", "r", "n", "n1"});
        std::size_t q = expect_uint(cells[k]["q"], at(p, "q"), 1, 64);
        std::size_t r = expect_uint(cells[k]["r"], at(p, "r"), 1, 64);
        Cell c{expect_uint(cells[k]["n"], at(p, "n"), 0, 64), expect_uint(cells[k]["n1"], at(p, "n1"), 0, 64)};
        if (c.n1 > c.n) fail(p, "n1 exceeds n");
        if (!tab.emplace(std::make_pair(q, r), c).second) fail(p, "duplicate cell");
    }
    return tab;
}

inline Json to_json(const CanonicalResult& res, const Field& F) {
    Json out;
    out["n"] = res.canonical.matrix.size();
    out["field_degree"] = F.degree();
    out["canonical"] = detail::matrix_json(F, res.canonical.matrix);
    out["heights"] = res.canonical.heights;
    out["change"] = detail::matrix_json(F, res.change);
    out["alternating"] = res.alternating;
    return out;
}

inline CanonicalResult canonical_result_from_json(const Json& j, const std::string& path = "") {
    using namespace detail;
    expect_object(j, path, {"n", "field_degree", "canonical", "heights", "change", "alternating"});
    const std::size_t n = expect_uint(j["n"], at(path, "n"), 1, 64);
    const Field& F = Field::gf(expect_uint(j["field_degree"], at(path, "field_degree"), 1, Field::kMaxDegree));
    CanonicalResult r;
    r.canonical.matrix = expect_matrix(j["canonical"], at(path, "canonical"), F, n);
    const std::string hp = at(path, "heights");
    expect_array(j["heights"], hp);
    if (j["heights"].size() != n) fail(hp, "expected " + std::to_string(n) + " heights");
    for (std::size_t i = 0; i < n; ++i) r.canonical.heights.push_back(expect_uint(j["heights"][i], at(hp, i), 1, 64));
    r.change = expect_matrix(j["change"], at(path, "change"), F, n);
    r.alternating = expect_bool(j["alternating"], at(path, "alternating"));
    return r;
}

// ---------------------------------------------------------------------------
// Automorphisms and structure constants

inline Json to_json(const AdmissibleAut& s) {
    Json imgs = Json::array();
    for (const auto& g : s.images()) imgs.push_back(to_json(g));
    return Json{{"images", imgs}};
}

/// The ring comes from the form the automorphism acts on.
inline AdmissibleAut aut_from_json(const Json& j, const RingPtr& R, const std::string& path = "") {
    detail::expect_object(j, path, {"images"});
    const std::string ip = detail::at(path, "images");
    const auto& imgs = detail::expect_array(j["images"], ip);
    if (imgs.size() != R->n()) detail::fail(ip, "expected " + std::to_string(R->n()) + " images");
    std::vector<DPoly> g;
    for (std::size_t i = 0; i < imgs.size(); ++i) g.push_back(dpoly_from_json(imgs[i], R, detail::at(ip, i)));
    return AdmissibleAut(std::move(g));
}

/// One record per nonzero bracket [e_a, e_b], a < b in packed order.
template <class Fn>
void for_each_sc_record(const LieAlgebra& L, const Heights& h, Fn&& emit) {
    const Field& F = L.field();
    for (std::size_t a = 0; a < L.dim(); ++a)
        for (std::size_t b = a + 1; b < L.dim(); ++b) {
            const SparseVec& v = L.bracket_basis(a, b);
            if (v.empty()) continue;
            Json terms = Json::array();
            for (auto [g, c] : v)
                terms.push_back(Json{{"g", h.unpack(L.labels()[g])}, {"c", F.to_hex(c)}});
            Json rec;
            rec["a"] = h.unpack(L.labels()[a]);
            rec["b"] = h.unpack(L.labels()[b]);
            rec["terms"] = std::move(terms);
            emit(rec);
        }
}

}  // namespace nalie::io
