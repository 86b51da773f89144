// nalie-cli: batch front end for the nalie library.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <nalie/autom.hpp>
#include <nalie/flaginv.hpp>
#include <nalie/forms.hpp>
#include <nalie/hamalg.hpp>
#include <nalie/json_io.hpp>

using namespace nalie;
using io::Json;

namespace {

Json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError(path + ": cannot open file");
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError(path + ": " + e.what());
    }
}

/// Prefixes validation messages with the file they came from.
template <class Fn>
auto parse_file(const std::string& path, Fn&& fn) {
    Json j = read_json(path);
    try {
        return fn(j);
    } catch (const ValidationError& e) {
        throw ValidationError(path + ":" + e.what());
    }
}

void write_out(const std::string& out, const std::string& text) {
    if (out.empty()) {
        std::cout << text << '\n';
        return;
    }
    std::ofstream f(out);
    if (!f) throw ValidationError(out + ": cannot open file for writing");
    f << text << '\n';
}

std::vector<unsigned> parse_heights(const std::string& s) {
    std::vector<unsigned> h;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        std::size_t used = 0;
        unsigned long v = 0;
        try {
            v = std::stoul(tok, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != tok.size() || v < 1 || v > Heights::kMaxTotal)
            throw ValidationError("--heights: bad entry '" + tok + "' at position " + std::to_string(h.size() + 1));
        h.push_back(static_cast<unsigned>(v));
    }
    if (h.empty()) throw ValidationError("--heights: empty list");
    return h;
}

void error_line(const char* kind, const std::string& msg) {
    std::cerr << Json{{"error", kind}, {"message", msg}}.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Non-alternating Hamiltonian Lie algebras in characteristic 2"};
    app.require_subcommand(1);

    std::string triple, out, ta, tb, form, sc, fpath, gpath, aut, heights;
    unsigned n = 0, k = 0;
    bool derived = false;

    auto* canon = app.add_subcommand("canon", "Canonical form of a flagged bilinear space");
    canon->add_option("--triple", triple)->required();
    canon->add_option("--out", out);

    auto* inv = app.add_subcommand("invariants", "Invariant table of a flagged bilinear space");
    inv->add_option("--triple", triple)->required();
    inv->add_option("--out", out);

    auto* equiv = app.add_subcommand("equiv", "Equivalence of two flagged bilinear spaces");
    equiv->add_option("--a", ta)->required();
    equiv->add_option("--b", tb)->required();

    auto* algebra = app.add_subcommand("algebra", "Build P(n, m, w)");
    algebra->add_option("--form", form)->required();
    algebra->add_option("--sc", sc, "write structure constants as JSON lines");
    algebra->add_option("--out", out);

    auto* simple = app.add_subcommand("simple", "Simplicity of P or of its derived algebra");
    simple->add_option("--form", form)->required();
    simple->add_flag("--derived", derived);
    simple->add_option("--out", out);

    auto* coh = app.add_subcommand("cohomology", "dim H^k of the symmetric de Rham complex");
    coh->add_option("--n", n)->required()->check(CLI::Range(1u, Heights::kMaxTotal));
    coh->add_option("--heights", heights)->required();
    coh->add_option("--k", k)->required()->check(CLI::Range(0u, 2u));

    auto* closed = app.add_subcommand("closed", "Is the form closed");
    closed->add_option("--form", form)->required();

    auto* br = app.add_subcommand("bracket", "Poisson bracket of two functions modulo constants");
    br->add_option("--form", form)->required();
    br->add_option("--f", fpath)->required();
    br->add_option("--g", gpath)->required();
    br->add_option("--out", out);

    auto* norm = app.add_subcommand("normalize", "Normal form of a Hamiltonian form");
    norm->add_option("--form", form)->required();
    norm->add_option("--out", out);

    auto* app_aut = app.add_subcommand("apply-aut", "Apply an admissible automorphism to a form");
    app_aut->add_option("--aut", aut)->required();
    app_aut->add_option("--form", form)->required();
    app_aut->add_option("--out", out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        error_line("usage", e.what());
        return 1;
    }

    auto load_form = [&] { return parse_file(form, [](const Json& j) { return io::parse_form(j); }); };

    try {
        if (*canon) {
            Triple T = parse_file(triple, [](const Json& j) { return io::triple_from_json(j); });
            write_out(out, io::to_json(canonicalize(T), *T.F).dump());
        } else if (*inv) {
            Triple T = parse_file(triple, [](const Json& j) { return io::triple_from_json(j); });
            write_out(out, io::to_json(invariants(T)).dump());
        } else if (*equiv) {
            Triple A = parse_file(ta, [](const Json& j) { return io::triple_from_json(j); });
            Triple B = parse_file(tb, [](const Json& j) { return io::triple_from_json(j); });
            std::cout << (equivalent(A, B) ? "true" : "false") << '\n';
        } else if (*algebra) {
            HamiltonianForm H(load_form().total());
            LieAlgebra P = build_P(H);
            std::size_t records = 0;
            if (!sc.empty()) {
                std::ofstream f(sc);
                if (!f) throw ValidationError(sc + ": cannot open file for writing");
                io::for_each_sc_record(P, H.ring()->heights(), [&](const Json& rec) {
                    f << rec.dump() << '\n';
                    ++records;
                });
            } else {
                io::for_each_sc_record(P, H.ring()->heights(), [&](const Json&) { ++records; });
            }
            Json res;
            res["dim"] = P.dim();
            res["nonzero_brackets"] = records;
            res["center_dim"] = center(P).size();
            res["derived_dim"] = derived_basis(P).size();
            write_out(out, res.dump());
        } else if (*simple) {
            HamiltonianForm H(load_form().total());
            LieAlgebra L = derived ? build_P1(H) : build_P(H);
            Json res;
            res["algebra"] = derived ? "P1" : "P";
            res["dim"] = L.dim();
            res["simple"] = is_simple(L);
            write_out(out, res.dump());
        } else if (*coh) {
            auto h = parse_heights(heights);
            if (h.size() != n)
                throw ValidationError("--heights: expected " + std::to_string(n) + " entries, got " +
                                      std::to_string(h.size()));
            std::cout << cohomology_dims(n, h, k) << '\n';
        } else if (*closed) {
            std::cout << (is_closed(load_form().total()) ? "true" : "false") << '\n';
        } else if (*br) {
            HamiltonianForm H(load_form().total());
            const RingPtr& R = H.ring();
            DPoly f = parse_file(fpath, [&](const Json& j) { return io::dpoly_from_json(j, R); });
            DPoly g = parse_file(gpath, [&](const Json& j) { return io::dpoly_from_json(j, R); });
            write_out(out, io::to_json(poisson(H, f, g)).dump());
        } else if (*norm) {
            NormalizedForm nf = normalize_form(load_form().total());
            Json res;
            res["form"] = io::to_json(nf.omega0, nf.eta);
            res["reduced"] = nf.reduced;
            write_out(out, res.dump());
        } else if (*app_aut) {
            Form2 w = load_form().total();
            AdmissibleAut s = parse_file(aut, [&](const Json& j) { return io::aut_from_json(j, w.ring()); });
            write_out(out, io::to_json(apply_aut_form2(s, w)).dump());
        }
    } catch (const ValidationError& e) {
        error_line("validation", e.what());
        return 2;
    } catch (const PreconditionError& e) {
        error_line("precondition", e.what());
        return 3;
    } catch (const std::exception& e) {
        error_line("internal", e.what());
        return 4;
    }
    return 0;
}
