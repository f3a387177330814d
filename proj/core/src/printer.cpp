#include <sstream>

#include "stt/syntax.hpp"

namespace stt::syntax {
namespace {

// Precedence levels, loosest first. A child printed in a slot that demands a
// tighter level than the child's own gets parentheses.
enum Prec : int { kOpen = 0, kProduct = 1, kOr = 2, kAnd = 3, kCmp = 4, kApp = 5, kAtom = 6 };

int precedence(const SExpr& e) {
    switch (e.kind) {
        case SKind::Lambda:
        case SKind::Pi:
        case SKind::Arrow:
        case SKind::Sigma:
            return kOpen;
        case SKind::Product: return kProduct;
        case SKind::Or: return kOr;
        case SKind::And: return kAnd;
        case SKind::Leq:
        case SKind::TopeEq:
        case SKind::PathEq:
            return kCmp;
        case SKind::App:
        case SKind::Fst:
        case SKind::Snd:
        case SKind::Id:
        case SKind::IndPath:
            return kApp;
        default:
            return kAtom;
    }
}

void pattern(std::ostream& os, const Pattern& p) {
    if (!p.is_tuple()) {
        os << p.name;
        return;
    }
    os << '(';
    pattern(os, p.parts[0]);
    os << ", ";
    pattern(os, p.parts[1]);
    os << ')';
}

void print(std::ostream& os, const SExpr& e, int slot);

void binary(std::ostream& os, const SExpr& e, const char* op, int left, int right) {
    print(os, e.kids[0], left);
    os << ' ' << op << ' ';
    print(os, e.kids[1], right);
}

void print_unparenthesized(std::ostream& os, const SExpr& e) {
    switch (e.kind) {
        case SKind::Name:
        case SKind::Nat:
            os << e.text;
            break;
        case SKind::Universe: os << (e.level == 0 ? "U" : "U₁"); break;
        case SKind::Pi:
            os << '(';
            for (std::size_t i = 0; i < e.patterns.size(); ++i) os << (i ? " " : "") << e.patterns[i].name;
            os << " : ";
            print(os, e.kids[0], kOpen);
            os << ") → ";
            print(os, e.kids[1], kOpen);
            break;
        case SKind::Arrow: binary(os, e, "→", kProduct, kOpen); break;
        case SKind::Sigma:
            os << "Σ (" << e.patterns[0].name << " : ";
            print(os, e.kids[0], kOpen);
            os << "), ";
            print(os, e.kids[1], kOpen);
            break;
        case SKind::Product: binary(os, e, "×", kOr, kProduct); break;
        case SKind::Lambda:
            os << "λ";
            for (const auto& p : e.patterns) {
                os << ' ';
                pattern(os, p);
            }
            os << " ↦ ";
            print(os, e.kids[0], kOpen);
            break;
        case SKind::App:
            print(os, e.kids[0], kApp);
            os << ' ';
            print(os, e.kids[1], kAtom);
            break;
        case SKind::Pair:
            os << '(';
            print(os, e.kids[0], kOpen);
            os << ", ";
            print(os, e.kids[1], kOpen);
            os << ')';
            break;
        case SKind::Fst:
        case SKind::Snd:
        case SKind::Id:
        case SKind::IndPath:
            os << (e.kind == SKind::Fst ? "π₁" : e.kind == SKind::Snd ? "π₂" : e.kind == SKind::Id ? "Id" : "ind-path");
            for (const auto& k : e.kids) {
                os << ' ';
                print(os, k, kAtom);
            }
            break;
        case SKind::PathEq: binary(os, e, "∼", kApp, kApp); break;
        case SKind::Refl: os << "refl"; break;
        case SKind::Ext:
            os << "⟨{";
            pattern(os, e.patterns[0]);
            os << " : ";
            print(os, e.kids[0], kProduct);
            os << " | ";
            print(os, e.kids[1], kOr);
            os << "} → ";
            print(os, e.kids[2], kOpen);
            if (e.kids.size() == 5) {
                os << " | ";
                print(os, e.kids[3], kOr);
                os << " ↦ ";
                print(os, e.kids[4], kOpen);
            }
            os << "⟩";
            break;
        case SKind::Cases:
            os << "rec∨(";
            for (std::size_t i = 0; i + 1 < e.kids.size(); i += 2) {
                if (i) os << ", ";
                print(os, e.kids[i], kOr);
                os << " ↦ ";
                print(os, e.kids[i + 1], kOpen);
            }
            os << ')';
            break;
        case SKind::RecBot: os << "rec⊥"; break;
        case SKind::Top: os << "⊤"; break;
        case SKind::Bot: os << "⊥"; break;
        case SKind::Leq: binary(os, e, "≤", kApp, kApp); break;
        case SKind::TopeEq: binary(os, e, "≡", kApp, kApp); break;
        case SKind::And: binary(os, e, "∧", kAnd, kCmp); break;
        case SKind::Or: binary(os, e, "∨", kOr, kAnd); break;
        case SKind::Annot:
            os << '(';
            print(os, e.kids[0], kOpen);
            os << " : ";
            print(os, e.kids[1], kOpen);
            os << ')';
            break;
    }
}

void print(std::ostream& os, const SExpr& e, int slot) {
    if (precedence(e) < slot) {
        os << '(';
        print_unparenthesized(os, e);
        os << ')';
    } else {
        print_unparenthesized(os, e);
    }
}

}  // namespace

std::string print_expr(const SExpr& e) {
    std::ostringstream os;
    print(os, e, kOpen);
    return os.str();
}

std::string pretty_print(const SurfaceDecl& d) {
    std::ostringstream os;
    os << (d.postulate ? "postulate " : "def ") << d.name;
    for (const auto& p : d.params) {
        if (p.layer == Layer::Tope) {
            os << " [";
            print(os, p.type, kOpen);
            os << ']';
            continue;
        }
        os << " (";
        for (std::size_t i = 0; i < p.names.size(); ++i) os << (i ? " " : "") << p.names[i];
        os << " : ";
        print(os, p.type, kOpen);
        os << ')';
    }
    os << " : ";
    print(os, d.type, kOpen);
    if (!d.postulate) {
        os << " := ";
        print(os, d.body, kOpen);
    }
    os << ';';
    return os.str();
}

std::string pretty_print(const SurfaceModule& m) {
    std::ostringstream os;
    for (const auto& i : m.imports) os << "#import \"" << i.path << "\"\n";
    if (!m.imports.empty()) os << '\n';
    for (const auto& d : m.decls) os << pretty_print(d) << '\n';
    return os.str();
}

}  // namespace stt::syntax
