#include <algorithm>
#include <stdexcept>

#include "stt/syntax.hpp"

namespace stt::syntax {
namespace {

struct ParseFailure {
    ParseDiagnostic diag;
};

class Parser {
public:
    explicit Parser(std::vector<Token> tokens) {
        for (auto& t : tokens)
            if (t.kind != TokenKind::Layout) toks_.push_back(std::move(t));
    }

    SurfaceModule module() {
        SurfaceModule m;
        while (!at_end()) {
            if (is_keyword("#import")) {
                Span s = peek().span;
                advance();
                if (at_end() || peek().kind != TokenKind::String) {
                    m.diagnostics.push_back({s, "expected a quoted path after #import", {"string"}});
                    resync();
                    continue;
                }
                m.imports.push_back({peek().text, Span::cover(s, peek().span)});
                advance();
                continue;
            }
            if (is_keyword("def") || is_keyword("postulate")) {
                std::size_t start = pos_;
                try {
                    m.decls.push_back(declaration());
                } catch (const ParseFailure& f) {
                    m.diagnostics.push_back(f.diag);
                    if (pos_ == start) advance();
                    resync();
                }
                continue;
            }
            m.diagnostics.push_back({peek().span, "expected a declaration", {"def", "postulate", "#import"}});
            advance();
            resync();
        }
        return m;
    }

private:
    // ---- token helpers -----------------------------------------------------

    bool at_end() const { return pos_ >= toks_.size(); }
    const Token& peek(std::size_t ahead = 0) const {
        static const Token eof{TokenKind::Symbol, "<eof>", "", {}};
        return pos_ + ahead < toks_.size() ? toks_[pos_ + ahead] : eof;
    }
    Span last_span() const { return pos_ > 0 ? toks_[pos_ - 1].span : Span{}; }
    Span eof_span() const {
        if (toks_.empty()) return {};
        Span s = toks_.back().span;
        return {s.end, s.end, s.end_line, s.end_col, s.end_line, s.end_col};
    }
    void advance() { ++pos_; }

    bool is_symbol(std::string_view s, std::size_t ahead = 0) const {
        const Token& t = peek(ahead);
        return pos_ + ahead < toks_.size() && t.kind == TokenKind::Symbol && t.text == s;
    }
    bool is_keyword(std::string_view s) const {
        return !at_end() && peek().kind == TokenKind::Keyword && peek().text == s;
    }

    [[noreturn]] void fail(std::vector<std::string> expected) const {
        Span s = at_end() ? eof_span() : peek().span;
        std::string msg = "expected ";
        for (std::size_t i = 0; i < expected.size(); ++i) {
            if (i) msg += i + 1 == expected.size() ? " or " : ", ";
            msg += "'" + expected[i] + "'";
        }
        msg += at_end() ? " but reached end of input" : " but found '" + peek().lexeme + "'";
        throw ParseFailure{{s, msg, std::move(expected)}};
    }

    Span expect_symbol(std::string_view s) {
        if (!is_symbol(s)) fail({std::string(s)});
        Span sp = peek().span;
        advance();
        return sp;
    }

    std::string expect_identifier(Span* span = nullptr) {
        if (at_end() || peek().kind != TokenKind::Identifier) fail({"identifier"});
        if (span) *span = peek().span;
        std::string s = peek().text;
        advance();
        return s;
    }

    void resync() {
        while (!at_end() && !is_keyword("def") && !is_keyword("postulate") && !is_keyword("#import"))
            advance();
    }

    // ---- declarations -----------------------------------------------------

    SurfaceDecl declaration() {
        SurfaceDecl d;
        Span start = peek().span;
        d.postulate = is_keyword("postulate");
        advance();
        d.name = expect_identifier(&d.name_span);
        while (is_symbol("(") || is_symbol("[")) d.params.push_back(param());
        expect_symbol(":");
        d.type = expr();
        if (!d.postulate) {
            expect_symbol(":=");
            d.body = expr();
        }
        Span end = expect_symbol(";");
        d.span = Span::cover(start, end);
        return d;
    }

    Param param() {
        Param p;
        Span start = peek().span;
        if (is_symbol("[")) {
            advance();
            p.layer = Layer::Tope;
            p.type = expr();
            p.span = Span::cover(start, expect_symbol("]"));
            return p;
        }
        expect_symbol("(");
        do {
            p.names.push_back(expect_identifier());
        } while (!at_end() && peek().kind == TokenKind::Identifier);
        expect_symbol(":");
        p.type = expr();
        p.layer = is_cube_syntax(p.type) ? Layer::Cube : Layer::Term;
        p.span = Span::cover(start, expect_symbol(")"));
        return p;
    }

    // ---- expressions ------------------------------------------------------
    //
    // expr    := λ pat+ ↦ expr | Σ (x : e) , expr | Π (x : e) , expr | arrow
    // arrow   := product [→ expr]           (a binder annotation on the left makes a Π)
    // product := or [× product]
    // or      := and (∨ and)*
    // and     := cmp (∧ cmp)*
    // cmp     := app [(≤ | ≡ | ∼) app]
    // app     := prefix-form | atom atom*

    static SExpr node(SKind k, Span s, std::vector<SExpr> kids = {}) {
        SExpr e;
        e.kind = k;
        e.span = s;
        e.kids = std::move(kids);
        return e;
    }

    SExpr expr() {
        Span start = peek().span;
        if (is_keyword("λ")) {
            advance();
            SExpr e = node(SKind::Lambda, start);
            do {
                e.patterns.push_back(pattern());
            } while (!is_symbol("↦"));
            expect_symbol("↦");
            e.kids.push_back(expr());
            e.span = Span::cover(start, e.kids.back().span);
            return e;
        }
        if (is_keyword("Σ") || is_keyword("Π")) {
            bool sigma = is_keyword("Σ");
            advance();
            expect_symbol("(");
            SExpr e = node(sigma ? SKind::Sigma : SKind::Pi, start);
            do {
                Span s;
                std::string n = expect_identifier(&s);
                e.patterns.push_back(Pattern::var(std::move(n), s));
            } while (!sigma && !at_end() && peek().kind == TokenKind::Identifier);
            expect_symbol(":");
            e.kids.push_back(expr());
            expect_symbol(")");
            expect_symbol(",");
            e.kids.push_back(expr());
            e.span = Span::cover(start, e.kids.back().span);
            return e;
        }
        return arrow();
    }

    // Names bound by a `(x y : A)` annotation, if the left side has that shape.
    static bool binder_names(const SExpr& e, std::vector<Pattern>& out) {
        if (e.kind == SKind::Name) {
            out.push_back(Pattern::var(e.text, e.span));
            return true;
        }
        if (e.kind == SKind::App) {
            return binder_names(e.kids[0], out) && e.kids[1].kind == SKind::Name &&
                   binder_names(e.kids[1], out);
        }
        return false;
    }

    struct Group {
        std::vector<Pattern> names;
        SExpr type;
        Span span;
    };

    // `(x y : A) (f : B)` on the left of an arrow: one group per annotation.
    static bool telescope(SExpr& e, std::vector<Group>& groups) {
        if (e.kind == SKind::App) return telescope(e.kids[0], groups) && telescope(e.kids[1], groups);
        std::vector<Pattern> names;
        if (e.kind != SKind::Annot || e.text != "(" || !binder_names(e.kids[0], names)) return false;
        groups.push_back({std::move(names), std::move(e.kids[1]), e.span});
        return true;
    }

    SExpr arrow() {
        SExpr lhs = product();
        if (!is_symbol("→")) return lhs;
        advance();
        SExpr rhs = expr();
        SExpr copy = lhs;
        std::vector<Group> groups;
        if (telescope(copy, groups)) {
            for (auto g = groups.rbegin(); g != groups.rend(); ++g) {
                SExpr e = node(SKind::Pi, Span::cover(g->span, rhs.span));
                e.patterns = std::move(g->names);
                e.kids = {std::move(g->type), std::move(rhs)};
                rhs = std::move(e);
            }
            return rhs;
        }
        Span s = Span::cover(lhs.span, rhs.span);
        return node(SKind::Arrow, s, {std::move(lhs), std::move(rhs)});
    }

    SExpr product() {
        SExpr lhs = disjunction();
        if (!is_symbol("×")) return lhs;
        advance();
        SExpr rhs = product();
        Span s = Span::cover(lhs.span, rhs.span);
        return node(SKind::Product, s, {std::move(lhs), std::move(rhs)});
    }

    SExpr disjunction() {
        SExpr lhs = conjunction();
        while (is_symbol("∨")) {
            advance();
            SExpr rhs = conjunction();
            Span s = Span::cover(lhs.span, rhs.span);
            lhs = node(SKind::Or, s, {std::move(lhs), std::move(rhs)});
        }
        return lhs;
    }

    SExpr conjunction() {
        SExpr lhs = comparison();
        while (is_symbol("∧")) {
            advance();
            SExpr rhs = comparison();
            Span s = Span::cover(lhs.span, rhs.span);
            lhs = node(SKind::And, s, {std::move(lhs), std::move(rhs)});
        }
        return lhs;
    }

    SExpr comparison() {
        SExpr lhs = application();
        SKind k;
        if (is_symbol("≤"))
            k = SKind::Leq;
        else if (is_symbol("≡"))
            k = SKind::TopeEq;
        else if (is_symbol("∼"))
            k = SKind::PathEq;
        else
            return lhs;
        advance();
        SExpr rhs = application();
        Span s = Span::cover(lhs.span, rhs.span);
        return node(k, s, {std::move(lhs), std::move(rhs)});
    }

    bool starts_atom() const {
        if (at_end()) return false;
        const Token& t = peek();
        switch (t.kind) {
            case TokenKind::Identifier:
            case TokenKind::Natural:
                return true;
            case TokenKind::Keyword:
                return t.text == "U" || t.text == "U₁" || t.text == "refl" || t.text == "rec⊥" ||
                       t.text == "rec∨";
            case TokenKind::Symbol:
                return t.text == "(" || t.text == "⟨" || t.text == "⊤" || t.text == "⊥";
            default:
                return false;
        }
    }

    SExpr application() {
        Span start = peek().span;
        SExpr head;
        auto prefix = [&](SKind k, int arity) {
            advance();
            SExpr e = node(k, start);
            for (int i = 0; i < arity; ++i) e.kids.push_back(atom());
            e.span = Span::cover(start, e.kids.back().span);
            return e;
        };
        if (is_keyword("π₁"))
            head = prefix(SKind::Fst, 1);
        else if (is_keyword("π₂"))
            head = prefix(SKind::Snd, 1);
        else if (is_keyword("Id"))
            head = prefix(SKind::Id, 3);
        else if (is_keyword("ind-path"))
            head = prefix(SKind::IndPath, 3);
        else
            head = atom();
        while (starts_atom()) {
            SExpr arg = atom();
            Span s = Span::cover(head.span, arg.span);
            head = node(SKind::App, s, {std::move(head), std::move(arg)});
        }
        return head;
    }

    Pattern pattern() {
        Span start = peek().span;
        if (is_symbol("(")) {
            advance();
            Pattern p;
            p.parts.push_back(pattern());
            expect_symbol(",");
            p.parts.push_back(pattern());
            p.span = Span::cover(start, expect_symbol(")"));
            return p;
        }
        Span s;
        std::string n = expect_identifier(&s);
        return Pattern::var(std::move(n), s);
    }

    SExpr atom() {
        if (at_end()) fail({"expression"});
        const Token& t = peek();
        Span start = t.span;
        if (t.kind == TokenKind::Identifier) {
            SExpr e = node(SKind::Name, start);
            e.text = t.text;
            advance();
            return e;
        }
        if (t.kind == TokenKind::Natural) {
            if (t.text != "0" && t.text != "1" && t.text != "2") fail({"0", "1", "2"});
            SExpr e = node(SKind::Nat, start);
            e.text = t.text;
            advance();
            return e;
        }
        if (t.kind == TokenKind::Keyword) {
            if (t.text == "U" || t.text == "U₁") {
                SExpr e = node(SKind::Universe, start);
                e.level = t.text == "U" ? 0 : 1;
                advance();
                return e;
            }
            if (t.text == "refl") {
                advance();
                return node(SKind::Refl, start);
            }
            if (t.text == "rec⊥") {
                advance();
                return node(SKind::RecBot, start);
            }
            if (t.text == "rec∨") {
                advance();
                expect_symbol("(");
                SExpr e = node(SKind::Cases, start);
                do {
                    if (!e.kids.empty()) expect_symbol(",");
                    e.kids.push_back(disjunction());
                    expect_symbol("↦");
                    e.kids.push_back(expr());
                } while (is_symbol(","));
                e.span = Span::cover(start, expect_symbol(")"));
                return e;
            }
        }
        if (t.kind == TokenKind::Symbol) {
            if (t.text == "⊤" || t.text == "⊥") {
                advance();
                return node(t.text == "⊤" ? SKind::Top : SKind::Bot, start);
            }
            if (t.text == "(") {
                advance();
                SExpr inner = expr();
                if (is_symbol(",")) {
                    advance();
                    SExpr second = expr();
                    Span s = Span::cover(start, expect_symbol(")"));
                    return node(SKind::Pair, s, {std::move(inner), std::move(second)});
                }
                if (is_symbol(":")) {
                    advance();
                    SExpr type = expr();
                    Span s = Span::cover(start, expect_symbol(")"));
                    SExpr e = node(SKind::Annot, s, {std::move(inner), std::move(type)});
                    e.text = "(";
                    return e;
                }
                Span close = expect_symbol(")");
                inner.span = Span::cover(start, close);
                return inner;
            }
            if (t.text == "⟨") return extension();
        }
        fail({"expression"});
    }

    SExpr extension() {
        Span start = expect_symbol("⟨");
        SExpr e = node(SKind::Ext, start);
        expect_symbol("{");
        e.patterns.push_back(pattern());
        expect_symbol(":");
        e.kids.push_back(product());
        expect_symbol("|");
        e.kids.push_back(disjunction());
        expect_symbol("}");
        expect_symbol("→");
        e.kids.push_back(expr());
        if (is_symbol("|")) {
            advance();
            e.kids.push_back(disjunction());
            expect_symbol("↦");
            e.kids.push_back(expr());
        }
        e.span = Span::cover(start, expect_symbol("⟩"));
        return e;
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

}  // namespace

bool is_cube_syntax(const SExpr& e) {
    if (e.kind == SKind::Nat) return e.text == "1" || e.text == "2";
    if (e.kind == SKind::Product) return is_cube_syntax(e.kids[0]) && is_cube_syntax(e.kids[1]);
    return false;
}

SurfaceModule parse_module(std::string_view source) {
    LexResult lexed = tokenize(source);
    SurfaceModule m = Parser(std::move(lexed.tokens)).module();
    for (const auto& err : lexed.errors) {
        m.diagnostics.insert(m.diagnostics.begin(), ParseDiagnostic{err.span, err.message, {}});
    }
    return m;
}

namespace {

bool same_pattern(const Pattern& a, const Pattern& b) {
    if (a.name != b.name || a.parts.size() != b.parts.size()) return false;
    for (std::size_t i = 0; i < a.parts.size(); ++i)
        if (!same_pattern(a.parts[i], b.parts[i])) return false;
    return true;
}

}  // namespace

bool same_structure(const SExpr& a, const SExpr& b) {
    if (a.kind != b.kind || a.text != b.text || a.level != b.level) return false;
    if (a.patterns.size() != b.patterns.size() || a.kids.size() != b.kids.size()) return false;
    for (std::size_t i = 0; i < a.patterns.size(); ++i)
        if (!same_pattern(a.patterns[i], b.patterns[i])) return false;
    for (std::size_t i = 0; i < a.kids.size(); ++i)
        if (!same_structure(a.kids[i], b.kids[i])) return false;
    return true;
}

bool same_structure(const SurfaceDecl& a, const SurfaceDecl& b) {
    if (a.postulate != b.postulate || a.name != b.name || a.params.size() != b.params.size())
        return false;
    for (std::size_t i = 0; i < a.params.size(); ++i) {
        const auto &p = a.params[i], &q = b.params[i];
        if (p.names != q.names || p.layer != q.layer || !same_structure(p.type, q.type)) return false;
    }
    if (!same_structure(a.type, b.type)) return false;
    return a.postulate || same_structure(a.body, b.body);
}

}  // namespace stt::syntax
