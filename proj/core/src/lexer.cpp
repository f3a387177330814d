#include <array>
#include <unordered_map>

#include "stt/syntax.hpp"

namespace stt {

std::string_view to_string(TokenKind k) {
    switch (k) {
        case TokenKind::Identifier: return "identifier";
        case TokenKind::Keyword: return "keyword";
        case TokenKind::Symbol: return "symbol";
        case TokenKind::Natural: return "natural-literal";
        case TokenKind::String: return "string";
        case TokenKind::Layout: return "layout";
    }
    return "?";
}

}  // namespace stt

namespace stt::syntax {
namespace {

struct Alias {
    TokenKind kind;
    const char* canonical;
};

// Word-shaped spellings that are not identifiers.
const std::unordered_map<std::string_view, Alias>& word_table() {
    static const std::unordered_map<std::string_view, Alias> table = {
        {"def", {TokenKind::Keyword, "def"}},
        {"postulate", {TokenKind::Keyword, "postulate"}},
        {"U", {TokenKind::Keyword, "U"}},
        {"U₁", {TokenKind::Keyword, "U₁"}},
        {"U1", {TokenKind::Keyword, "U₁"}},
        {"Id", {TokenKind::Keyword, "Id"}},
        {"refl", {TokenKind::Keyword, "refl"}},
        {"ind-path", {TokenKind::Keyword, "ind-path"}},
        {"Σ", {TokenKind::Keyword, "Σ"}},
        {"Sigma", {TokenKind::Keyword, "Σ"}},
        {"Π", {TokenKind::Keyword, "Π"}},
        {"Pi", {TokenKind::Keyword, "Π"}},
        {"π₁", {TokenKind::Keyword, "π₁"}},
        {"pi1", {TokenKind::Keyword, "π₁"}},
        {"π₂", {TokenKind::Keyword, "π₂"}},
        {"pi2", {TokenKind::Keyword, "π₂"}},
        {"recOR", {TokenKind::Keyword, "rec∨"}},
        {"recBOT", {TokenKind::Keyword, "rec⊥"}},
        {"TOP", {TokenKind::Symbol, "⊤"}},
        {"BOT", {TokenKind::Symbol, "⊥"}},
        {"Δ¹", {TokenKind::Natural, "2"}},
    };
    return table;
}

struct Glyph {
    const char* spelling;
    TokenKind kind;
    const char* canonical;
};

// Longest spellings first so that prefixes lose.
constexpr std::array kGlyphs = {
    Glyph{"|->", TokenKind::Symbol, "↦"}, Glyph{"===", TokenKind::Symbol, "≡"},
    Glyph{":=", TokenKind::Symbol, ":="},  Glyph{"<=", TokenKind::Symbol, "≤"},
    Glyph{"->", TokenKind::Symbol, "→"},   Glyph{"/\\", TokenKind::Symbol, "∧"},
    Glyph{"\\/", TokenKind::Symbol, "∨"},  Glyph{"\\", TokenKind::Keyword, "λ"},
    Glyph{"λ", TokenKind::Keyword, "λ"},   Glyph{"↦", TokenKind::Symbol, "↦"},
    Glyph{"→", TokenKind::Symbol, "→"},    Glyph{"×", TokenKind::Symbol, "×"},
    Glyph{"≤", TokenKind::Symbol, "≤"},    Glyph{"≡", TokenKind::Symbol, "≡"},
    Glyph{"∧", TokenKind::Symbol, "∧"},    Glyph{"∨", TokenKind::Symbol, "∨"},
    Glyph{"⊤", TokenKind::Symbol, "⊤"},    Glyph{"⊥", TokenKind::Symbol, "⊥"},
    Glyph{"∼", TokenKind::Symbol, "∼"},    Glyph{"~", TokenKind::Symbol, "∼"},
    Glyph{"⟨", TokenKind::Symbol, "⟨"},    Glyph{"⟩", TokenKind::Symbol, "⟩"},
    Glyph{"Σ", TokenKind::Keyword, "Σ"},   Glyph{"Π", TokenKind::Keyword, "Π"},
    Glyph{"(", TokenKind::Symbol, "("},    Glyph{")", TokenKind::Symbol, ")"},
    Glyph{"[", TokenKind::Symbol, "["},    Glyph{"]", TokenKind::Symbol, "]"},
    Glyph{"{", TokenKind::Symbol, "{"},    Glyph{"}", TokenKind::Symbol, "}"},
    Glyph{",", TokenKind::Symbol, ","},    Glyph{":", TokenKind::Symbol, ":"},
    Glyph{";", TokenKind::Symbol, ";"},    Glyph{"|", TokenKind::Symbol, "|"},
};

// Code points that are glyphs and therefore never part of an identifier.
bool is_glyph_codepoint(char32_t c) {
    switch (c) {
        case U'λ': case U'↦': case U'→': case U'×': case U'≤': case U'≡': case U'∧':
        case U'∨': case U'⊤': case U'⊥': case U'∼': case U'⟨': case U'⟩': case U'Σ':
        case U'Π':
            return true;
        default:
            return false;
    }
}

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    LexResult run() {
        LexResult out;
        while (true) {
            skip_trivia(out);
            if (!out.errors.empty() || pos_ >= src_.size()) break;
            if (!next_token(out)) break;
        }
        return out;
    }

private:
    char32_t peek_cp(std::size_t at, std::size_t* len = nullptr) const {
        if (at >= src_.size()) {
            if (len) *len = 0;
            return 0;
        }
        auto b0 = static_cast<unsigned char>(src_[at]);
        std::size_t n = b0 < 0x80 ? 1 : (b0 >> 5) == 0x6 ? 2 : (b0 >> 4) == 0xE ? 3 : (b0 >> 3) == 0x1E ? 4 : 1;
        if (at + n > src_.size()) n = 1;
        char32_t cp = n == 1 ? b0 : n == 2 ? (b0 & 0x1F) : n == 3 ? (b0 & 0x0F) : (b0 & 0x07);
        for (std::size_t i = 1; i < n; ++i) cp = (cp << 6) | (static_cast<unsigned char>(src_[at + i]) & 0x3F);
        if (len) *len = n;
        return cp;
    }

    void advance_bytes(std::size_t n) {
        std::size_t stop = pos_ + n;
        while (pos_ < stop && pos_ < src_.size()) {
            std::size_t len = 1;
            char32_t cp = peek_cp(pos_, &len);
            pos_ += len;
            if (cp == U'\n') {
                ++line_;
                col_ = 1;
            } else {
                ++col_;
            }
        }
    }

    Span here() const { return {pos_, pos_, line_, col_, line_, col_}; }
    void close(Span& s) const {
        s.end = pos_;
        s.end_line = line_;
        s.end_col = col_;
    }

    bool starts_with(std::string_view s) const { return src_.substr(pos_, s.size()) == s; }

    void skip_trivia(LexResult& out) {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                advance_bytes(1);
            } else if (starts_with("--")) {
                while (pos_ < src_.size() && src_[pos_] != '\n') advance_bytes(1);
            } else if (starts_with("{-")) {
                Span start = here();
                int depth = 0;
                while (true) {
                    if (pos_ >= src_.size()) {
                        close(start);
                        out.errors.push_back({LexError::Kind::UnterminatedComment, start,
                                              "unterminated block comment"});
                        return;
                    }
                    if (starts_with("{-")) {
                        ++depth;
                        advance_bytes(2);
                    } else if (starts_with("-}")) {
                        --depth;
                        advance_bytes(2);
                        if (depth == 0) break;
                    } else {
                        advance_bytes(1);
                    }
                }
            } else {
                return;
            }
        }
    }

    static bool ident_start(char32_t c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' ||
               (c >= 0x80 && !is_glyph_codepoint(c));
    }
    static bool ident_continue(char32_t c) {
        return ident_start(c) || (c >= '0' && c <= '9') || c == '\'';
    }

    void push(LexResult& out, TokenKind kind, std::string text, Span span) {
        out.tokens.push_back({kind, std::move(text), std::string(src_.substr(span.begin, span.end - span.begin)), span});
    }

    bool next_token(LexResult& out) {
        Span span = here();
        std::size_t len = 0;
        char32_t c = peek_cp(pos_, &len);

        if (c == '#') {
            advance_bytes(1);
            std::size_t start = pos_;
            while (pos_ < src_.size() && ident_continue(peek_cp(pos_))) advance_bytes(1);
            std::string_view word = src_.substr(start, pos_ - start);
            if (word == "section") {
                while (pos_ < src_.size() && src_[pos_] != '\n') advance_bytes(1);
                close(span);
                push(out, TokenKind::Layout, "#section", span);
                return true;
            }
            if (word == "import") {
                close(span);
                push(out, TokenKind::Keyword, "#import", span);
                return true;
            }
            close(span);
            out.errors.push_back({LexError::Kind::InvalidCharacter, span, "unknown directive"});
            return false;
        }

        if (c == '"') {
            advance_bytes(1);
            std::size_t start = pos_;
            while (pos_ < src_.size() && src_[pos_] != '"' && src_[pos_] != '\n') advance_bytes(1);
            if (pos_ >= src_.size() || src_[pos_] != '"') {
                close(span);
                out.errors.push_back({LexError::Kind::UnterminatedString, span, "unterminated string"});
                return false;
            }
            std::string text(src_.substr(start, pos_ - start));
            advance_bytes(1);
            close(span);
            push(out, TokenKind::String, std::move(text), span);
            return true;
        }

        if (c >= '0' && c <= '9') {
            while (pos_ < src_.size() && src_[pos_] >= '0' && src_[pos_] <= '9') advance_bytes(1);
            close(span);
            push(out, TokenKind::Natural, std::string(src_.substr(span.begin, pos_ - span.begin)), span);
            return true;
        }

        if (ident_start(c)) {
            while (pos_ < src_.size()) {
                std::size_t l = 0;
                char32_t d = peek_cp(pos_, &l);
                if (ident_continue(d)) {
                    advance_bytes(l);
                } else if (d == '-' && ident_continue(peek_cp(pos_ + 1)) && peek_cp(pos_ + 1) != '-') {
                    advance_bytes(1);
                } else {
                    break;
                }
            }
            std::string_view word = src_.substr(span.begin, pos_ - span.begin);
            if (word == "rec") {
                if (starts_with("∨")) {
                    advance_bytes(std::string_view("∨").size());
                    close(span);
                    push(out, TokenKind::Keyword, "rec∨", span);
                    return true;
                }
                if (starts_with("⊥")) {
                    advance_bytes(std::string_view("⊥").size());
                    close(span);
                    push(out, TokenKind::Keyword, "rec⊥", span);
                    return true;
                }
            }
            close(span);
            auto it = word_table().find(word);
            if (it != word_table().end()) {
                push(out, it->second.kind, it->second.canonical, span);
            } else {
                push(out, TokenKind::Identifier, std::string(word), span);
            }
            return true;
        }

        for (const auto& g : kGlyphs) {
            if (starts_with(g.spelling)) {
                advance_bytes(std::string_view(g.spelling).size());
                close(span);
                push(out, g.kind, g.canonical, span);
                return true;
            }
        }

        advance_bytes(len == 0 ? 1 : len);
        close(span);
        out.errors.push_back({LexError::Kind::InvalidCharacter, span,
                              "invalid character '" + std::string(src_.substr(span.begin, span.end - span.begin)) + "'"});
        return false;
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

}  // namespace

LexResult tokenize(std::string_view source) {
    return Lexer(source).run();
}

}  // namespace stt::syntax
