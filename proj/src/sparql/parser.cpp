#include "ede/sparql/parser.hpp"

#include "ede/rdf/ntriples.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <map>

namespace ede::sparql {

namespace {

enum class Tok {
    End,
    Iri,       // <...>
    PName,     // prefix:local
    Var,       // ?x
    String,    // "..."
    LangTag,   // @en
    DoubleCaret,
    Integer,
    Decimal,
    Double,
    Word,      // keywords, 'a', true/false
    LBrace, RBrace, LParen, RParen, Dot, Semicolon, Comma, Star,
    Op,        // = != < <= > >=
    AndAnd,
};

struct Token {
    Tok kind = Tok::End;
    std::string text;
    std::size_t line = 1;
    std::size_t column = 1;
};

std::string describe(const Token& t) {
    switch (t.kind) {
        case Tok::End: return "end of input";
        case Tok::String: return "string literal";
        default: return "'" + t.text + "'";
    }
}

bool is_pn_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' ||
           static_cast<unsigned char>(c) >= 0x80;
}

class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        while (true) {
            skip_space();
            Token tok;
            tok.line = line_;
            tok.column = column_;
            if (pos_ >= text_.size()) {
                out.push_back(tok);
                return out;
            }
            lex_one(tok);
            out.push_back(std::move(tok));
        }
    }

private:
    [[noreturn]] void fail(const std::string& message) const {
        throw ParseError(line_, column_, message);
    }

    char peek(std::size_t ahead = 0) const {
        return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
    }

    void advance(std::size_t n = 1) {
        for (std::size_t i = 0; i < n && pos_ < text_.size(); ++i) {
            if (text_[pos_] == '\n') {
                ++line_;
                column_ = 1;
            } else {
                ++column_;
            }
            ++pos_;
        }
    }

    void skip_space() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == '#') {
                while (pos_ < text_.size() && text_[pos_] != '\n') advance();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else {
                break;
            }
        }
    }

    /// An IRI reference if the text after '<' reaches '>' without characters
    /// an IRI cannot hold; otherwise '<' is the comparison operator.
    bool try_iri(Token& tok) {
        std::size_t i = pos_ + 1;
        while (i < text_.size()) {
            char c = text_[i];
            if (c == '>') break;
            if (static_cast<unsigned char>(c) <= 0x20 || c == '<' || c == '"' || c == '{' ||
                c == '}' || c == '|' || c == '^' || c == '`' || c == '\\') {
                return false;
            }
            ++i;
        }
        if (i >= text_.size()) return false;
        tok.kind = Tok::Iri;
        tok.text = std::string(text_.substr(pos_ + 1, i - pos_ - 1));
        advance(i - pos_ + 1);
        return true;
    }

    void lex_string(Token& tok) {
        char quote = peek();
        advance();
        std::string value;
        while (true) {
            if (pos_ >= text_.size() || peek() == '\n') fail("unterminated string literal");
            char c = peek();
            if (c == quote) {
                advance();
                break;
            }
            if (c != '\\') {
                value.push_back(c);
                advance();
                continue;
            }
            advance();
            char e = peek();
            switch (e) {
                case 't': value.push_back('\t'); advance(); break;
                case 'b': value.push_back('\b'); advance(); break;
                case 'n': value.push_back('\n'); advance(); break;
                case 'r': value.push_back('\r'); advance(); break;
                case 'f': value.push_back('\f'); advance(); break;
                case '"': value.push_back('"'); advance(); break;
                case '\'': value.push_back('\''); advance(); break;
                case '\\': value.push_back('\\'); advance(); break;
                case 'u':
                case 'U': {
                    std::size_t digits = e == 'u' ? 4 : 8;
                    advance();
                    if (pos_ + digits > text_.size()) fail("truncated unicode escape");
                    char32_t cp = 0;
                    auto hex = text_.substr(pos_, digits);
                    unsigned long v = 0;
                    auto [ptr, ec] = std::from_chars(hex.data(), hex.data() + hex.size(), v, 16);
                    if (ec != std::errc() || ptr != hex.data() + hex.size()) fail("invalid unicode escape");
                    cp = static_cast<char32_t>(v);
                    if (!rdf::append_utf8(value, cp)) fail("invalid code point in unicode escape");
                    advance(digits);
                    break;
                }
                default: fail(std::string("invalid escape '\\") + e + "'");
            }
        }
        tok.kind = Tok::String;
        tok.text = std::move(value);
    }

    void lex_number(Token& tok) {
        std::size_t start = pos_;
        if (peek() == '+' || peek() == '-') advance();
        bool digits = false;
        while (std::isdigit(static_cast<unsigned char>(peek()))) {
            advance();
            digits = true;
        }
        tok.kind = Tok::Integer;
        if (peek() == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
            advance();
            while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
            tok.kind = Tok::Decimal;
            digits = true;
        }
        if (digits && (peek() == 'e' || peek() == 'E')) {
            std::size_t save_pos = pos_, save_col = column_;
            advance();
            if (peek() == '+' || peek() == '-') advance();
            if (std::isdigit(static_cast<unsigned char>(peek()))) {
                while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
                tok.kind = Tok::Double;
            } else {
                pos_ = save_pos;
                column_ = save_col;
            }
        }
        if (!digits) fail("malformed number");
        tok.text = std::string(text_.substr(start, pos_ - start));
    }

    void lex_one(Token& tok) {
        char c = peek();
        switch (c) {
            case '{': tok.kind = Tok::LBrace; tok.text = "{"; advance(); return;
            case '}': tok.kind = Tok::RBrace; tok.text = "}"; advance(); return;
            case '(': tok.kind = Tok::LParen; tok.text = "("; advance(); return;
            case ')': tok.kind = Tok::RParen; tok.text = ")"; advance(); return;
            case ';': tok.kind = Tok::Semicolon; tok.text = ";"; advance(); return;
            case ',': tok.kind = Tok::Comma; tok.text = ","; advance(); return;
            case '*': tok.kind = Tok::Star; tok.text = "*"; advance(); return;
            case '"':
            case '\'': lex_string(tok); return;
            case '=': tok.kind = Tok::Op; tok.text = "="; advance(); return;
            case '&':
                if (peek(1) != '&') fail("expected '&&'");
                tok.kind = Tok::AndAnd;
                tok.text = "&&";
                advance(2);
                return;
            case '!':
                if (peek(1) != '=') fail("unsupported operator '!'");
                tok.kind = Tok::Op;
                tok.text = "!=";
                advance(2);
                return;
            case '<':
                if (try_iri(tok)) return;
                tok.kind = Tok::Op;
                tok.text = peek(1) == '=' ? "<=" : "<";
                advance(tok.text.size());
                return;
            case '>':
                tok.kind = Tok::Op;
                tok.text = peek(1) == '=' ? ">=" : ">";
                advance(tok.text.size());
                return;
            case '^':
                if (peek(1) != '^') fail("expected '^^'");
                tok.kind = Tok::DoubleCaret;
                tok.text = "^^";
                advance(2);
                return;
            case '@': {
                advance();
                std::size_t start = pos_;
                while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '-') advance();
                tok.kind = Tok::LangTag;
                tok.text = std::string(text_.substr(start, pos_ - start));
                if (!rdf::is_valid_language_tag(tok.text)) fail("invalid language tag");
                return;
            }
            case '?':
            case '$': {
                advance();
                std::size_t start = pos_;
                while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' ||
                       static_cast<unsigned char>(peek()) >= 0x80) {
                    advance();
                }
                if (pos_ == start) fail("expected variable name");
                tok.kind = Tok::Var;
                tok.text = std::string(text_.substr(start, pos_ - start));
                return;
            }
            case '.':
                if (std::isdigit(static_cast<unsigned char>(peek(1)))) {
                    fail("malformed number");
                }
                tok.kind = Tok::Dot;
                tok.text = ".";
                advance();
                return;
            default:
                break;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            ((c == '+' || c == '-') && std::isdigit(static_cast<unsigned char>(peek(1))))) {
            lex_number(tok);
            return;
        }
        if (is_pn_char(c) || c == ':') {
            std::size_t start = pos_;
            bool has_colon = false;
            while (pos_ < text_.size()) {
                char d = peek();
                if (d == ':') {
                    if (has_colon) break;
                    has_colon = true;
                    advance();
                } else if (is_pn_char(d)) {
                    advance();
                } else if (d == '.' && has_colon && is_pn_char(peek(1))) {
                    advance();
                } else {
                    break;
                }
            }
            tok.text = std::string(text_.substr(start, pos_ - start));
            tok.kind = has_colon ? Tok::PName : Tok::Word;
            return;
        }
        fail(std::string("unexpected character '") + c + "'");
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t column_ = 1;
};

bool keyword(const Token& t, std::string_view word) {
    if (t.kind != Tok::Word || t.text.size() != word.size()) return false;
    for (std::size_t i = 0; i < word.size(); ++i) {
        if (std::toupper(static_cast<unsigned char>(t.text[i])) != word[i]) return false;
    }
    return true;
}

CompareOp mirror(CompareOp op) {
    switch (op) {
        case CompareOp::Lt: return CompareOp::Gt;
        case CompareOp::Le: return CompareOp::Ge;
        case CompareOp::Gt: return CompareOp::Lt;
        case CompareOp::Ge: return CompareOp::Le;
        default: return op;
    }
}

CompareOp to_op(const std::string& text) {
    if (text == "=") return CompareOp::Eq;
    if (text == "!=") return CompareOp::Ne;
    if (text == "<") return CompareOp::Lt;
    if (text == "<=") return CompareOp::Le;
    if (text == ">") return CompareOp::Gt;
    return CompareOp::Ge;
}

class Parser {
public:
    explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

    Query run() {
        parse_prologue();
        parse_select();
        parse_where();
        if (keyword(cur(), "LIMIT")) {
            next();
            const Token& n = expect(Tok::Integer, "integer after LIMIT");
            if (n.text.front() == '-' || n.text.front() == '+') fail_at(n, "LIMIT must be a plain non-negative integer");
            std::size_t value = 0;
            auto [ptr, ec] = std::from_chars(n.text.data(), n.text.data() + n.text.size(), value);
            if (ec != std::errc()) fail_at(n, "LIMIT value out of range");
            query_.limit = value;
        }
        if (cur().kind != Tok::End) fail_expected("end of query");
        return std::move(query_);
    }

private:
    const Token& cur() const { return toks_[pos_]; }
    const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

    [[noreturn]] void fail_at(const Token& t, const std::string& message) const {
        throw ParseError(t.line, t.column, message);
    }
    [[noreturn]] void fail_expected(const std::string& what) const {
        fail_at(cur(), "expected " + what + ", found " + describe(cur()));
    }

    const Token& expect(Tok kind, const std::string& what) {
        if (cur().kind != kind) fail_expected(what);
        return next();
    }

    void parse_prologue() {
        while (keyword(cur(), "PREFIX")) {
            next();
            const Token& label = cur();
            if (label.kind != Tok::PName || label.text.back() != ':' ||
                label.text.find(':') != label.text.size() - 1) {
                fail_expected("prefix label ending in ':'");
            }
            next();
            const Token& iri = expect(Tok::Iri, "IRI reference after prefix label");
            if (!rdf::is_valid_iri(iri.text)) fail_at(iri, "invalid IRI <" + iri.text + ">");
            std::string name = label.text.substr(0, label.text.size() - 1);
            prefixes_[name] = iri.text;
            auto it = std::find_if(query_.prefixes.begin(), query_.prefixes.end(),
                                   [&](const auto& p) { return p.first == name; });
            if (it != query_.prefixes.end()) {
                it->second = iri.text;
            } else {
                query_.prefixes.emplace_back(name, iri.text);
            }
        }
    }

    void parse_select() {
        if (!keyword(cur(), "SELECT")) fail_expected("SELECT");
        next();
        if (keyword(cur(), "DISTINCT")) {
            next();
            query_.distinct = true;
        }
        if (cur().kind == Tok::Star) {
            next();
            query_.select_all = true;
            return;
        }
        while (cur().kind == Tok::Var) {
            Variable v{next().text};
            if (std::find(query_.projection.begin(), query_.projection.end(), v) == query_.projection.end()) {
                query_.projection.push_back(std::move(v));
            }
        }
        if (query_.projection.empty()) fail_expected("variable or '*' in SELECT clause");
    }

    void parse_where() {
        if (keyword(cur(), "WHERE")) next();
        expect(Tok::LBrace, "'{'");
        while (cur().kind != Tok::RBrace) {
            if (keyword(cur(), "FILTER")) {
                next();
                expect(Tok::LParen, "'(' after FILTER");
                parse_conjunction();
                expect(Tok::RParen, "')' closing FILTER");
                if (cur().kind == Tok::Dot) next();
                continue;
            }
            parse_triples_same_subject();
            if (cur().kind == Tok::Dot) {
                next();
            } else if (cur().kind != Tok::RBrace && !keyword(cur(), "FILTER")) {
                fail_expected("'.' or '}'");
            }
        }
        next();
    }

    void parse_triples_same_subject() {
        PatternTerm subject = parse_subject_or_object(true);
        while (true) {
            PatternTerm predicate = parse_verb();
            while (true) {
                PatternTerm object = parse_subject_or_object(false);
                query_.patterns.push_back(TriplePattern{subject, predicate, std::move(object)});
                if (cur().kind != Tok::Comma) break;
                next();
            }
            if (cur().kind != Tok::Semicolon) break;
            while (cur().kind == Tok::Semicolon) next();
            if (cur().kind == Tok::Dot || cur().kind == Tok::RBrace) break;
        }
    }

    PatternTerm parse_verb() {
        if (cur().kind == Tok::Word && cur().text == "a") {
            next();
            return rdf::Term::iri(std::string(rdf::kRdfType));
        }
        if (cur().kind == Tok::Var) return Variable{next().text};
        if (cur().kind == Tok::Iri || cur().kind == Tok::PName) return parse_iri();
        fail_expected("predicate (IRI, prefixed name, variable or 'a')");
    }

    PatternTerm parse_subject_or_object(bool subject) {
        if (cur().kind == Tok::Var) return Variable{next().text};
        if (cur().kind == Tok::Iri || cur().kind == Tok::PName) {
            if (cur().kind == Tok::PName && cur().text.rfind("_:", 0) == 0) {
                const Token& t = next();
                std::string label = t.text.substr(2);
                if (!rdf::is_valid_blank_label(label)) fail_at(t, "invalid blank node label");
                return rdf::Term::blank(std::move(label));
            }
            return parse_iri();
        }
        if (subject) fail_expected("subject (variable, IRI or prefixed name)");
        return parse_literal_constant("object (variable, IRI, prefixed name or literal)");
    }

    rdf::Term parse_iri() {
        const Token& t = next();
        if (t.kind == Tok::Iri) {
            if (!rdf::is_valid_iri(t.text)) fail_at(t, "invalid IRI <" + t.text + ">");
            return rdf::Term::iri(t.text);
        }
        auto colon = t.text.find(':');
        std::string label = t.text.substr(0, colon);
        auto it = prefixes_.find(label);
        if (it == prefixes_.end()) throw UndeclaredPrefixError(t.line, t.column, label);
        std::string iri = it->second + t.text.substr(colon + 1);
        if (!rdf::is_valid_iri(iri)) fail_at(t, "prefixed name expands to invalid IRI <" + iri + ">");
        return rdf::Term::iri(std::move(iri));
    }

    rdf::Term parse_literal_constant(const std::string& what) {
        const Token& t = cur();
        switch (t.kind) {
            case Tok::Iri:
            case Tok::PName:
                return parse_iri();
            case Tok::String: {
                std::string lexical = next().text;
                if (cur().kind == Tok::LangTag) return rdf::Term::lang_literal(lexical, next().text);
                if (cur().kind == Tok::DoubleCaret) {
                    next();
                    if (cur().kind != Tok::Iri && cur().kind != Tok::PName) fail_expected("datatype IRI after '^^'");
                    const Token& dt_tok = cur();
                    rdf::Term dt = parse_iri();
                    if (dt.value() == rdf::kRdfLangString) fail_at(dt_tok, "rdf:langString requires a language tag");
                    return rdf::Term::literal(lexical, dt.value());
                }
                return rdf::Term::literal(lexical);
            }
            case Tok::Integer:
                return rdf::Term::literal(next().text, std::string(rdf::kXsd) + "integer");
            case Tok::Decimal:
                return rdf::Term::literal(next().text, std::string(rdf::kXsd) + "decimal");
            case Tok::Double:
                return rdf::Term::literal(next().text, std::string(rdf::kXsd) + "double");
            case Tok::Word:
                if (t.text == "true" || t.text == "false") {
                    return rdf::Term::literal(next().text, std::string(rdf::kXsd) + "boolean");
                }
                break;
            default:
                break;
        }
        fail_expected(what);
    }

    void parse_conjunction() {
        parse_comparison();
        while (cur().kind == Tok::AndAnd) {
            next();
            parse_comparison();
        }
    }

    void parse_comparison() {
        if (cur().kind == Tok::LParen) {
            next();
            parse_conjunction();
            expect(Tok::RParen, "')'");
            return;
        }
        if (cur().kind == Tok::Var) {
            Variable v{next().text};
            const Token& op = expect(Tok::Op, "comparison operator");
            rdf::Term constant = parse_literal_constant("constant on the right of comparison");
            query_.filters.push_back(Filter{std::move(v), to_op(op.text), std::move(constant)});
            return;
        }
        rdf::Term constant = parse_literal_constant("variable or constant in FILTER");
        const Token& op = expect(Tok::Op, "comparison operator");
        if (cur().kind != Tok::Var) fail_expected("variable (filters compare a variable with a constant)");
        Variable v{next().text};
        query_.filters.push_back(Filter{std::move(v), mirror(to_op(op.text)), std::move(constant)});
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    std::map<std::string, std::string> prefixes_;
    Query query_;
};

}  // namespace

Query parse_query(std::string_view text) {
    return Parser(Lexer(text).run()).run();
}

}  // namespace ede::sparql
