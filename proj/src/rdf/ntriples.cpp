#include "ede/rdf/ntriples.hpp"

#include "ede/error.hpp"

#include <algorithm>
#include <cctype>
#include <optional>

namespace ede::rdf {

bool append_utf8(std::string& out, char32_t cp) {
    if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return false;
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
    return true;
}

namespace {

class LineParser {
public:
    LineParser(std::string_view line, std::size_t line_no) : line_(line), line_no_(line_no) {}

    /// Empty for blank and comment lines.
    std::optional<Triple> parse() {
        skip_ws();
        if (at_end() || peek() == '#') return std::nullopt;
        Term subject = parse_subject();
        skip_ws();
        Term predicate = parse_iri_term("predicate");
        skip_ws();
        Term object = parse_object();
        skip_ws();
        if (at_end() || peek() != '.') fail("expected '.' at end of statement");
        ++pos_;
        skip_ws();
        if (!at_end() && peek() != '#') fail("unexpected content after '.'");
        return Triple{std::move(subject), std::move(predicate), std::move(object)};
    }

private:
    [[noreturn]] void fail(const std::string& message) const {
        throw ParseError(line_no_, pos_ + 1, message);
    }

    bool at_end() const { return pos_ >= line_.size(); }
    char peek() const { return line_[pos_]; }

    void skip_ws() {
        while (!at_end() && (peek() == ' ' || peek() == '\t')) ++pos_;
    }

    char32_t read_hex(std::size_t digits) {
        if (pos_ + digits > line_.size()) fail("truncated unicode escape");
        char32_t cp = 0;
        for (std::size_t i = 0; i < digits; ++i) {
            char c = line_[pos_++];
            cp <<= 4;
            if (c >= '0' && c <= '9') cp |= static_cast<char32_t>(c - '0');
            else if (c >= 'a' && c <= 'f') cp |= static_cast<char32_t>(c - 'a' + 10);
            else if (c >= 'A' && c <= 'F') cp |= static_cast<char32_t>(c - 'A' + 10);
            else fail("invalid hex digit in unicode escape");
        }
        return cp;
    }

    void read_uchar(std::string& out) {
        char kind = line_[pos_++];
        char32_t cp = read_hex(kind == 'u' ? 4 : 8);
        if (!append_utf8(out, cp)) fail("invalid code point in unicode escape");
    }

    std::string read_iri() {
        ++pos_;  // '<'
        std::string value;
        while (true) {
            if (at_end()) fail("unterminated IRI");
            char c = line_[pos_++];
            if (c == '>') break;
            if (c == '\\') {
                if (at_end() || (peek() != 'u' && peek() != 'U')) fail("invalid escape in IRI");
                read_uchar(value);
                continue;
            }
            value.push_back(c);
        }
        if (!is_valid_iri(value)) fail("invalid IRI <" + value + ">");
        return value;
    }

    Term parse_iri_term(const char* role) {
        if (at_end() || peek() != '<') fail(std::string("expected IRI for ") + role);
        return Term::iri(read_iri());
    }

    Term parse_blank() {
        pos_ += 1;
        if (at_end() || peek() != ':') fail("expected ':' after '_' in blank node");
        ++pos_;
        std::size_t start = pos_;
        while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' ||
                             peek() == '-' || peek() == '.')) {
            ++pos_;
        }
        // A trailing '.' terminates the statement, not the label.
        while (pos_ > start && line_[pos_ - 1] == '.') --pos_;
        std::string label(line_.substr(start, pos_ - start));
        if (!is_valid_blank_label(label)) fail("invalid blank node label");
        return Term::blank(std::move(label));
    }

    Term parse_subject() {
        if (at_end()) fail("expected subject");
        if (peek() == '<') return Term::iri(read_iri());
        if (peek() == '_') return parse_blank();
        if (peek() == '"') fail("literal is not allowed as subject");
        fail("expected IRI or blank node as subject");
    }

    Term parse_object() {
        if (at_end()) fail("expected object");
        if (peek() == '<') return Term::iri(read_iri());
        if (peek() == '_') return parse_blank();
        if (peek() == '"') return parse_literal();
        fail("expected IRI, blank node or literal as object");
    }

    Term parse_literal() {
        ++pos_;
        std::string lexical;
        while (true) {
            if (at_end()) fail("unterminated string literal");
            char c = line_[pos_++];
            if (c == '"') break;
            if (c != '\\') {
                lexical.push_back(c);
                continue;
            }
            if (at_end()) fail("unterminated escape sequence");
            char e = peek();
            switch (e) {
                case 't': lexical.push_back('\t'); ++pos_; break;
                case 'b': lexical.push_back('\b'); ++pos_; break;
                case 'n': lexical.push_back('\n'); ++pos_; break;
                case 'r': lexical.push_back('\r'); ++pos_; break;
                case 'f': lexical.push_back('\f'); ++pos_; break;
                case '"': lexical.push_back('"'); ++pos_; break;
                case '\'': lexical.push_back('\''); ++pos_; break;
                case '\\': lexical.push_back('\\'); ++pos_; break;
                case 'u':
                case 'U': read_uchar(lexical); break;
                default: fail(std::string("invalid escape '\\") + e + "'");
            }
        }
        if (!at_end() && peek() == '@') {
            ++pos_;
            std::size_t start = pos_;
            while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '-')) ++pos_;
            std::string tag(line_.substr(start, pos_ - start));
            if (!is_valid_language_tag(tag)) fail("invalid language tag");
            return Term::lang_literal(std::move(lexical), std::move(tag));
        }
        if (pos_ + 1 < line_.size() && peek() == '^' && line_[pos_ + 1] == '^') {
            pos_ += 2;
            if (at_end() || peek() != '<') fail("expected datatype IRI after '^^'");
            std::string dt = read_iri();
            if (dt == kRdfLangString) fail("rdf:langString literal requires a language tag");
            return Term::literal(std::move(lexical), std::move(dt));
        }
        return Term::literal(std::move(lexical));
    }

    std::string_view line_;
    std::size_t line_no_;
    std::size_t pos_ = 0;
};

}  // namespace

Graph parse_ntriples(std::string_view text) {
    Graph graph;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start < text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        auto line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        ++line_no;
        if (auto triple = LineParser(line, line_no).parse()) graph.insert(std::move(*triple));
        start = end + 1;
    }
    return graph;
}

std::string serialize_ntriples(const Graph& graph) {
    std::vector<std::string> lines;
    lines.reserve(graph.size());
    for (const auto& t : graph.triples()) lines.push_back(t.to_ntriples());
    std::sort(lines.begin(), lines.end());
    std::string out;
    for (const auto& line : lines) {
        out += line;
        out.push_back('\n');
    }
    return out;
}

}  // namespace ede::rdf
