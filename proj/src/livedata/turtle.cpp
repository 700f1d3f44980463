#include "livedata/turtle.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

#include "livedata/error.hpp"
#include "livedata/model.hpp"

namespace livedata::turtle {

Term Term::iri(std::string value) { return Term{Kind::Iri, std::move(value), {}, {}}; }

Term Term::blank(std::string label) { return Term{Kind::Blank, std::move(label), {}, {}}; }

Term Term::literal(std::string lexical, std::string datatype_iri) {
    return Term{Kind::Literal, std::move(lexical), std::move(datatype_iri), {}};
}

Term Term::lang_literal(std::string lexical, std::string language) {
    return Term{Kind::Literal, std::move(lexical), {}, std::move(language)};
}

namespace {

bool is_name_start(char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z');
}

bool is_name_char(char c) {
    return is_name_start(c) || (c >= '0' && c <= '9') || c == '_' || c == '-';
}

bool is_local_char(char c) { return is_name_char(c) || c == '.' || c == '%'; }

void append_utf8(std::string& out, unsigned long cp) {
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
}

class Parser {
  public:
    explicit Parser(std::string_view text) : text_(text) {}

    Document run() {
        std::set<Triple> triples;
        triples_ = &triples;
        while (true) {
            skip_ws();
            if (eof()) break;
            if (peek() == '@') {
                directive();
            } else {
                statement();
            }
        }
        doc_.triples.assign(triples.begin(), triples.end());
        return std::move(doc_);
    }

  private:
    [[noreturn]] void fail(const std::string& message) const {
        throw Error(ErrorCode::Parse, "turtle line " + std::to_string(line_) + ": " + message);
    }

    bool eof() const { return pos_ >= text_.size(); }
    char peek(std::size_t ahead = 0) const {
        return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
    }
    char get() {
        const char c = text_[pos_++];
        if (c == '\n') ++line_;
        return c;
    }

    void skip_ws() {
        while (!eof()) {
            const char c = peek();
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                get();
            } else if (c == '#') {
                while (!eof() && peek() != '\n') get();
            } else {
                break;
            }
        }
    }

    void expect(char c) {
        skip_ws();
        if (eof() || peek() != c) fail(std::string("expected '") + c + "'");
        get();
    }

    void directive() {
        const std::string_view keyword = "@prefix";
        if (text_.substr(pos_, keyword.size()) != keyword) fail("unsupported directive");
        pos_ += keyword.size();
        skip_ws();
        std::string prefix;
        while (!eof() && is_name_char(peek())) prefix.push_back(get());
        if (!prefix.empty() && !is_name_start(prefix[0])) fail("bad prefix name '" + prefix + "'");
        if (eof() || peek() != ':') fail("expected ':' after prefix name");
        get();
        skip_ws();
        const std::string iri = iriref();
        doc_.prefixes[prefix] = iri;
        expect('.');
    }

    void statement() {
        const Term subject = subject_term();
        while (true) {
            skip_ws();
            const Term predicate = verb();
            while (true) {
                const Term object = object_term();
                triples_->insert(Triple{subject, predicate, object});
                skip_ws();
                if (peek() == ',') {
                    get();
                    continue;
                }
                break;
            }
            skip_ws();
            if (peek() == ';') {
                while (peek() == ';') {
                    get();
                    skip_ws();
                }
                if (peek() == '.') break;
                continue;
            }
            break;
        }
        expect('.');
    }

    Term subject_term() {
        skip_ws();
        if (peek() == '_' && peek(1) == ':') return blank();
        if (peek() == '"') fail("literal in subject position");
        return Term::iri(iri());
    }

    Term verb() {
        skip_ws();
        if (peek() == 'a' && !is_local_char(peek(1)) && peek(1) != ':') {
            get();
            return Term::iri(std::string(kRdfType));
        }
        return Term::iri(iri());
    }

    Term object_term() {
        skip_ws();
        if (eof()) fail("unexpected end of input");
        if (peek() == '"') return literal();
        if (peek() == '_' && peek(1) == ':') return blank();
        return Term::iri(iri());
    }

    Term blank() {
        pos_ += 2;
        std::string label;
        while (!eof() && is_name_char(peek())) label.push_back(get());
        if (label.empty()) fail("empty blank node label");
        return Term::blank(label);
    }

    std::string iri() {
        if (peek() == '<') return iriref();
        return prefixed_name();
    }

    std::string iriref() {
        if (peek() != '<') fail("expected IRI");
        get();
        std::string value;
        while (true) {
            if (eof() || peek() == '\n') fail("unterminated IRI");
            const char c = get();
            if (c == '>') break;
            value.push_back(c);
        }
        if (!is_absolute_iri(value)) fail("malformed or relative IRI <" + value + ">");
        return value;
    }

    std::string prefixed_name() {
        std::string prefix;
        while (!eof() && is_name_char(peek())) prefix.push_back(get());
        if (eof() || peek() != ':') {
            fail(prefix.empty() ? "expected term" : "expected ':' in prefixed name '" + prefix + "'");
        }
        get();
        std::string local;
        while (!eof() && is_local_char(peek())) local.push_back(get());
        // A trailing '.' terminates the statement rather than the name.
        while (!local.empty() && local.back() == '.') {
            local.pop_back();
            --pos_;
        }
        const auto it = doc_.prefixes.find(prefix);
        if (it == doc_.prefixes.end()) fail("undeclared prefix '" + prefix + ":'");
        const std::string value = it->second + local;
        if (!is_absolute_iri(value)) fail("malformed IRI from '" + prefix + ":" + local + "'");
        return value;
    }

    Term literal() {
        get();  // opening quote
        std::string lexical;
        while (true) {
            if (eof() || peek() == '\n') fail("literal without closing quote");
            const char c = get();
            if (c == '"') break;
            if (c != '\\') {
                lexical.push_back(c);
                continue;
            }
            if (eof()) fail("literal without closing quote");
            const char e = get();
            switch (e) {
                case 'n': lexical.push_back('\n'); break;
                case 'r': lexical.push_back('\r'); break;
                case 't': lexical.push_back('\t'); break;
                case 'b': lexical.push_back('\b'); break;
                case 'f': lexical.push_back('\f'); break;
                case '"': lexical.push_back('"'); break;
                case '\'': lexical.push_back('\''); break;
                case '\\': lexical.push_back('\\'); break;
                case 'u':
                case 'U': {
                    const std::size_t n = e == 'u' ? 4 : 8;
                    if (pos_ + n > text_.size()) fail("truncated unicode escape");
                    unsigned long cp = 0;
                    for (std::size_t i = 0; i < n; ++i) {
                        const char h = get();
                        cp <<= 4;
                        if (h >= '0' && h <= '9') cp |= static_cast<unsigned long>(h - '0');
                        else if (h >= 'a' && h <= 'f') cp |= static_cast<unsigned long>(h - 'a' + 10);
                        else if (h >= 'A' && h <= 'F') cp |= static_cast<unsigned long>(h - 'A' + 10);
                        else fail("bad unicode escape");
                    }
                    append_utf8(lexical, cp);
                    break;
                }
                default: fail(std::string("unknown escape '\\") + e + "'");
            }
        }
        if (peek() == '^' && peek(1) == '^') {
            pos_ += 2;
            return Term::literal(std::move(lexical), iri());
        }
        if (peek() == '@') {
            get();
            std::string tag;
            while (!eof() && (is_name_char(peek()))) tag.push_back(get());
            if (!is_language_tag(tag)) fail("bad language tag '" + tag + "'");
            return Term::lang_literal(std::move(lexical), std::move(tag));
        }
        return Term::literal(std::move(lexical), std::string(kXsd) + "string");
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    Document doc_;
    std::set<Triple>* triples_ = nullptr;
};

bool valid_local(std::string_view local) {
    if (local.empty()) return true;
    if (local.front() == '.' || local.front() == '-' || local.back() == '.') return false;
    return std::all_of(local.begin(), local.end(),
                       [](char c) { return is_name_char(c) || c == '.'; });
}

class Writer {
  public:
    Writer(const Document& doc, const WriteOptions& options) : doc_(doc), options_(options) {}

    std::string run() {
        std::string out;
        for (const auto& [prefix, ns] : doc_.prefixes) {
            out += "@prefix " + prefix + ": <" + ns + "> .\n";
        }
        std::vector<Triple> sorted = doc_.triples;
        std::sort(sorted.begin(), sorted.end());
        sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

        std::size_t i = 0;
        while (i < sorted.size()) {
            std::size_t j = i;
            while (j < sorted.size() && sorted[j].subject == sorted[i].subject) ++j;
            out += "\n";
            out += subject_block(sorted, i, j);
            i = j;
        }
        return out;
    }

  private:
    std::size_t predicate_rank(const std::string& iri) const {
        if (iri == kRdfType) return 0;
        const auto& order = options_.predicate_order;
        const auto it = std::find(order.begin(), order.end(), iri);
        return it == order.end() ? order.size() + 1 : static_cast<std::size_t>(it - order.begin()) + 1;
    }

    std::string subject_block(const std::vector<Triple>& triples, std::size_t begin, std::size_t end) {
        std::vector<const Triple*> block;
        for (std::size_t k = begin; k < end; ++k) block.push_back(&triples[k]);
        std::stable_sort(block.begin(), block.end(), [&](const Triple* a, const Triple* b) {
            const auto ra = predicate_rank(a->predicate.value);
            const auto rb = predicate_rank(b->predicate.value);
            if (ra != rb) return ra < rb;
            if (a->predicate != b->predicate) return a->predicate < b->predicate;
            return a->object < b->object;
        });

        std::string out = term(block.front()->subject);
        std::size_t k = 0;
        bool first = true;
        while (k < block.size()) {
            const Term& predicate = block[k]->predicate;
            out += first ? " " : " ;\n    ";
            first = false;
            out += predicate.value == kRdfType ? "a" : term(predicate);
            bool first_object = true;
            while (k < block.size() && block[k]->predicate == predicate) {
                out += first_object ? " " : ", ";
                first_object = false;
                out += term(block[k]->object);
                ++k;
            }
        }
        out += " .\n";
        return out;
    }

    std::string compact(const std::string& iri) const {
        std::string best;
        std::size_t best_len = 0;
        for (const auto& [prefix, ns] : doc_.prefixes) {
            if (ns.size() >= best_len && starts_with(iri, ns) && valid_local(iri.substr(ns.size()))) {
                if (ns.size() > best_len || best.empty()) {
                    best = prefix + ":" + iri.substr(ns.size());
                    best_len = ns.size();
                }
            }
        }
        return best.empty() ? "<" + iri + ">" : best;
    }

    static std::string escape(const std::string& value) {
        std::string out;
        for (unsigned char c : value) {
            switch (c) {
                case '"': out += "\\\""; break;
                case '\\': out += "\\\\"; break;
                case '\n': out += "\\n"; break;
                case '\r': out += "\\r"; break;
                case '\t': out += "\\t"; break;
                default:
                    if (c < 0x20 || c == 0x7f) {
                        char buf[8];
                        std::snprintf(buf, sizeof buf, "\\u%04X", c);
                        out += buf;
                    } else {
                        out.push_back(static_cast<char>(c));
                    }
            }
        }
        return out;
    }

    std::string term(const Term& t) const {
        switch (t.kind) {
            case Term::Kind::Iri: return compact(t.value);
            case Term::Kind::Blank: return "_:" + t.value;
            case Term::Kind::Literal: {
                std::string out = "\"" + escape(t.value) + "\"";
                if (!t.language.empty()) return out + "@" + t.language;
                return out + "^^" + compact(t.datatype);
            }
        }
        return {};
    }

    const Document& doc_;
    const WriteOptions& options_;
};

}  // namespace

Document parse(std::string_view text) { return Parser(text).run(); }

std::string write(const Document& document, const WriteOptions& options) {
    return Writer(document, options).run();
}

}  // namespace livedata::turtle
