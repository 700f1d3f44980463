#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace livedata::turtle {

// Supported subset: `@prefix` directives, absolute IRIs, prefixed names,
// blank node labels (`_:x`), string literals with optional `^^datatype` or
// `@lang`, the `a` keyword, `;` and `,` separators and `#` comments.

inline constexpr std::string_view kRdf = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
inline constexpr std::string_view kRdfs = "http://www.w3.org/2000/01/rdf-schema#";
inline constexpr std::string_view kOwl = "http://www.w3.org/2002/07/owl#";
inline constexpr std::string_view kXsd = "http://www.w3.org/2001/XMLSchema#";
inline constexpr std::string_view kRdfType = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";

struct Term {
    enum class Kind { Iri, Blank, Literal };

    Kind kind = Kind::Iri;
    std::string value;     // IRI, blank label, or literal lexical form
    std::string datatype;  // literal datatype IRI; empty for language-tagged
    std::string language;

    static Term iri(std::string value);
    static Term blank(std::string label);
    static Term literal(std::string lexical, std::string datatype_iri);
    static Term lang_literal(std::string lexical, std::string language);

    friend bool operator==(const Term&, const Term&) = default;
    friend auto operator<=>(const Term&, const Term&) = default;
};

struct Triple {
    Term subject;
    Term predicate;
    Term object;

    friend bool operator==(const Triple&, const Triple&) = default;
    friend auto operator<=>(const Triple&, const Triple&) = default;
};

struct Document {
    std::map<std::string, std::string> prefixes;
    /// Sorted, duplicate-free.
    std::vector<Triple> triples;
};

/// Throws Error(Parse) with line information on malformed input.
Document parse(std::string_view text);

struct WriteOptions {
    /// Predicates listed here come first, in this order, after rdf:type.
    std::vector<std::string> predicate_order;
};

/// Canonical form: prefixes sorted by name, subjects sorted by IRI, predicates
/// in the configured order then by IRI, objects sorted.
std::string write(const Document& document, const WriteOptions& options = {});

}  // namespace livedata::turtle
