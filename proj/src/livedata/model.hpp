#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "livedata/util.hpp"

namespace livedata {

// ---------------------------------------------------------------------------
// Identity
// ---------------------------------------------------------------------------

/// Stratified output kinds live in CREP/DREP; source kinds live in SREP.
enum class ContentKind {
    Standardised,
    Language,
    Knowledge,
    Graph,
    LowQuality,
    ExternalLanguage,
    ExternalReference,
};

std::string_view to_string(ContentKind kind) noexcept;
ContentKind parse_content_kind(std::string_view text);
bool is_stratified(ContentKind kind) noexcept;
bool is_source(ContentKind kind) noexcept;

/// BCP-47 tag keyed text, e.g. {"en": "Professors", "it": "Professori"}.
using MultilingualText = std::map<std::string, std::string>;

struct NodeDescriptor {
    std::string node_id;
    std::string name;
    MultilingualText domain_description;
    std::string base_url;
    std::string publisher;

    friend bool operator==(const NodeDescriptor&, const NodeDescriptor&) = default;
};

struct DatasetRef {
    std::string node_id;
    std::string local_id;
    std::uint32_t version = 1;
    ContentKind kind = ContentKind::Standardised;

    /// `node_id/local_id/version`, the path form used by the catalogue API.
    [[nodiscard]] std::string path() const;
    /// Absolute IRI naming the dataset inside RDF documents.
    [[nodiscard]] std::string iri() const;
    /// Same identity ignoring kind.
    [[nodiscard]] bool same_identity(const DatasetRef& other) const noexcept;

    friend bool operator==(const DatasetRef&, const DatasetRef&) = default;
    friend auto operator<=>(const DatasetRef&, const DatasetRef&) = default;
};

std::string to_string(const DatasetRef& ref);

bool is_node_id(std::string_view text);
bool is_local_id(std::string_view text);
/// `[a-z0-9][a-z0-9_-]{0,63}`, the form used for table, attribute, concept and
/// EType ids.
bool is_slug(std::string_view text);
bool is_language_tag(std::string_view text);
bool is_absolute_iri(std::string_view text);

/// Lower-cases and replaces runs of non-alphanumerics with `_`:
/// "Courses Taught" -> "courses_taught".
std::string slugify(std::string_view text);

// ---------------------------------------------------------------------------
// Source (SREP) data
// ---------------------------------------------------------------------------

using Cell = std::optional<std::string>;
using Row = std::vector<Cell>;

struct SourceDataset {
    DatasetRef ref;
    std::vector<std::string> headers;
    std::vector<Row> rows;
    std::string provenance;
    Timestamp retrieved_at{};

    friend bool operator==(const SourceDataset&, const SourceDataset&) = default;
};

// ---------------------------------------------------------------------------
// Standardised
// ---------------------------------------------------------------------------

enum class Datatype { String, Integer, Decimal, Boolean, Date, Identifier };

std::string_view to_string(Datatype type) noexcept;
Datatype parse_datatype(std::string_view text);
/// xsd datatype local name, e.g. "integer"; identifier maps to "string".
std::string_view xsd_name(Datatype type) noexcept;
bool conforms(Datatype type, std::string_view lexical);

enum class Role { Plain, PrimaryKey, ForeignKey };

std::string_view to_string(Role role) noexcept;
Role parse_role(std::string_view text);

struct Column {
    std::string attribute;
    Datatype datatype = Datatype::String;
    Role role = Role::Plain;
    std::string target;  // referenced table, foreign keys only

    friend bool operator==(const Column&, const Column&) = default;
};

struct Table {
    std::string name;
    std::vector<Column> columns;
    std::vector<Row> rows;

    /// Index of the primary key column, if any.
    [[nodiscard]] std::optional<std::size_t> primary_key() const;
    [[nodiscard]] std::optional<std::size_t> column_index(std::string_view attribute) const;

    friend bool operator==(const Table&, const Table&) = default;
};

struct StandardisedDataset {
    DatasetRef ref;
    std::vector<Table> tables;

    [[nodiscard]] const Table* table(std::string_view name) const;

    friend bool operator==(const StandardisedDataset&, const StandardisedDataset&) = default;
};

/// Orders rows by primary key (or whole row when keyless) and tables by name.
StandardisedDataset canonicalize(StandardisedDataset dataset);
/// Total order on rows: null sorts before any value.
bool row_less(const Row& a, const Row& b);

// ---------------------------------------------------------------------------
// Language
// ---------------------------------------------------------------------------

struct Lexicalization {
    std::string lemma;
    std::string language_tag;
    std::string gloss;

    friend bool operator==(const Lexicalization&, const Lexicalization&) = default;
};

struct Concept {
    std::string concept_id;
    std::vector<Lexicalization> lexicalizations;

    friend bool operator==(const Concept&, const Concept&) = default;
};

struct LanguageDataset {
    DatasetRef ref;
    std::vector<Concept> concepts;

    [[nodiscard]] const Concept* find(std::string_view concept_id) const;

    friend bool operator==(const LanguageDataset&, const LanguageDataset&) = default;
};

/// Concepts by id, lexicalizations by language tag.
LanguageDataset canonicalize(LanguageDataset dataset);

// ---------------------------------------------------------------------------
// Knowledge
// ---------------------------------------------------------------------------

/// rdfs:label copy of a concept lexicalization.
struct Label {
    std::string language_tag;
    std::string lemma;

    friend bool operator==(const Label&, const Label&) = default;
    friend auto operator<=>(const Label&, const Label&) = default;
};

/// Properties remember the column they were built from (`position`, datatype,
/// key role) so a graph can be decomposed back into tables.
struct DataProperty {
    std::string prop_id;
    std::string concept_id;
    Datatype datatype = Datatype::String;
    std::size_t position = 0;
    bool primary_key = false;
    std::vector<Label> labels;

    friend bool operator==(const DataProperty&, const DataProperty&) = default;
};

struct ObjectProperty {
    std::string prop_id;
    std::string concept_id;
    std::string target;
    Datatype datatype = Datatype::Identifier;
    std::size_t position = 0;
    std::vector<Label> labels;

    friend bool operator==(const ObjectProperty&, const ObjectProperty&) = default;
};

struct EType {
    std::string etype_id;
    std::string concept_id;
    std::optional<std::string> parent;
    std::vector<DataProperty> data_properties;
    std::vector<ObjectProperty> object_properties;
    /// On a specialised EType: the data property whose value selects the child.
    std::optional<std::string> discriminator;
    /// On a functional child: the discriminator value it stands for.
    std::optional<std::string> discriminator_value;
    std::vector<Label> labels;

    friend bool operator==(const EType&, const EType&) = default;
};

struct KnowledgeDataset {
    DatasetRef ref;
    std::vector<DatasetRef> language_refs;
    std::vector<EType> etypes;

    [[nodiscard]] const EType* find(std::string_view etype_id) const;
    /// The EType itself followed by its ancestors via `parent`.
    [[nodiscard]] std::vector<const EType*> lineage(std::string_view etype_id) const;
    [[nodiscard]] const DataProperty* find_data_property(std::string_view prop_id) const;
    [[nodiscard]] const ObjectProperty* find_object_property(std::string_view prop_id) const;

    friend bool operator==(const KnowledgeDataset&, const KnowledgeDataset&) = default;
};

/// ETypes and properties by id, labels and language refs sorted.
KnowledgeDataset canonicalize(KnowledgeDataset dataset);

/// `<table>.<attribute>`; property ids are unique across the dataset.
std::string property_id(std::string_view table, std::string_view attribute);
std::string attribute_of(std::string_view prop_id);

// ---------------------------------------------------------------------------
// Graph
// ---------------------------------------------------------------------------

struct Literal {
    std::string prop_id;
    std::string lexical;
    Datatype datatype = Datatype::String;

    friend bool operator==(const Literal&, const Literal&) = default;
    friend auto operator<=>(const Literal&, const Literal&) = default;
};

struct Link {
    std::string prop_id;
    std::string target;

    friend bool operator==(const Link&, const Link&) = default;
    friend auto operator<=>(const Link&, const Link&) = default;
};

struct Entity {
    std::string iri;
    std::string etype;
    std::vector<Literal> literals;
    std::vector<Link> links;

    friend bool operator==(const Entity&, const Entity&) = default;
};

struct Composition {
    DatasetRef standardised;
    DatasetRef language;
    DatasetRef knowledge;

    friend bool operator==(const Composition&, const Composition&) = default;
};

struct GraphDataset {
    DatasetRef ref;
    Composition composed_of;
    std::vector<Entity> entities;

    friend bool operator==(const GraphDataset&, const GraphDataset&) = default;
};

/// Entities by IRI, literals and links sorted.
GraphDataset canonicalize(GraphDataset graph);

// ---------------------------------------------------------------------------
// Metadata
// ---------------------------------------------------------------------------

enum class DownloadPolicy { Automatic, Request };

std::string_view to_string(DownloadPolicy policy) noexcept;
DownloadPolicy parse_download_policy(std::string_view text);

struct MetadataLinks {
    std::vector<DatasetRef> composed_of;
    std::vector<DatasetRef> uses_language;
    std::vector<DatasetRef> derived_from;

    friend bool operator==(const MetadataLinks&, const MetadataLinks&) = default;
};

struct MetadataRecord {
    DatasetRef ref;
    MultilingualText title;
    MultilingualText description;
    std::set<std::string> categories;
    std::string license;
    Timestamp issued_at{};
    std::string publisher;
    DownloadPolicy download_policy = DownloadPolicy::Automatic;
    MetadataLinks links;
    std::string content_hash;

    friend bool operator==(const MetadataRecord&, const MetadataRecord&) = default;
};

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

/// One violated invariant. `rule` is a stable identifier, `detail` names the
/// offending element.
struct Violation {
    std::string rule;
    std::string detail;

    friend bool operator==(const Violation&, const Violation&) = default;
};

using ValidationReport = std::vector<Violation>;

std::string to_string(const ValidationReport& report);

/// Datasets referenced by cross-dataset invariants. Checks that need a missing
/// member are skipped.
struct ValidationContext {
    std::vector<const LanguageDataset*> languages;
    const KnowledgeDataset* knowledge = nullptr;
    const StandardisedDataset* standardised = nullptr;
};

ValidationReport validate(const NodeDescriptor& node);
ValidationReport validate(const DatasetRef& ref);
ValidationReport validate(const SourceDataset& source);
ValidationReport validate(const StandardisedDataset& dataset);
ValidationReport validate(const LanguageDataset& dataset);
ValidationReport validate(const KnowledgeDataset& dataset, const ValidationContext& context = {});
ValidationReport validate(const GraphDataset& dataset, const ValidationContext& context = {});
ValidationReport validate(const MetadataRecord& record);

/// Throws Error(Validation) naming the first violation when the report is not empty.
void require_valid(const ValidationReport& report, std::string_view what);

}  // namespace livedata
