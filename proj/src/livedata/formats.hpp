#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"
#include "livedata/model.hpp"

namespace livedata {

using Json = nlohmann::ordered_json;

/// Annotation vocabulary tying ontology terms to concepts and table columns.
inline constexpr std::string_view kVocab = "https://w3id.org/livedata/vocab#";

// ---------------------------------------------------------------------------
// JSON mappings shared by the repository, catalogue and federation
// ---------------------------------------------------------------------------

Json to_json(const DatasetRef& ref);
DatasetRef ref_from_json(const Json& json);
Json to_json(const NodeDescriptor& node);
NodeDescriptor node_from_json(const Json& json);
Json to_json(const MetadataRecord& record);
MetadataRecord metadata_from_json(const Json& json);
Json to_json(const MultilingualText& text);
MultilingualText text_from_json(const Json& json);

/// Parses JSON text, mapping syntax errors to Error(Parse).
Json parse_json(std::string_view text, std::string_view what);

/// Inverse of DatasetRef::iri(); `kind` is supplied by the caller.
DatasetRef ref_from_iri(std::string_view iri, ContentKind kind);

// ---------------------------------------------------------------------------
// Source (raw delimited text)
// ---------------------------------------------------------------------------

SourceDataset parse_source(std::string_view bytes, const DatasetRef& ref, std::string provenance = {},
                           Timestamp retrieved_at = {});
std::string serialize_source(const SourceDataset& source);

// ---------------------------------------------------------------------------
// Standardised: one CSV per table plus a JSON schema descriptor
// ---------------------------------------------------------------------------

struct NamedFile {
    std::string name;
    std::string bytes;

    friend bool operator==(const NamedFile&, const NamedFile&) = default;
};

struct StandardisedFiles {
    NamedFile schema;
    std::vector<NamedFile> tables;  // sorted by table name
};

StandardisedFiles serialize_standardised_files(const StandardisedDataset& dataset);
StandardisedDataset parse_standardised(const std::vector<NamedFile>& tables, std::string_view schema);

/// Single-blob form used for hashing, storage and download: the schema
/// descriptor followed by every table file, each length-prefixed.
std::string serialize_standardised(const StandardisedDataset& dataset);
StandardisedDataset parse_standardised(std::string_view bundle);

std::string pack_bundle(const StandardisedFiles& files);
StandardisedFiles unpack_bundle(std::string_view bundle);

// ---------------------------------------------------------------------------
// Language: `concept_id,language_tag,lemma,gloss`
// ---------------------------------------------------------------------------

std::string serialize_language(const LanguageDataset& dataset);
LanguageDataset parse_language(std::string_view bytes, const DatasetRef& ref);

// ---------------------------------------------------------------------------
// Knowledge and graph: Turtle
// ---------------------------------------------------------------------------

std::string serialize_knowledge(const KnowledgeDataset& dataset);
KnowledgeDataset parse_knowledge(std::string_view bytes);

std::string serialize_graph(const GraphDataset& dataset);
GraphDataset parse_graph(std::string_view bytes, const KnowledgeDataset& knowledge);

/// Reads only the dataset description of a graph document (ref and
/// composition), without needing the ontology.
struct GraphHeader {
    DatasetRef ref;
    Composition composed_of;
};
GraphHeader read_graph_header(std::string_view bytes);

// ---------------------------------------------------------------------------
// Metadata
// ---------------------------------------------------------------------------

std::string serialize_metadata(const MetadataRecord& record);
MetadataRecord parse_metadata(std::string_view bytes);

// ---------------------------------------------------------------------------
// Any stratified dataset
// ---------------------------------------------------------------------------

using AnyDataset = std::variant<StandardisedDataset, LanguageDataset, KnowledgeDataset, GraphDataset>;

const DatasetRef& ref_of(const AnyDataset& dataset);
std::string serialize(const AnyDataset& dataset);

/// SHA-256 of the canonical serialization. Validates first.
std::string canonical_hash(const AnyDataset& dataset);

/// `<local_id>.v<version>.<extension>` for the dataset's storage form.
std::string file_name(const DatasetRef& ref);
std::string_view media_type(ContentKind kind) noexcept;

}  // namespace livedata
