#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "livedata/formats.hpp"
#include "livedata/model.hpp"

namespace livedata {

struct ColumnMapping {
    std::string header;     // raw header after cleaning
    std::string attribute;  // slug
    Datatype datatype = Datatype::String;
    Role role = Role::Plain;
    std::string target;  // foreign keys only

    friend bool operator==(const ColumnMapping&, const ColumnMapping&) = default;
};

struct TableMapping {
    std::string name;
    /// local_id of the SREP source feeding this table; may be empty when the
    /// transformation has a single source.
    std::string source;
    std::vector<ColumnMapping> columns;

    friend bool operator==(const TableMapping&, const TableMapping&) = default;
};

struct SpecializationTarget {
    std::string etype;
    std::string concept_id;

    friend bool operator==(const SpecializationTarget&, const SpecializationTarget&) = default;
};

struct SpecializationRule {
    std::string table;
    std::string discriminator;  // attribute slug
    std::map<std::string, SpecializationTarget> values;

    friend bool operator==(const SpecializationRule&, const SpecializationRule&) = default;
};

struct TransformConfig {
    /// Base local_id; outputs are `<dataset>-s`, `-l`, `-k` and `-g`.
    std::string dataset;
    std::uint32_t version = 1;
    std::string default_language_tag = "en";
    std::set<std::string> null_markers{"", "NA", "N/A", "-", "null"};
    std::vector<TableMapping> tables;
    std::map<std::string, std::vector<Lexicalization>> lexicon;
    std::vector<SpecializationRule> specializations;

    [[nodiscard]] DatasetRef output_ref(std::string_view node_id, ContentKind kind) const;
    [[nodiscard]] const SpecializationRule* specialization(std::string_view table) const;

    friend bool operator==(const TransformConfig&, const TransformConfig&) = default;
};

TransformConfig config_from_json(const Json& json);
Json to_json(const TransformConfig& config);
/// Structural checks that need no data: slugs, duplicate headers, lexicon
/// closure of specialization concepts. Throws Error(Validation).
void check_config(const TransformConfig& config);

/// Trims, collapses whitespace, maps null markers to null and drops empty
/// rows and columns. Idempotent.
SourceDataset clean(const SourceDataset& raw, const TransformConfig& config);

/// Canonical lexical form of `text` under `type`, or nullopt if it cannot be
/// coerced.
std::optional<std::string> coerce(Datatype type, std::string_view text);

/// One table per mapping. `cleaned` holds every source the mappings name.
StandardisedDataset standardise(const std::vector<SourceDataset>& cleaned, const TransformConfig& config);

LanguageDataset extract_language(const StandardisedDataset& standardised, const TransformConfig& config);

KnowledgeDataset build_knowledge(const StandardisedDataset& standardised, const LanguageDataset& language,
                                 const TransformConfig& config);

/// `<base_url>/resource/<S local_id>/<table>/<key>`.
std::string mint_iri(const NodeDescriptor& node, const DatasetRef& standardised, const Table& table,
                     const Row& row);

GraphDataset compose_graph(const StandardisedDataset& standardised, const LanguageDataset& language,
                           const KnowledgeDataset& knowledge, const NodeDescriptor& node,
                           const DatasetRef& graph_ref);

StandardisedDataset decompose_graph(const GraphDataset& graph, const LanguageDataset& language,
                                    const KnowledgeDataset& knowledge);

struct DescriptiveFields {
    MultilingualText title;
    MultilingualText description;
    std::set<std::string> categories;
    std::string license = "CC-BY-4.0";
};

MetadataRecord generate_metadata(const AnyDataset& dataset, const NodeDescriptor& node, DownloadPolicy policy,
                                 const DescriptiveFields& fields, std::vector<DatasetRef> derived_from,
                                 Timestamp issued_at);

struct PipelineOutput {
    StandardisedDataset standardised;
    LanguageDataset language;
    KnowledgeDataset knowledge;
    GraphDataset graph;
};

/// clean, standardise, extract_language, build_knowledge and compose_graph.
PipelineOutput run_pipeline(const std::vector<SourceDataset>& raw, const TransformConfig& config,
                            const NodeDescriptor& node);

}  // namespace livedata
