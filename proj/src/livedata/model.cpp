#include "livedata/model.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <functional>
#include <unordered_map>
#include <unordered_set>

#include "livedata/error.hpp"

namespace livedata {

namespace {

bool is_lower_alnum(char c) { return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9'); }
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }

bool all_digits(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), is_digit);
}

}  // namespace

// ---------------------------------------------------------------------------
// Enumerations
// ---------------------------------------------------------------------------

std::string_view to_string(ContentKind kind) noexcept {
    switch (kind) {
        case ContentKind::Standardised: return "standardised";
        case ContentKind::Language: return "language";
        case ContentKind::Knowledge: return "knowledge";
        case ContentKind::Graph: return "graph";
        case ContentKind::LowQuality: return "low_quality";
        case ContentKind::ExternalLanguage: return "external_language";
        case ContentKind::ExternalReference: return "external_reference";
    }
    return "standardised";
}

ContentKind parse_content_kind(std::string_view text) {
    for (auto kind : {ContentKind::Standardised, ContentKind::Language, ContentKind::Knowledge,
                      ContentKind::Graph, ContentKind::LowQuality, ContentKind::ExternalLanguage,
                      ContentKind::ExternalReference}) {
        if (to_string(kind) == text) return kind;
    }
    throw Error(ErrorCode::InvalidArgument, "unknown content kind '" + std::string(text) + "'");
}

bool is_stratified(ContentKind kind) noexcept {
    return kind == ContentKind::Standardised || kind == ContentKind::Language ||
           kind == ContentKind::Knowledge || kind == ContentKind::Graph;
}

bool is_source(ContentKind kind) noexcept { return !is_stratified(kind); }

std::string_view to_string(Datatype type) noexcept {
    switch (type) {
        case Datatype::String: return "string";
        case Datatype::Integer: return "integer";
        case Datatype::Decimal: return "decimal";
        case Datatype::Boolean: return "boolean";
        case Datatype::Date: return "date";
        case Datatype::Identifier: return "identifier";
    }
    return "string";
}

Datatype parse_datatype(std::string_view text) {
    for (auto type : {Datatype::String, Datatype::Integer, Datatype::Decimal, Datatype::Boolean,
                      Datatype::Date, Datatype::Identifier}) {
        if (to_string(type) == text) return type;
    }
    throw Error(ErrorCode::InvalidArgument, "unknown datatype '" + std::string(text) + "'");
}

std::string_view xsd_name(Datatype type) noexcept {
    switch (type) {
        case Datatype::Integer: return "integer";
        case Datatype::Decimal: return "decimal";
        case Datatype::Boolean: return "boolean";
        case Datatype::Date: return "date";
        case Datatype::String:
        case Datatype::Identifier: return "string";
    }
    return "string";
}

bool conforms(Datatype type, std::string_view v) {
    switch (type) {
        case Datatype::String: return true;
        case Datatype::Identifier:
            return !v.empty() && std::none_of(v.begin(), v.end(), [](unsigned char c) {
                return c <= 0x20 || c == 0x7f;
            });
        case Datatype::Boolean: return v == "true" || v == "false";
        // Numbers must be in the canonical form coerce() produces: no sign on
        // zero, no leading zeros, decimals always carry a fraction without
        // trailing zeros.
        case Datatype::Integer: {
            const bool negative = !v.empty() && v[0] == '-';
            if (negative) v.remove_prefix(1);
            if (!all_digits(v)) return false;
            return v == "0" ? !negative : v[0] != '0';
        }
        case Datatype::Decimal: {
            const bool negative = !v.empty() && v[0] == '-';
            if (negative) v.remove_prefix(1);
            const auto dot = v.find('.');
            if (dot == std::string_view::npos) return false;
            const auto whole = v.substr(0, dot);
            const auto fraction = v.substr(dot + 1);
            if (!all_digits(whole) || !all_digits(fraction)) return false;
            if (whole.size() > 1 && whole[0] == '0') return false;
            if (fraction.size() > 1 && fraction.back() == '0') return false;
            return !(negative && whole == "0" && fraction == "0");
        }
        case Datatype::Date: {
            if (v.size() != 10 || v[4] != '-' || v[7] != '-') return false;
            if (!all_digits(v.substr(0, 4)) || !all_digits(v.substr(5, 2)) ||
                !all_digits(v.substr(8, 2))) {
                return false;
            }
            const int y = std::stoi(std::string(v.substr(0, 4)));
            const unsigned m = static_cast<unsigned>(std::stoi(std::string(v.substr(5, 2))));
            const unsigned d = static_cast<unsigned>(std::stoi(std::string(v.substr(8, 2))));
            return std::chrono::year_month_day{std::chrono::year{y}, std::chrono::month{m},
                                               std::chrono::day{d}}
                .ok();
        }
    }
    return false;
}

std::string_view to_string(Role role) noexcept {
    switch (role) {
        case Role::Plain: return "plain";
        case Role::PrimaryKey: return "primary_key";
        case Role::ForeignKey: return "foreign_key";
    }
    return "plain";
}

Role parse_role(std::string_view text) {
    for (auto role : {Role::Plain, Role::PrimaryKey, Role::ForeignKey}) {
        if (to_string(role) == text) return role;
    }
    throw Error(ErrorCode::InvalidArgument, "unknown column role '" + std::string(text) + "'");
}

std::string_view to_string(DownloadPolicy policy) noexcept {
    return policy == DownloadPolicy::Automatic ? "automatic" : "request";
}

DownloadPolicy parse_download_policy(std::string_view text) {
    if (text == "automatic") return DownloadPolicy::Automatic;
    if (text == "request") return DownloadPolicy::Request;
    throw Error(ErrorCode::InvalidArgument, "unknown download policy '" + std::string(text) + "'");
}

// ---------------------------------------------------------------------------
// Identity
// ---------------------------------------------------------------------------

std::string DatasetRef::path() const {
    return node_id + "/" + local_id + "/" + std::to_string(version);
}

std::string DatasetRef::iri() const {
    return "urn:livedata:" + node_id + ":" + local_id + ":v" + std::to_string(version);
}

bool DatasetRef::same_identity(const DatasetRef& other) const noexcept {
    return node_id == other.node_id && local_id == other.local_id && version == other.version;
}

std::string to_string(const DatasetRef& ref) {
    return ref.path() + " (" + std::string(to_string(ref.kind)) + ")";
}

bool is_node_id(std::string_view s) {
    if (s.size() < 2 || s.size() > 32) return false;
    if (!(s[0] >= 'a' && s[0] <= 'z')) return false;
    return std::all_of(s.begin() + 1, s.end(), [](char c) { return is_lower_alnum(c) || c == '-'; });
}

bool is_local_id(std::string_view s) {
    if (s.empty() || s.size() > 64 || !is_lower_alnum(s[0])) return false;
    return std::all_of(s.begin() + 1, s.end(),
                       [](char c) { return is_lower_alnum(c) || c == '_' || c == '-'; });
}

bool is_slug(std::string_view s) { return is_local_id(s); }

bool is_language_tag(std::string_view s) {
    const auto parts = split(s, '-');
    if (parts[0].size() < 2 || parts[0].size() > 8 ||
        !std::all_of(parts[0].begin(), parts[0].end(), is_alpha)) {
        return false;
    }
    for (std::size_t i = 1; i < parts.size(); ++i) {
        if (parts[i].empty() || parts[i].size() > 8 ||
            !std::all_of(parts[i].begin(), parts[i].end(),
                         [](char c) { return is_alpha(c) || is_digit(c); })) {
            return false;
        }
    }
    return true;
}

bool is_absolute_iri(std::string_view s) {
    const auto colon = s.find(':');
    if (colon == std::string_view::npos || colon == 0 || colon + 1 == s.size()) return false;
    if (!is_alpha(s[0])) return false;
    for (std::size_t i = 1; i < colon; ++i) {
        const char c = s[i];
        if (!(is_alpha(c) || is_digit(c) || c == '+' || c == '-' || c == '.')) return false;
    }
    return std::none_of(s.begin(), s.end(), [](unsigned char c) {
        return c <= 0x20 || c == 0x7f || c == '<' || c == '>' || c == '"' || c == '{' ||
               c == '}' || c == '|' || c == '^' || c == '`' || c == '\\';
    });
}

std::string slugify(std::string_view text) {
    std::string out;
    bool pending_sep = false;
    for (unsigned char c : text) {
        if (std::isalnum(c) && c < 0x80) {
            if (pending_sep && !out.empty()) out.push_back('_');
            pending_sep = false;
            out.push_back(static_cast<char>(std::tolower(c)));
        } else {
            pending_sep = true;
        }
    }
    if (out.size() > 64) out.resize(64);
    return out;
}

// ---------------------------------------------------------------------------
// Accessors and canonical order
// ---------------------------------------------------------------------------

std::optional<std::size_t> Table::primary_key() const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (columns[i].role == Role::PrimaryKey) return i;
    }
    return std::nullopt;
}

std::optional<std::size_t> Table::column_index(std::string_view attribute) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (columns[i].attribute == attribute) return i;
    }
    return std::nullopt;
}

const Table* StandardisedDataset::table(std::string_view name) const {
    for (const auto& t : tables) {
        if (t.name == name) return &t;
    }
    return nullptr;
}

bool row_less(const Row& a, const Row& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

StandardisedDataset canonicalize(StandardisedDataset dataset) {
    for (auto& table : dataset.tables) {
        if (const auto pk = table.primary_key()) {
            std::stable_sort(table.rows.begin(), table.rows.end(),
                             [k = *pk](const Row& a, const Row& b) { return a[k] < b[k]; });
        } else {
            std::stable_sort(table.rows.begin(), table.rows.end(), row_less);
        }
    }
    std::stable_sort(dataset.tables.begin(), dataset.tables.end(),
                     [](const Table& a, const Table& b) { return a.name < b.name; });
    return dataset;
}

const Concept* LanguageDataset::find(std::string_view concept_id) const {
    for (const auto& c : concepts) {
        if (c.concept_id == concept_id) return &c;
    }
    return nullptr;
}

LanguageDataset canonicalize(LanguageDataset dataset) {
    for (auto& c : dataset.concepts) {
        std::stable_sort(c.lexicalizations.begin(), c.lexicalizations.end(),
                         [](const auto& a, const auto& b) { return a.language_tag < b.language_tag; });
    }
    std::stable_sort(dataset.concepts.begin(), dataset.concepts.end(),
                     [](const auto& a, const auto& b) { return a.concept_id < b.concept_id; });
    return dataset;
}

const EType* KnowledgeDataset::find(std::string_view etype_id) const {
    for (const auto& e : etypes) {
        if (e.etype_id == etype_id) return &e;
    }
    return nullptr;
}

std::vector<const EType*> KnowledgeDataset::lineage(std::string_view etype_id) const {
    std::vector<const EType*> out;
    const EType* current = find(etype_id);
    while (current != nullptr && out.size() <= etypes.size()) {
        out.push_back(current);
        current = current->parent ? find(*current->parent) : nullptr;
    }
    return out;
}

const DataProperty* KnowledgeDataset::find_data_property(std::string_view prop_id) const {
    for (const auto& e : etypes) {
        for (const auto& p : e.data_properties) {
            if (p.prop_id == prop_id) return &p;
        }
    }
    return nullptr;
}

const ObjectProperty* KnowledgeDataset::find_object_property(std::string_view prop_id) const {
    for (const auto& e : etypes) {
        for (const auto& p : e.object_properties) {
            if (p.prop_id == prop_id) return &p;
        }
    }
    return nullptr;
}

KnowledgeDataset canonicalize(KnowledgeDataset dataset) {
    auto by_id = [](const auto& a, const auto& b) { return a.prop_id < b.prop_id; };
    for (auto& e : dataset.etypes) {
        std::sort(e.labels.begin(), e.labels.end());
        std::stable_sort(e.data_properties.begin(), e.data_properties.end(), by_id);
        std::stable_sort(e.object_properties.begin(), e.object_properties.end(), by_id);
        for (auto& p : e.data_properties) std::sort(p.labels.begin(), p.labels.end());
        for (auto& p : e.object_properties) std::sort(p.labels.begin(), p.labels.end());
    }
    std::stable_sort(dataset.etypes.begin(), dataset.etypes.end(),
                     [](const auto& a, const auto& b) { return a.etype_id < b.etype_id; });
    std::sort(dataset.language_refs.begin(), dataset.language_refs.end());
    return dataset;
}

std::string property_id(std::string_view table, std::string_view attribute) {
    return std::string(table) + "." + std::string(attribute);
}

std::string attribute_of(std::string_view prop_id) {
    const auto dot = prop_id.rfind('.');
    return std::string(dot == std::string_view::npos ? prop_id : prop_id.substr(dot + 1));
}

GraphDataset canonicalize(GraphDataset graph) {
    for (auto& e : graph.entities) {
        std::sort(e.literals.begin(), e.literals.end());
        std::sort(e.links.begin(), e.links.end());
    }
    std::stable_sort(graph.entities.begin(), graph.entities.end(),
                     [](const Entity& a, const Entity& b) { return a.iri < b.iri; });
    return graph;
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

std::string to_string(const ValidationReport& report) {
    std::string out;
    for (const auto& v : report) {
        if (!out.empty()) out += "; ";
        out += v.rule + ": " + v.detail;
    }
    return out;
}

void require_valid(const ValidationReport& report, std::string_view what) {
    if (!report.empty()) {
        throw Error(ErrorCode::Validation, std::string(what) + " is invalid: " + to_string(report));
    }
}

namespace {

void check_ref(ValidationReport& out, const DatasetRef& ref, std::string_view where) {
    if (!is_node_id(ref.node_id)) {
        out.push_back({"ref.node_id", std::string(where) + ": '" + ref.node_id + "'"});
    }
    if (!is_local_id(ref.local_id)) {
        out.push_back({"ref.local_id", std::string(where) + ": '" + ref.local_id + "'"});
    }
    if (ref.version == 0) out.push_back({"ref.version", std::string(where) + ": version must be positive"});
}

void check_kind(ValidationReport& out, const DatasetRef& ref, ContentKind expected) {
    check_ref(out, ref, "ref");
    if (ref.kind != expected) {
        out.push_back({"ref.kind", "expected " + std::string(to_string(expected)) + ", got " +
                                       std::string(to_string(ref.kind))});
    }
}

void check_labels(ValidationReport& out, const std::vector<Label>& labels, std::string_view owner,
                  std::string_view concept_id, const ValidationContext& context) {
    std::set<std::string> tags;
    for (const auto& label : labels) {
        if (!tags.insert(label.language_tag).second) {
            out.push_back({"knowledge.label_duplicate",
                           std::string(owner) + " has two labels for '" + label.language_tag + "'"});
        }
        if (!is_language_tag(label.language_tag) || label.lemma.empty()) {
            out.push_back({"knowledge.label_malformed", std::string(owner)});
        }
        if (context.languages.empty()) continue;
        bool matched = false;
        for (const auto* language : context.languages) {
            if (const auto* c = language->find(concept_id)) {
                for (const auto& lex : c->lexicalizations) {
                    matched = matched || (lex.language_tag == label.language_tag &&
                                          lex.lemma == label.lemma);
                }
            }
        }
        if (!matched) {
            out.push_back({"knowledge.label_unbacked",
                           std::string(owner) + " label '" + label.lemma + "'@" + label.language_tag +
                               " is not a lexicalization of concept '" + std::string(concept_id) + "'"});
        }
    }
}

}  // namespace

ValidationReport validate(const NodeDescriptor& node) {
    ValidationReport out;
    if (!is_node_id(node.node_id)) out.push_back({"node.node_id", "'" + node.node_id + "'"});
    if (node.name.empty()) out.push_back({"node.name", "name is empty"});
    if (!(starts_with(node.base_url, "http://") || starts_with(node.base_url, "https://")) ||
        !is_absolute_iri(node.base_url)) {
        out.push_back({"node.base_url", "'" + node.base_url + "' is not an absolute http(s) URL"});
    } else if (node.base_url.back() == '/') {
        out.push_back({"node.base_url", "'" + node.base_url + "' ends with '/'"});
    }
    for (const auto& [tag, text] : node.domain_description) {
        if (!is_language_tag(tag)) out.push_back({"node.domain_description", "bad language tag '" + tag + "'"});
    }
    return out;
}

ValidationReport validate(const DatasetRef& ref) {
    ValidationReport out;
    check_ref(out, ref, "ref");
    return out;
}

ValidationReport validate(const SourceDataset& source) {
    ValidationReport out;
    check_ref(out, source.ref, "ref");
    if (!is_source(source.ref.kind)) {
        out.push_back({"ref.kind", "source datasets carry SREP kinds"});
    }
    for (std::size_t r = 0; r < source.rows.size(); ++r) {
        if (source.rows[r].size() != source.headers.size()) {
            out.push_back({"source.row_width", "row " + std::to_string(r + 1) + " has " +
                                                   std::to_string(source.rows[r].size()) +
                                                   " cells, header has " +
                                                   std::to_string(source.headers.size())});
        }
    }
    return out;
}

ValidationReport validate(const StandardisedDataset& dataset) {
    ValidationReport out;
    check_kind(out, dataset.ref, ContentKind::Standardised);
    std::set<std::string> table_names;
    for (const auto& table : dataset.tables) {
        if (!is_slug(table.name)) out.push_back({"standardised.table_name", "'" + table.name + "'"});
        if (!table_names.insert(table.name).second) {
            out.push_back({"standardised.table_duplicate", "'" + table.name + "'"});
        }
        std::set<std::string> attributes;
        std::size_t keys = 0;
        for (const auto& col : table.columns) {
            const std::string where = table.name + "." + col.attribute;
            if (!is_slug(col.attribute)) out.push_back({"standardised.attribute_name", "'" + where + "'"});
            if (!attributes.insert(col.attribute).second) {
                out.push_back({"standardised.attribute_duplicate", where});
            }
            if (col.role == Role::PrimaryKey) ++keys;
            if (col.role == Role::ForeignKey) {
                const Table* target = dataset.table(col.target);
                if (target == nullptr || !target->primary_key()) {
                    out.push_back({"standardised.foreign_key_target",
                                   where + " targets '" + col.target + "' which has no primary key"});
                }
            } else if (!col.target.empty()) {
                out.push_back({"standardised.target_without_foreign_key", where});
            }
        }
        if (keys > 1) out.push_back({"standardised.primary_key_count", table.name});

        std::set<std::string> seen_keys;
        std::set<Row> seen_rows;
        const auto pk = table.primary_key();
        for (std::size_t r = 0; r < table.rows.size(); ++r) {
            const Row& row = table.rows[r];
            const std::string at = table.name + " row " + std::to_string(r + 1);
            if (row.size() != table.columns.size()) {
                out.push_back({"standardised.row_width", at});
                continue;
            }
            for (std::size_t c = 0; c < row.size(); ++c) {
                if (row[c] && !conforms(table.columns[c].datatype, *row[c])) {
                    out.push_back({"standardised.datatype",
                                   at + " column " + table.columns[c].attribute + ": '" + *row[c] +
                                       "' is not a valid " +
                                       std::string(to_string(table.columns[c].datatype))});
                }
            }
            if (pk) {
                if (!row[*pk]) {
                    out.push_back({"standardised.primary_key_null", at});
                } else if (!seen_keys.insert(*row[*pk]).second) {
                    out.push_back({"standardised.primary_key_duplicate", at + ": '" + *row[*pk] + "'"});
                }
            } else if (!seen_rows.insert(row).second) {
                out.push_back({"standardised.row_duplicate", at});
            }
        }
    }
    // Foreign key values must resolve.
    for (const auto& table : dataset.tables) {
        for (std::size_t c = 0; c < table.columns.size(); ++c) {
            const auto& col = table.columns[c];
            if (col.role != Role::ForeignKey) continue;
            const Table* target = dataset.table(col.target);
            if (target == nullptr || !target->primary_key()) continue;
            const auto tk = *target->primary_key();
            std::unordered_set<std::string> keys;
            for (const auto& row : target->rows) {
                if (row.size() > tk && row[tk]) keys.insert(*row[tk]);
            }
            for (std::size_t r = 0; r < table.rows.size(); ++r) {
                const auto& row = table.rows[r];
                if (row.size() > c && row[c] && !keys.count(*row[c])) {
                    out.push_back({"standardised.foreign_key_dangling",
                                   table.name + " row " + std::to_string(r + 1) + " " + col.attribute +
                                       "='" + *row[c] + "' not in " + col.target});
                }
            }
        }
    }
    return out;
}

ValidationReport validate(const LanguageDataset& dataset) {
    ValidationReport out;
    check_kind(out, dataset.ref, ContentKind::Language);
    std::set<std::string> ids;
    for (const auto& c : dataset.concepts) {
        if (!is_slug(c.concept_id)) out.push_back({"language.concept_id", "'" + c.concept_id + "'"});
        if (!ids.insert(c.concept_id).second) {
            out.push_back({"language.concept_duplicate", "'" + c.concept_id + "'"});
        }
        if (c.lexicalizations.empty()) {
            out.push_back({"language.no_lexicalization", "'" + c.concept_id + "'"});
        }
        std::set<std::string> tags;
        for (const auto& lex : c.lexicalizations) {
            const std::string at = c.concept_id + "@" + lex.language_tag;
            if (!is_language_tag(lex.language_tag)) out.push_back({"language.language_tag", at});
            if (!tags.insert(lex.language_tag).second) out.push_back({"language.tag_not_functional", at});
            if (lex.lemma.empty()) out.push_back({"language.lemma_empty", at});
            if (lex.gloss.empty()) out.push_back({"language.gloss_empty", at});
        }
    }
    return out;
}

ValidationReport validate(const KnowledgeDataset& dataset, const ValidationContext& context) {
    ValidationReport out;
    check_kind(out, dataset.ref, ContentKind::Knowledge);
    for (const auto& ref : dataset.language_refs) {
        check_ref(out, ref, "language_refs");
        if (ref.kind != ContentKind::Language) {
            out.push_back({"knowledge.language_ref_kind", ref.path()});
        }
    }

    // Only context datasets named by language_refs take part in resolution.
    ValidationContext named;
    for (const auto* language : context.languages) {
        const bool listed = std::any_of(dataset.language_refs.begin(), dataset.language_refs.end(),
                                        [&](const DatasetRef& r) { return r.same_identity(language->ref); });
        if (listed) named.languages.push_back(language);
    }
    if (!context.languages.empty() && named.languages.empty()) {
        out.push_back({"knowledge.language_context_unreferenced",
                       "none of the supplied language datasets is listed in language_refs"});
    }
    auto resolve = [&](const std::string& concept_id, const std::string& owner) {
        if (named.languages.empty()) return;
        const bool found = std::any_of(named.languages.begin(), named.languages.end(),
                                       [&](const LanguageDataset* l) { return l->find(concept_id) != nullptr; });
        if (!found) {
            out.push_back({"knowledge.concept_unresolved",
                           owner + " uses concept '" + concept_id + "' absent from its language datasets"});
        }
    };

    std::set<std::string> etype_ids;
    std::set<std::string> prop_ids;
    for (const auto& e : dataset.etypes) {
        if (!is_slug(e.etype_id)) out.push_back({"knowledge.etype_id", "'" + e.etype_id + "'"});
        if (!etype_ids.insert(e.etype_id).second) {
            out.push_back({"knowledge.etype_duplicate", "'" + e.etype_id + "'"});
        }
    }
    for (const auto& e : dataset.etypes) {
        resolve(e.concept_id, "etype " + e.etype_id);
        check_labels(out, e.labels, "etype " + e.etype_id, e.concept_id, named);
        if (e.parent && !dataset.find(*e.parent)) {
            out.push_back({"knowledge.parent_missing", e.etype_id + " -> " + *e.parent});
        }
        if (e.discriminator_value && !e.parent) {
            out.push_back({"knowledge.discriminator_value_without_parent", e.etype_id});
        }
        std::set<std::size_t> positions;
        for (const auto& p : e.data_properties) {
            if (!prop_ids.insert(p.prop_id).second) {
                out.push_back({"knowledge.property_duplicate", "'" + p.prop_id + "'"});
            }
            if (!positions.insert(p.position).second) {
                out.push_back({"knowledge.position_duplicate", p.prop_id});
            }
            resolve(p.concept_id, "property " + p.prop_id);
            check_labels(out, p.labels, "property " + p.prop_id, p.concept_id, named);
        }
        for (const auto& p : e.object_properties) {
            if (!prop_ids.insert(p.prop_id).second) {
                out.push_back({"knowledge.property_duplicate", "'" + p.prop_id + "'"});
            }
            if (!positions.insert(p.position).second) {
                out.push_back({"knowledge.position_duplicate", p.prop_id});
            }
            if (!dataset.find(p.target)) {
                out.push_back({"knowledge.object_target_missing", p.prop_id + " -> " + p.target});
            }
            resolve(p.concept_id, "property " + p.prop_id);
            check_labels(out, p.labels, "property " + p.prop_id, p.concept_id, named);
        }
        if (e.discriminator) {
            const bool own = std::any_of(e.data_properties.begin(), e.data_properties.end(),
                                         [&](const DataProperty& p) { return p.prop_id == *e.discriminator; });
            if (!own) out.push_back({"knowledge.discriminator_missing", e.etype_id + ": " + *e.discriminator});
        }
    }
    // Acyclic parent relation.
    for (const auto& e : dataset.etypes) {
        std::set<std::string> visited{e.etype_id};
        const EType* current = &e;
        while (current->parent) {
            const EType* next = dataset.find(*current->parent);
            if (next == nullptr) break;
            if (!visited.insert(next->etype_id).second) {
                out.push_back({"knowledge.parent_cycle", "cycle through '" + e.etype_id + "'"});
                break;
            }
            current = next;
        }
    }
    return out;
}

ValidationReport validate(const GraphDataset& dataset, const ValidationContext& context) {
    ValidationReport out;
    check_kind(out, dataset.ref, ContentKind::Graph);
    const auto& comp = dataset.composed_of;
    check_ref(out, comp.standardised, "composed_of.standardised");
    check_ref(out, comp.language, "composed_of.language");
    check_ref(out, comp.knowledge, "composed_of.knowledge");
    if (comp.standardised.kind != ContentKind::Standardised || comp.language.kind != ContentKind::Language ||
        comp.knowledge.kind != ContentKind::Knowledge) {
        out.push_back({"graph.composed_of_kinds", "composed_of must name one S, one L and one K"});
    }

    std::unordered_map<std::string, const Entity*> by_iri;
    for (const auto& entity : dataset.entities) {
        if (!is_absolute_iri(entity.iri)) out.push_back({"graph.iri_malformed", "'" + entity.iri + "'"});
        if (!by_iri.emplace(entity.iri, &entity).second) {
            out.push_back({"graph.iri_duplicate", "'" + entity.iri + "'"});
        }
    }
    const KnowledgeDataset* k = context.knowledge;
    if (k != nullptr && !k->ref.same_identity(comp.knowledge)) {
        out.push_back({"graph.knowledge_context_mismatch",
                       "context knowledge " + k->ref.path() + " is not " + comp.knowledge.path()});
        k = nullptr;
    }
    for (const auto& entity : dataset.entities) {
        for (const auto& link : entity.links) {
            if (!by_iri.count(link.target)) {
                out.push_back({"graph.link_dangling", entity.iri + " " + link.prop_id + " -> " + link.target});
            }
        }
        if (k == nullptr) continue;
        const auto lineage = k->lineage(entity.etype);
        if (lineage.empty()) {
            out.push_back({"graph.etype_unknown", entity.iri + " typed '" + entity.etype + "'"});
            continue;
        }
        auto data_prop = [&](const std::string& id) -> const DataProperty* {
            for (const auto* e : lineage) {
                for (const auto& p : e->data_properties) {
                    if (p.prop_id == id) return &p;
                }
            }
            return nullptr;
        };
        auto object_prop = [&](const std::string& id) -> const ObjectProperty* {
            for (const auto* e : lineage) {
                for (const auto& p : e->object_properties) {
                    if (p.prop_id == id) return &p;
                }
            }
            return nullptr;
        };
        for (const auto& lit : entity.literals) {
            const DataProperty* p = data_prop(lit.prop_id);
            if (p == nullptr) {
                out.push_back({"graph.property_undeclared", entity.iri + " uses '" + lit.prop_id + "'"});
                continue;
            }
            if (p->datatype != lit.datatype || !conforms(lit.datatype, lit.lexical)) {
                out.push_back({"graph.literal_datatype", entity.iri + " " + lit.prop_id + " '" + lit.lexical + "'"});
            }
        }
        for (const auto& link : entity.links) {
            const ObjectProperty* p = object_prop(link.prop_id);
            if (p == nullptr) {
                out.push_back({"graph.property_undeclared", entity.iri + " uses '" + link.prop_id + "'"});
                continue;
            }
            const auto it = by_iri.find(link.target);
            if (it == by_iri.end()) continue;
            const auto target_lineage = k->lineage(it->second->etype);
            const bool typed = std::any_of(target_lineage.begin(), target_lineage.end(),
                                           [&](const EType* e) { return e->etype_id == p->target; });
            if (!typed) {
                out.push_back({"graph.link_range", entity.iri + " " + link.prop_id + " -> " + link.target +
                                                       " is not a " + p->target});
            }
        }
    }
    return out;
}

ValidationReport validate(const MetadataRecord& record) {
    ValidationReport out;
    check_ref(out, record.ref, "ref");
    if (!is_stratified(record.ref.kind)) {
        out.push_back({"metadata.kind", "metadata describes stratified datasets only"});
    }
    if (record.title.empty()) out.push_back({"metadata.title", "title needs at least one language"});
    if (record.description.empty()) {
        out.push_back({"metadata.description", "description needs at least one language"});
    }
    for (const auto* text : {&record.title, &record.description}) {
        for (const auto& [tag, value] : *text) {
            if (!is_language_tag(tag)) out.push_back({"metadata.language_tag", "'" + tag + "'"});
        }
    }
    for (const auto& category : record.categories) {
        if (!is_slug(category)) out.push_back({"metadata.category", "'" + category + "'"});
    }
    if (record.license.empty()) out.push_back({"metadata.license", "license is empty"});
    if (record.content_hash.size() != 64 ||
        !std::all_of(record.content_hash.begin(), record.content_hash.end(),
                     [](char c) { return is_digit(c) || (c >= 'a' && c <= 'f'); })) {
        out.push_back({"metadata.content_hash", "'" + record.content_hash + "' is not a hex SHA-256"});
    }

    const auto& links = record.links;
    for (const auto* list : {&links.composed_of, &links.uses_language, &links.derived_from}) {
        for (const auto& ref : *list) check_ref(out, ref, "links");
    }
    for (const auto& ref : links.derived_from) {
        if (!is_source(ref.kind)) out.push_back({"metadata.derived_from_kind", ref.path()});
    }
    switch (record.ref.kind) {
        case ContentKind::Graph: {
            std::multiset<ContentKind> kinds;
            for (const auto& ref : links.composed_of) kinds.insert(ref.kind);
            const std::multiset<ContentKind> expected{ContentKind::Standardised, ContentKind::Language,
                                                      ContentKind::Knowledge};
            if (kinds != expected) {
                out.push_back({"metadata.composed_of", "graph records need exactly one S, L and K ref, got " +
                                                           std::to_string(links.composed_of.size())});
            }
            if (!links.uses_language.empty()) {
                out.push_back({"metadata.uses_language", "only knowledge records carry uses_language"});
            }
            break;
        }
        case ContentKind::Knowledge:
            if (links.uses_language.empty()) {
                out.push_back({"metadata.uses_language", "knowledge records need at least one language ref"});
            }
            for (const auto& ref : links.uses_language) {
                if (ref.kind != ContentKind::Language) {
                    out.push_back({"metadata.uses_language", ref.path() + " is not a language dataset"});
                }
            }
            if (!links.composed_of.empty()) {
                out.push_back({"metadata.composed_of", "only graph records carry composed_of"});
            }
            break;
        default:
            if (!links.composed_of.empty()) {
                out.push_back({"metadata.composed_of", "only graph records carry composed_of"});
            }
            if (!links.uses_language.empty()) {
                out.push_back({"metadata.uses_language", "only knowledge records carry uses_language"});
            }
            break;
    }
    return out;
}

}  // namespace livedata
