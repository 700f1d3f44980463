#include "livedata/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <unordered_map>

#include "livedata/csv.hpp"
#include "livedata/error.hpp"

namespace livedata {

namespace {

[[noreturn]] void config_fail(const std::string& message) {
    throw Error(ErrorCode::Validation, "transform config: " + message);
}

std::string join(const std::vector<std::string>& items, std::string_view sep = ", ") {
    std::string out;
    for (const auto& item : items) {
        if (!out.empty()) out += sep;
        out += item;
    }
    return out;
}

bool is_blank(unsigned char c) { return c <= 0x20 || c == 0x7f; }

std::string normalize_space(std::string_view text) {
    std::string out;
    bool pending = false;
    for (unsigned char c : text) {
        if (is_blank(c)) {
            pending = !out.empty();
            continue;
        }
        if (pending) out.push_back(' ');
        pending = false;
        out.push_back(static_cast<char>(c));
    }
    return out;
}

std::string lemma_of(std::string_view slug) {
    std::string out(slug);
    std::replace(out.begin(), out.end(), '_', ' ');
    return out;
}

bool digits_only(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

std::string strip_leading_zeros(std::string_view digits) {
    const auto first = digits.find_first_not_of('0');
    return first == std::string_view::npos ? "0" : std::string(digits.substr(first));
}

std::optional<std::string> coerce_date(std::string_view v) {
    int y = 0, m = 0, d = 0;
    char tail = 0;
    auto scan = [&](const char* format, int* a, int* b, int* c) {
        const std::string s(v);
        return v.size() == 10 && std::sscanf(s.c_str(), format, a, b, c, &tail) == 3;
    };
    if (v.size() != 10) return std::nullopt;
    if (v[4] == '-' && v[7] == '-') {
        if (!scan("%4d-%2d-%2d%c", &y, &m, &d)) return std::nullopt;
    } else if (v[4] == '/' && v[7] == '/') {
        if (!scan("%4d/%2d/%2d%c", &y, &m, &d)) return std::nullopt;
    } else if (v[2] == '/' && v[5] == '/') {
        if (!scan("%2d/%2d/%4d%c", &d, &m, &y)) return std::nullopt;
    } else {
        return std::nullopt;
    }
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] != '-' && v[i] != '/' && (v[i] < '0' || v[i] > '9')) return std::nullopt;
    }
    char buffer[16];
    std::snprintf(buffer, sizeof buffer, "%04d-%02d-%02d", y, m, d);
    if (!conforms(Datatype::Date, buffer)) return std::nullopt;
    return std::string(buffer);
}

}  // namespace

// ---------------------------------------------------------------------------
// Config
// ---------------------------------------------------------------------------

DatasetRef TransformConfig::output_ref(std::string_view node_id, ContentKind kind) const {
    static const std::map<ContentKind, std::string> suffix{{ContentKind::Standardised, "-s"},
                                                           {ContentKind::Language, "-l"},
                                                           {ContentKind::Knowledge, "-k"},
                                                           {ContentKind::Graph, "-g"}};
    return DatasetRef{std::string(node_id), dataset + suffix.at(kind), version, kind};
}

const SpecializationRule* TransformConfig::specialization(std::string_view table) const {
    for (const auto& rule : specializations) {
        if (rule.table == table) return &rule;
    }
    return nullptr;
}

TransformConfig config_from_json(const Json& json) {
    TransformConfig config;
    try {
        config.dataset = json.at("dataset").get<std::string>();
        if (json.contains("version")) config.version = json.at("version").get<std::uint32_t>();
        if (json.contains("default_language_tag")) {
            config.default_language_tag = json.at("default_language_tag").get<std::string>();
        }
        if (json.contains("null_markers")) {
            config.null_markers = json.at("null_markers").get<std::set<std::string>>();
        }
        for (const auto& t : json.at("tables")) {
            TableMapping table;
            table.name = t.at("name").get<std::string>();
            if (t.contains("source")) table.source = t.at("source").get<std::string>();
            for (const auto& c : t.at("columns")) {
                ColumnMapping col;
                col.header = c.at("header").get<std::string>();
                col.attribute = c.contains("attribute") ? c.at("attribute").get<std::string>() : slugify(col.header);
                if (c.contains("datatype")) col.datatype = parse_datatype(c.at("datatype").get<std::string>());
                if (c.contains("role")) col.role = parse_role(c.at("role").get<std::string>());
                if (c.contains("target")) col.target = c.at("target").get<std::string>();
                table.columns.push_back(std::move(col));
            }
            config.tables.push_back(std::move(table));
        }
        if (json.contains("lexicon")) {
            for (const auto& [concept_id, entries] : json.at("lexicon").items()) {
                auto& lexs = config.lexicon[concept_id];
                for (const auto& e : entries) {
                    lexs.push_back({e.at("lemma").get<std::string>(), e.at("language_tag").get<std::string>(),
                                    e.at("gloss").get<std::string>()});
                }
            }
        }
        if (json.contains("specializations")) {
            for (const auto& s : json.at("specializations")) {
                SpecializationRule rule;
                rule.table = s.at("table").get<std::string>();
                rule.discriminator = s.at("discriminator").get<std::string>();
                for (const auto& [value, target] : s.at("values").items()) {
                    rule.values[value] = {target.at("etype").get<std::string>(),
                                          target.contains("concept") ? target.at("concept").get<std::string>()
                                                                     : target.at("etype").get<std::string>()};
                }
                config.specializations.push_back(std::move(rule));
            }
        }
    } catch (const nlohmann::json::exception& e) {
        config_fail(e.what());
    } catch (const Error& e) {
        config_fail(e.what());
    }
    check_config(config);
    return config;
}

Json to_json(const TransformConfig& config) {
    Json j;
    j["dataset"] = config.dataset;
    j["version"] = config.version;
    j["default_language_tag"] = config.default_language_tag;
    j["null_markers"] = Json(std::vector<std::string>(config.null_markers.begin(), config.null_markers.end()));
    Json tables = Json::array();
    for (const auto& t : config.tables) {
        Json table;
        table["name"] = t.name;
        if (!t.source.empty()) table["source"] = t.source;
        Json columns = Json::array();
        for (const auto& c : t.columns) {
            Json col;
            col["header"] = c.header;
            col["attribute"] = c.attribute;
            col["datatype"] = std::string(to_string(c.datatype));
            col["role"] = std::string(to_string(c.role));
            if (c.role == Role::ForeignKey) col["target"] = c.target;
            columns.push_back(col);
        }
        table["columns"] = columns;
        tables.push_back(table);
    }
    j["tables"] = tables;
    Json lexicon = Json::object();
    for (const auto& [concept_id, lexs] : config.lexicon) {
        Json entries = Json::array();
        for (const auto& lex : lexs) {
            entries.push_back({{"lemma", lex.lemma}, {"language_tag", lex.language_tag}, {"gloss", lex.gloss}});
        }
        lexicon[concept_id] = entries;
    }
    j["lexicon"] = lexicon;
    Json specializations = Json::array();
    for (const auto& rule : config.specializations) {
        Json values = Json::object();
        for (const auto& [value, target] : rule.values) {
            values[value] = {{"etype", target.etype}, {"concept", target.concept_id}};
        }
        specializations.push_back({{"table", rule.table}, {"discriminator", rule.discriminator}, {"values", values}});
    }
    j["specializations"] = specializations;
    return j;
}

void check_config(const TransformConfig& config) {
    if (!is_local_id(config.dataset + "-s")) config_fail("dataset '" + config.dataset + "' is not a valid local id");
    if (config.version == 0) config_fail("version must be positive");
    if (!is_language_tag(config.default_language_tag)) {
        config_fail("'" + config.default_language_tag + "' is not a language tag");
    }
    std::set<std::string> tables;
    for (const auto& t : config.tables) {
        if (!is_slug(t.name)) config_fail("table name '" + t.name + "' is not a slug");
        if (!tables.insert(t.name).second) config_fail("table '" + t.name + "' is mapped twice");
        std::set<std::string> headers;
        std::set<std::string> attributes;
        for (const auto& c : t.columns) {
            if (!headers.insert(c.header).second) {
                config_fail("header '" + c.header + "' appears twice in table " + t.name);
            }
            if (!is_slug(c.attribute)) config_fail("attribute '" + c.attribute + "' is not a slug");
            if (!attributes.insert(c.attribute).second) {
                config_fail("attribute '" + c.attribute + "' appears twice in table " + t.name);
            }
            if (c.role == Role::ForeignKey && c.target.empty()) {
                config_fail("foreign key " + t.name + "." + c.attribute + " has no target");
            }
        }
    }
    for (const auto& [concept_id, lexs] : config.lexicon) {
        if (!is_slug(concept_id)) config_fail("lexicon concept '" + concept_id + "' is not a slug");
        std::set<std::string> tags;
        for (const auto& lex : lexs) {
            if (!is_language_tag(lex.language_tag)) config_fail("lexicon " + concept_id + ": bad language tag");
            if (!tags.insert(lex.language_tag).second) {
                config_fail("lexicon " + concept_id + " has two lemmas for " + lex.language_tag);
            }
            if (lex.lemma.empty() || lex.gloss.empty()) {
                config_fail("lexicon " + concept_id + "@" + lex.language_tag + " needs a lemma and a gloss");
            }
        }
        if (lexs.empty()) config_fail("lexicon " + concept_id + " has no lexicalization");
    }
    std::set<std::string> rule_tables;
    std::set<std::string> children;
    for (const auto& rule : config.specializations) {
        if (!rule_tables.insert(rule.table).second) {
            config_fail("table " + rule.table + " has more than one specialization rule");
        }
        for (const auto& [value, target] : rule.values) {
            if (!is_slug(target.etype)) config_fail("specialization etype '" + target.etype + "' is not a slug");
            if (tables.count(target.etype) || !children.insert(target.etype).second) {
                config_fail("specialization etype '" + target.etype + "' is not unique");
            }
            if (!config.lexicon.count(target.concept_id)) {
                config_fail("specialization concept '" + target.concept_id + "' is missing from the lexicon");
            }
        }
    }
}

// ---------------------------------------------------------------------------
// clean
// ---------------------------------------------------------------------------

SourceDataset clean(const SourceDataset& raw, const TransformConfig& config) {
    SourceDataset out;
    out.ref = raw.ref;
    out.provenance = raw.provenance;
    out.retrieved_at = raw.retrieved_at;

    std::vector<std::string> headers;
    headers.reserve(raw.headers.size());
    for (const auto& h : raw.headers) headers.push_back(normalize_space(h));

    std::vector<Row> rows;
    for (const auto& row : raw.rows) {
        Row cleaned;
        for (const auto& cell : row) {
            if (!cell) {
                cleaned.emplace_back();
                continue;
            }
            std::string v = normalize_space(*cell);
            if (config.null_markers.count(v)) {
                cleaned.emplace_back();
            } else {
                cleaned.emplace_back(std::move(v));
            }
        }
        rows.push_back(std::move(cleaned));
    }

    std::vector<std::size_t> keep;
    for (std::size_t c = 0; c < headers.size(); ++c) {
        if (!headers[c].empty()) keep.push_back(c);
    }
    auto all_null = [&](const Row& row) {
        return std::all_of(keep.begin(), keep.end(), [&](std::size_t c) { return !row[c].has_value(); });
    };
    rows.erase(std::remove_if(rows.begin(), rows.end(), all_null), rows.end());
    std::erase_if(keep, [&](std::size_t c) {
        return std::all_of(rows.begin(), rows.end(), [&](const Row& row) { return !row[c].has_value(); });
    });

    for (std::size_t c : keep) out.headers.push_back(headers[c]);
    for (const auto& row : rows) {
        Row projected;
        projected.reserve(keep.size());
        for (std::size_t c : keep) projected.push_back(row[c]);
        out.rows.push_back(std::move(projected));
    }
    return out;
}

// ---------------------------------------------------------------------------
// standardise
// ---------------------------------------------------------------------------

std::optional<std::string> coerce(Datatype type, std::string_view v) {
    switch (type) {
        case Datatype::String:
            return std::string(v);
        case Datatype::Identifier:
            if (!conforms(Datatype::Identifier, v)) return std::nullopt;
            return std::string(v);
        case Datatype::Integer: {
            std::string_view digits = v;
            bool negative = false;
            if (!digits.empty() && (digits[0] == '+' || digits[0] == '-')) {
                negative = digits[0] == '-';
                digits.remove_prefix(1);
            }
            if (!digits_only(digits)) return std::nullopt;
            const std::string magnitude = strip_leading_zeros(digits);
            return (negative && magnitude != "0" ? "-" : "") + magnitude;
        }
        case Datatype::Decimal: {
            std::string_view body = v;
            bool negative = false;
            if (!body.empty() && (body[0] == '+' || body[0] == '-')) {
                negative = body[0] == '-';
                body.remove_prefix(1);
            }
            const auto dot = body.find('.');
            std::string_view whole = body.substr(0, dot);
            std::string_view fraction = dot == std::string_view::npos ? std::string_view{} : body.substr(dot + 1);
            if (whole.empty() && fraction.empty()) return std::nullopt;
            if (!whole.empty() && !digits_only(whole)) return std::nullopt;
            if (!fraction.empty() && !digits_only(fraction)) return std::nullopt;
            std::string frac(fraction);
            while (frac.size() > 1 && frac.back() == '0') frac.pop_back();
            if (frac.empty()) frac = "0";
            const std::string integral = whole.empty() ? "0" : strip_leading_zeros(whole);
            const bool zero = integral == "0" && frac == "0";
            return (negative && !zero ? "-" : "") + integral + "." + frac;
        }
        case Datatype::Boolean: {
            const std::string lower = to_lower_ascii(v);
            if (lower == "true" || lower == "yes" || lower == "1") return "true";
            if (lower == "false" || lower == "no" || lower == "0") return "false";
            return std::nullopt;
        }
        case Datatype::Date:
            return coerce_date(v);
    }
    return std::nullopt;
}

StandardisedDataset standardise(const std::vector<SourceDataset>& cleaned, const TransformConfig& config) {
    check_config(config);
    if (cleaned.empty()) throw Error(ErrorCode::InvalidArgument, "standardise needs at least one source");

    auto source_for = [&](const TableMapping& mapping) -> const SourceDataset& {
        if (mapping.source.empty()) {
            if (cleaned.size() != 1) {
                throw Error(ErrorCode::Validation, "table " + mapping.name +
                                                       " names no source and the transformation has " +
                                                       std::to_string(cleaned.size()));
            }
            return cleaned.front();
        }
        for (const auto& s : cleaned) {
            if (s.ref.local_id == mapping.source) return s;
        }
        throw Error(ErrorCode::NotFound, "table " + mapping.name + ": source '" + mapping.source + "' not supplied");
    };

    StandardisedDataset out;
    out.ref = config.output_ref(cleaned.front().ref.node_id, ContentKind::Standardised);
    for (const auto& mapping : config.tables) {
        const SourceDataset& source = source_for(mapping);

        std::vector<std::string> unmapped;
        std::set<std::string> seen;
        for (const auto& h : source.headers) {
            if (!seen.insert(h).second) {
                throw Error(ErrorCode::Validation, "source " + source.ref.path() + " repeats header '" + h + "'");
            }
            const bool mapped = std::any_of(mapping.columns.begin(), mapping.columns.end(),
                                            [&](const ColumnMapping& c) { return c.header == h; });
            if (!mapped) unmapped.push_back("'" + h + "'");
        }
        if (!unmapped.empty()) {
            throw Error(ErrorCode::Validation,
                        "table " + mapping.name + ": unmapped headers " + join(unmapped));
        }

        Table table;
        table.name = mapping.name;
        std::vector<std::optional<std::size_t>> source_index;
        for (const auto& c : mapping.columns) {
            table.columns.push_back({c.attribute, c.datatype, c.role, c.role == Role::ForeignKey ? c.target : ""});
            const auto it = std::find(source.headers.begin(), source.headers.end(), c.header);
            source_index.push_back(it == source.headers.end()
                                       ? std::nullopt
                                       : std::optional<std::size_t>(it - source.headers.begin()));
        }
        for (std::size_t r = 0; r < source.rows.size(); ++r) {
            Row row;
            for (std::size_t c = 0; c < table.columns.size(); ++c) {
                if (!source_index[c] || !source.rows[r][*source_index[c]]) {
                    row.emplace_back();
                    continue;
                }
                const std::string& value = *source.rows[r][*source_index[c]];
                auto coerced = coerce(table.columns[c].datatype, value);
                if (!coerced) {
                    throw Error(ErrorCode::Validation,
                                "table " + table.name + " row " + std::to_string(r + 1) + " column " +
                                    table.columns[c].attribute + ": cannot read '" + value + "' as " +
                                    std::string(to_string(table.columns[c].datatype)));
                }
                row.push_back(std::move(coerced));
            }
            table.rows.push_back(std::move(row));
        }
        if (const auto pk = table.primary_key()) {
            std::set<std::string> keys;
            for (const auto& row : table.rows) {
                if (row[*pk] && !keys.insert(*row[*pk]).second) {
                    throw Error(ErrorCode::Validation,
                                "table " + table.name + ": duplicate primary key '" + *row[*pk] + "'");
                }
            }
        } else {
            std::sort(table.rows.begin(), table.rows.end(), row_less);
            table.rows.erase(std::unique(table.rows.begin(), table.rows.end()), table.rows.end());
        }
        out.tables.push_back(std::move(table));
    }
    out = canonicalize(std::move(out));
    require_valid(validate(out), "standardised dataset " + out.ref.path());
    return out;
}

// ---------------------------------------------------------------------------
// extract_language
// ---------------------------------------------------------------------------

LanguageDataset extract_language(const StandardisedDataset& standardised, const TransformConfig& config) {
    require_valid(validate(standardised), "standardised dataset " + standardised.ref.path());
    std::set<std::string> ids;
    for (const auto& table : standardised.tables) {
        ids.insert(table.name);
        for (const auto& col : table.columns) ids.insert(col.attribute);
    }
    for (const auto& rule : config.specializations) {
        for (const auto& [value, target] : rule.values) ids.insert(target.concept_id);
    }

    LanguageDataset out;
    out.ref = config.output_ref(standardised.ref.node_id, ContentKind::Language);
    for (const auto& id : ids) {
        Concept c;
        c.concept_id = id;
        const auto it = config.lexicon.find(id);
        if (it != config.lexicon.end()) {
            c.lexicalizations = it->second;
        } else {
            c.lexicalizations.push_back({lemma_of(id), config.default_language_tag,
                                         "concept for " + id + " as used in dataset " + standardised.ref.local_id});
        }
        out.concepts.push_back(std::move(c));
    }
    out = canonicalize(std::move(out));
    require_valid(validate(out), "language dataset " + out.ref.path());
    return out;
}

// ---------------------------------------------------------------------------
// build_knowledge
// ---------------------------------------------------------------------------

KnowledgeDataset build_knowledge(const StandardisedDataset& standardised, const LanguageDataset& language,
                                 const TransformConfig& config) {
    require_valid(validate(standardised), "standardised dataset " + standardised.ref.path());
    require_valid(validate(language), "language dataset " + language.ref.path());

    auto labels_for = [&](const std::string& concept_id) {
        std::vector<Label> labels;
        if (const Concept* c = language.find(concept_id)) {
            for (const auto& lex : c->lexicalizations) labels.push_back({lex.language_tag, lex.lemma});
        }
        std::sort(labels.begin(), labels.end());
        return labels;
    };

    KnowledgeDataset out;
    out.ref = config.output_ref(standardised.ref.node_id, ContentKind::Knowledge);
    out.language_refs.push_back(language.ref);
    for (const auto& table : standardised.tables) {
        EType e;
        e.etype_id = table.name;
        e.concept_id = table.name;
        e.labels = labels_for(table.name);
        for (std::size_t i = 0; i < table.columns.size(); ++i) {
            const Column& col = table.columns[i];
            const std::string id = property_id(table.name, col.attribute);
            if (col.role == Role::ForeignKey) {
                e.object_properties.push_back({id, col.attribute, col.target, col.datatype, i, labels_for(col.attribute)});
            } else {
                e.data_properties.push_back(
                    {id, col.attribute, col.datatype, i, col.role == Role::PrimaryKey, labels_for(col.attribute)});
            }
        }
        out.etypes.push_back(std::move(e));
    }

    for (const auto& rule : config.specializations) {
        const Table* table = standardised.table(rule.table);
        if (table == nullptr) {
            throw Error(ErrorCode::Validation, "specialization names unknown table '" + rule.table + "'");
        }
        const auto index = table->column_index(rule.discriminator);
        if (!index) {
            throw Error(ErrorCode::Validation,
                        "discriminator attribute '" + rule.discriminator + "' missing from table " + rule.table);
        }
        if (table->columns[*index].role != Role::Plain) {
            throw Error(ErrorCode::Validation,
                        "discriminator " + rule.table + "." + rule.discriminator + " must be a plain column");
        }
        std::set<std::string> uncovered;
        for (const auto& row : table->rows) {
            if (row[*index] && !rule.values.count(*row[*index])) uncovered.insert("'" + *row[*index] + "'");
        }
        if (!uncovered.empty()) {
            throw Error(ErrorCode::Validation, "specialization of " + rule.table + " does not cover values " +
                                                   join({uncovered.begin(), uncovered.end()}));
        }
        const std::string disc = property_id(rule.table, rule.discriminator);
        for (auto& e : out.etypes) {
            if (e.etype_id == rule.table) e.discriminator = disc;
        }
        for (const auto& [value, target] : rule.values) {
            EType child;
            child.etype_id = target.etype;
            child.concept_id = target.concept_id;
            child.parent = rule.table;
            child.discriminator_value = value;
            child.labels = labels_for(target.concept_id);
            out.etypes.push_back(std::move(child));
        }
    }
    out = canonicalize(std::move(out));
    ValidationContext context;
    context.languages.push_back(&language);
    require_valid(validate(out, context), "knowledge dataset " + out.ref.path());
    return out;
}

// ---------------------------------------------------------------------------
// compose / decompose
// ---------------------------------------------------------------------------

std::string mint_iri(const NodeDescriptor& node, const DatasetRef& standardised, const Table& table,
                     const Row& row) {
    std::string key;
    if (const auto pk = table.primary_key()) {
        key = percent_encode(row[*pk].value_or(""));
    } else {
        key = sha256_hex(csv::format_record(row)).substr(0, 16);
    }
    return node.base_url + "/resource/" + standardised.local_id + "/" + table.name + "/" + key;
}

namespace {

/// Checks that every table has a root EType whose properties describe its
/// columns exactly.
void check_coverage(const StandardisedDataset& s, const KnowledgeDataset& k) {
    std::vector<std::string> uncovered;
    std::vector<std::string> mismatched;
    for (const auto& table : s.tables) {
        const EType* e = k.find(table.name);
        if (e == nullptr || e->parent) {
            uncovered.push_back(table.name);
            continue;
        }
        const std::size_t declared = e->data_properties.size() + e->object_properties.size();
        if (declared != table.columns.size()) mismatched.push_back(table.name + " (column count)");
        for (std::size_t i = 0; i < table.columns.size(); ++i) {
            const Column& col = table.columns[i];
            const std::string id = property_id(table.name, col.attribute);
            bool ok = false;
            if (col.role == Role::ForeignKey) {
                const auto it = std::find_if(e->object_properties.begin(), e->object_properties.end(),
                                             [&](const ObjectProperty& p) { return p.prop_id == id; });
                ok = it != e->object_properties.end() && it->position == i && it->target == col.target &&
                     it->datatype == col.datatype;
            } else {
                const auto it = std::find_if(e->data_properties.begin(), e->data_properties.end(),
                                             [&](const DataProperty& p) { return p.prop_id == id; });
                ok = it != e->data_properties.end() && it->position == i && it->datatype == col.datatype &&
                     it->primary_key == (col.role == Role::PrimaryKey);
            }
            if (!ok) mismatched.push_back(id);
        }
    }
    if (!uncovered.empty()) {
        throw Error(ErrorCode::Validation,
                    "knowledge " + k.ref.path() + " has no EType for tables " + join(uncovered));
    }
    if (!mismatched.empty()) {
        throw Error(ErrorCode::Validation,
                    "knowledge " + k.ref.path() + " does not match columns " + join(mismatched));
    }
}

}  // namespace

GraphDataset compose_graph(const StandardisedDataset& standardised, const LanguageDataset& language,
                           const KnowledgeDataset& knowledge, const NodeDescriptor& node,
                           const DatasetRef& graph_ref) {
    require_valid(validate(node), "node descriptor");
    require_valid(validate(standardised), "standardised dataset " + standardised.ref.path());
    require_valid(validate(language), "language dataset " + language.ref.path());
    ValidationContext lcontext;
    lcontext.languages.push_back(&language);
    require_valid(validate(knowledge, lcontext), "knowledge dataset " + knowledge.ref.path());
    check_coverage(standardised, knowledge);

    GraphDataset out;
    out.ref = graph_ref;
    out.composed_of = {standardised.ref, language.ref, knowledge.ref};

    // Key value -> IRI per table, for foreign key links.
    std::map<std::string, std::unordered_map<std::string, std::string>> by_key;
    for (const auto& table : standardised.tables) {
        const auto pk = table.primary_key();
        if (!pk) continue;
        auto& index = by_key[table.name];
        for (const auto& row : table.rows) index.emplace(*row[*pk], mint_iri(node, standardised.ref, table, row));
    }

    for (const auto& table : standardised.tables) {
        const EType* root = knowledge.find(table.name);
        std::optional<std::size_t> disc;
        std::map<std::string, std::string> children;
        if (root->discriminator) {
            disc = table.column_index(attribute_of(*root->discriminator));
            for (const auto& e : knowledge.etypes) {
                if (e.parent == root->etype_id && e.discriminator_value) children[*e.discriminator_value] = e.etype_id;
            }
        }
        std::set<std::string> uncovered;
        for (const auto& row : table.rows) {
            Entity entity;
            entity.iri = mint_iri(node, standardised.ref, table, row);
            entity.etype = table.name;
            for (std::size_t i = 0; i < table.columns.size(); ++i) {
                if (!row[i]) continue;
                const Column& col = table.columns[i];
                const std::string prop = property_id(table.name, col.attribute);
                if (disc && i == *disc) {
                    const auto it = children.find(*row[i]);
                    if (it == children.end()) {
                        uncovered.insert("'" + *row[i] + "'");
                    } else {
                        entity.etype = it->second;
                    }
                    continue;
                }
                if (col.role == Role::ForeignKey) {
                    const auto& index = by_key[col.target];
                    const auto it = index.find(*row[i]);
                    if (it == index.end()) {
                        throw Error(ErrorCode::Validation, "dangling link: " + prop + " -> '" + *row[i] + "'");
                    }
                    entity.links.push_back({prop, it->second});
                } else {
                    entity.literals.push_back({prop, *row[i], col.datatype});
                }
            }
            out.entities.push_back(std::move(entity));
        }
        if (!uncovered.empty()) {
            throw Error(ErrorCode::Validation, "knowledge " + knowledge.ref.path() + " has no specialization of " +
                                                   table.name + " for values " +
                                                   join({uncovered.begin(), uncovered.end()}));
        }
    }
    out = canonicalize(std::move(out));
    ValidationContext context;
    context.knowledge = &knowledge;
    context.languages.push_back(&language);
    require_valid(validate(out, context), "graph dataset " + out.ref.path());
    return out;
}

StandardisedDataset decompose_graph(const GraphDataset& graph, const LanguageDataset& language,
                                    const KnowledgeDataset& knowledge) {
    ValidationContext lcontext;
    lcontext.languages.push_back(&language);
    require_valid(validate(knowledge, lcontext), "knowledge dataset " + knowledge.ref.path());
    for (const auto& entity : graph.entities) {
        if (!knowledge.find(entity.etype)) {
            throw Error(ErrorCode::Validation,
                        "entity " + entity.iri + " is typed by '" + entity.etype + "', absent from " +
                            knowledge.ref.path());
        }
    }
    ValidationContext context;
    context.knowledge = &knowledge;
    require_valid(validate(graph, context), "graph dataset " + graph.ref.path());

    StandardisedDataset out;
    out.ref = graph.composed_of.standardised;
    std::map<std::string, std::size_t> table_of_etype;
    for (const auto& e : knowledge.etypes) {
        if (e.parent) continue;
        Table table;
        table.name = e.etype_id;
        std::vector<std::pair<std::size_t, Column>> columns;
        for (const auto& p : e.data_properties) {
            columns.push_back({p.position, {attribute_of(p.prop_id), p.datatype,
                                            p.primary_key ? Role::PrimaryKey : Role::Plain, ""}});
        }
        for (const auto& p : e.object_properties) {
            columns.push_back({p.position, {attribute_of(p.prop_id), p.datatype, Role::ForeignKey, p.target}});
        }
        std::sort(columns.begin(), columns.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        for (auto& [position, col] : columns) table.columns.push_back(std::move(col));
        table_of_etype[e.etype_id] = out.tables.size();
        out.tables.push_back(std::move(table));
    }

    std::unordered_map<std::string, const Entity*> by_iri;
    for (const auto& entity : graph.entities) by_iri.emplace(entity.iri, &entity);
    auto key_of = [&](const Entity& entity) -> std::optional<std::string> {
        for (const auto* e : knowledge.lineage(entity.etype)) {
            for (const auto& p : e->data_properties) {
                if (!p.primary_key) continue;
                for (const auto& lit : entity.literals) {
                    if (lit.prop_id == p.prop_id) return lit.lexical;
                }
            }
        }
        return std::nullopt;
    };

    for (const auto& entity : graph.entities) {
        const auto lineage = knowledge.lineage(entity.etype);
        const EType* root = lineage.back();
        Table& table = out.tables[table_of_etype.at(root->etype_id)];
        Row row(table.columns.size());
        auto set = [&](const std::string& prop, std::string value) {
            const auto index = table.column_index(attribute_of(prop));
            if (!index || property_id(table.name, attribute_of(prop)) != prop) {
                throw Error(ErrorCode::Validation, "entity " + entity.iri + ": property '" + prop +
                                                       "' does not belong to table " + table.name);
            }
            if (row[*index]) {
                throw Error(ErrorCode::Validation, "entity " + entity.iri + " has two values for '" + prop + "'");
            }
            row[*index] = std::move(value);
        };
        for (const auto& lit : entity.literals) set(lit.prop_id, lit.lexical);
        for (const auto& link : entity.links) {
            const Entity* target = by_iri.at(link.target);
            auto key = key_of(*target);
            if (!key) {
                throw Error(ErrorCode::Validation, "link target " + link.target + " has no primary key literal");
            }
            set(link.prop_id, std::move(*key));
        }
        for (const auto* e : lineage) {
            if (!e->discriminator_value || !e->parent) continue;
            const EType* parent = knowledge.find(*e->parent);
            if (parent->discriminator) set(*parent->discriminator, *e->discriminator_value);
        }
        table.rows.push_back(std::move(row));
    }
    out = canonicalize(std::move(out));
    require_valid(validate(out), "standardised dataset " + out.ref.path());
    return out;
}

// ---------------------------------------------------------------------------
// Metadata
// ---------------------------------------------------------------------------

MetadataRecord generate_metadata(const AnyDataset& dataset, const NodeDescriptor& node, DownloadPolicy policy,
                                 const DescriptiveFields& fields, std::vector<DatasetRef> derived_from,
                                 Timestamp issued_at) {
    if (fields.title.empty()) {
        throw Error(ErrorCode::Validation, "metadata for " + ref_of(dataset).path() + " needs a title");
    }
    MetadataRecord record;
    record.ref = ref_of(dataset);
    record.title = fields.title;
    record.description = fields.description.empty() ? fields.title : fields.description;
    record.categories = fields.categories;
    record.license = fields.license;
    record.issued_at = issued_at;
    record.publisher = node.publisher;
    record.download_policy = policy;
    if (const auto* g = std::get_if<GraphDataset>(&dataset)) {
        record.links.composed_of = {g->composed_of.standardised, g->composed_of.language, g->composed_of.knowledge};
    }
    if (const auto* k = std::get_if<KnowledgeDataset>(&dataset)) record.links.uses_language = k->language_refs;
    std::sort(derived_from.begin(), derived_from.end());
    derived_from.erase(std::unique(derived_from.begin(), derived_from.end()), derived_from.end());
    record.links.derived_from = std::move(derived_from);
    std::sort(record.links.composed_of.begin(), record.links.composed_of.end());
    record.content_hash = canonical_hash(dataset);
    require_valid(validate(record), "metadata record " + record.ref.path());
    return record;
}

PipelineOutput run_pipeline(const std::vector<SourceDataset>& raw, const TransformConfig& config,
                            const NodeDescriptor& node) {
    std::vector<SourceDataset> cleaned;
    cleaned.reserve(raw.size());
    for (const auto& source : raw) cleaned.push_back(clean(source, config));
    PipelineOutput out;
    out.standardised = standardise(cleaned, config);
    out.language = extract_language(out.standardised, config);
    out.knowledge = build_knowledge(out.standardised, out.language, config);
    out.graph = compose_graph(out.standardised, out.language, out.knowledge, node,
                              config.output_ref(node.node_id, ContentKind::Graph));
    return out;
}

}  // namespace livedata
