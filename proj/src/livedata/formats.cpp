#include "livedata/formats.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "livedata/csv.hpp"
#include "livedata/error.hpp"
#include "livedata/turtle.hpp"

namespace livedata {

namespace {

constexpr std::string_view kSchemaFormat = "livedata-standardised/1";
constexpr std::string_view kBundleMagic = "livedata-bundle/1\n";
constexpr std::string_view kLanguageHeader = "concept_id,language_tag,lemma,gloss";

std::string vocab(std::string_view term) { return std::string(kVocab) + std::string(term); }
std::string rdf(std::string_view term) { return std::string(turtle::kRdf) + std::string(term); }
std::string rdfs(std::string_view term) { return std::string(turtle::kRdfs) + std::string(term); }
std::string owl(std::string_view term) { return std::string(turtle::kOwl) + std::string(term); }
std::string xsd(std::string_view term) { return std::string(turtle::kXsd) + std::string(term); }

[[noreturn]] void parse_fail(const std::string& message) { throw Error(ErrorCode::Parse, message); }

const Json& member(const Json& json, const char* key, std::string_view what) {
    if (!json.is_object() || !json.contains(key)) {
        parse_fail(std::string(what) + ": missing field '" + key + "'");
    }
    return json.at(key);
}

std::string string_member(const Json& json, const char* key, std::string_view what) {
    const Json& v = member(json, key, what);
    if (!v.is_string()) parse_fail(std::string(what) + ": field '" + key + "' must be a string");
    return v.get<std::string>();
}

std::vector<DatasetRef> refs_from_json(const Json& json, std::string_view what) {
    if (!json.is_array()) parse_fail(std::string(what) + " must be an array");
    std::vector<DatasetRef> out;
    for (const auto& item : json) out.push_back(ref_from_json(item));
    return out;
}

Json refs_to_json(const std::vector<DatasetRef>& refs) {
    Json out = Json::array();
    for (const auto& ref : refs) out.push_back(to_json(ref));
    return out;
}

std::string dump(const Json& json) { return json.dump(2) + "\n"; }

}  // namespace

// ---------------------------------------------------------------------------
// JSON mappings
// ---------------------------------------------------------------------------

Json parse_json(std::string_view text, std::string_view what) {
    try {
        return Json::parse(text.begin(), text.end());
    } catch (const nlohmann::json::parse_error& e) {
        parse_fail(std::string(what) + ": " + e.what());
    }
}

Json to_json(const DatasetRef& ref) {
    Json j;
    j["node_id"] = ref.node_id;
    j["local_id"] = ref.local_id;
    j["version"] = ref.version;
    j["kind"] = std::string(to_string(ref.kind));
    return j;
}

DatasetRef ref_from_json(const Json& json) {
    DatasetRef ref;
    ref.node_id = string_member(json, "node_id", "dataset ref");
    ref.local_id = string_member(json, "local_id", "dataset ref");
    const Json& version = member(json, "version", "dataset ref");
    if (!version.is_number_unsigned() || version.get<std::uint64_t>() == 0 ||
        version.get<std::uint64_t>() > 0xffffffffULL) {
        parse_fail("dataset ref: version must be a positive integer");
    }
    ref.version = version.get<std::uint32_t>();
    try {
        ref.kind = parse_content_kind(string_member(json, "kind", "dataset ref"));
    } catch (const Error& e) {
        parse_fail(std::string("dataset ref: ") + e.what());
    }
    return ref;
}

Json to_json(const MultilingualText& text) {
    Json j = Json::object();
    for (const auto& [tag, value] : text) j[tag] = value;
    return j;
}

MultilingualText text_from_json(const Json& json) {
    if (!json.is_object()) parse_fail("multilingual text must be an object");
    MultilingualText out;
    for (const auto& [tag, value] : json.items()) {
        if (!value.is_string()) parse_fail("multilingual text values must be strings");
        out[tag] = value.get<std::string>();
    }
    return out;
}

Json to_json(const NodeDescriptor& node) {
    Json j;
    j["node_id"] = node.node_id;
    j["name"] = node.name;
    j["domain_description"] = to_json(node.domain_description);
    j["base_url"] = node.base_url;
    j["publisher"] = node.publisher;
    return j;
}

NodeDescriptor node_from_json(const Json& json) {
    NodeDescriptor node;
    node.node_id = string_member(json, "node_id", "node descriptor");
    node.name = string_member(json, "name", "node descriptor");
    node.domain_description = text_from_json(member(json, "domain_description", "node descriptor"));
    node.base_url = string_member(json, "base_url", "node descriptor");
    node.publisher = string_member(json, "publisher", "node descriptor");
    return node;
}

Json to_json(const MetadataRecord& record) {
    Json j;
    j["ref"] = to_json(record.ref);
    j["title"] = to_json(record.title);
    j["description"] = to_json(record.description);
    j["categories"] = Json(std::vector<std::string>(record.categories.begin(), record.categories.end()));
    j["license"] = record.license;
    j["issued_at"] = format_timestamp(record.issued_at);
    j["publisher"] = record.publisher;
    j["download_policy"] = std::string(to_string(record.download_policy));
    Json links;
    links["composed_of"] = refs_to_json(record.links.composed_of);
    links["uses_language"] = refs_to_json(record.links.uses_language);
    links["derived_from"] = refs_to_json(record.links.derived_from);
    j["links"] = links;
    j["content_hash"] = record.content_hash;
    return j;
}

MetadataRecord metadata_from_json(const Json& json) {
    constexpr std::string_view what = "metadata";
    MetadataRecord record;
    record.ref = ref_from_json(member(json, "ref", what));
    record.title = text_from_json(member(json, "title", what));
    record.description = text_from_json(member(json, "description", what));
    const Json& categories = member(json, "categories", what);
    if (!categories.is_array()) parse_fail("metadata: categories must be an array");
    for (const auto& c : categories) {
        if (!c.is_string()) parse_fail("metadata: categories must be strings");
        record.categories.insert(c.get<std::string>());
    }
    record.license = string_member(json, "license", what);
    record.issued_at = parse_timestamp(string_member(json, "issued_at", what));
    record.publisher = string_member(json, "publisher", what);
    try {
        record.download_policy = parse_download_policy(string_member(json, "download_policy", what));
    } catch (const Error& e) {
        parse_fail(std::string("metadata: ") + e.what());
    }
    const Json& links = member(json, "links", what);
    record.links.composed_of = refs_from_json(member(links, "composed_of", "metadata links"), "composed_of");
    record.links.uses_language =
        refs_from_json(member(links, "uses_language", "metadata links"), "uses_language");
    record.links.derived_from =
        refs_from_json(member(links, "derived_from", "metadata links"), "derived_from");
    record.content_hash = string_member(json, "content_hash", what);
    return record;
}

DatasetRef ref_from_iri(std::string_view iri, ContentKind kind) {
    constexpr std::string_view scheme = "urn:livedata:";
    if (!starts_with(iri, scheme)) parse_fail("'" + std::string(iri) + "' is not a dataset IRI");
    const auto parts = split(iri.substr(scheme.size()), ':');
    if (parts.size() != 3 || parts[2].size() < 2 || parts[2][0] != 'v') {
        parse_fail("'" + std::string(iri) + "' is not a dataset IRI");
    }
    DatasetRef ref;
    ref.node_id = parts[0];
    ref.local_id = parts[1];
    ref.kind = kind;
    const std::string digits = parts[2].substr(1);
    if (digits.empty() || digits.size() > 9 ||
        !std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; })) {
        parse_fail("'" + std::string(iri) + "' has a malformed version");
    }
    ref.version = static_cast<std::uint32_t>(std::stoul(digits));
    if (!validate(ref).empty()) parse_fail("'" + std::string(iri) + "' names an invalid dataset ref");
    return ref;
}

// ---------------------------------------------------------------------------
// Source
// ---------------------------------------------------------------------------

SourceDataset parse_source(std::string_view bytes, const DatasetRef& ref, std::string provenance,
                           Timestamp retrieved_at) {
    auto records = csv::parse(bytes);
    SourceDataset source;
    source.ref = ref;
    source.provenance = std::move(provenance);
    source.retrieved_at = retrieved_at;
    if (records.empty()) return source;
    for (auto& h : records.front()) source.headers.push_back(h.value_or(""));
    for (std::size_t r = 1; r < records.size(); ++r) {
        auto& rec = records[r];
        if (rec.size() != source.headers.size()) {
            parse_fail("source row " + std::to_string(r) + " has " + std::to_string(rec.size()) +
                       " cells, header has " + std::to_string(source.headers.size()));
        }
        // Raw data has no null concept yet: every cell is text.
        for (auto& cell : rec) {
            if (!cell) cell = std::string();
        }
        source.rows.push_back(std::move(rec));
    }
    return source;
}

std::string serialize_source(const SourceDataset& source) {
    std::string out;
    csv::Record header;
    for (const auto& h : source.headers) header.emplace_back(h);
    out += csv::format_record(header);
    for (const auto& row : source.rows) out += csv::format_record(row);
    return out;
}

// ---------------------------------------------------------------------------
// Standardised
// ---------------------------------------------------------------------------

namespace {

std::string table_file_name(const DatasetRef& ref, std::string_view table) {
    return ref.local_id + ".v" + std::to_string(ref.version) + "." + std::string(table) + ".csv";
}

std::string schema_file_name(const DatasetRef& ref) {
    return ref.local_id + ".v" + std::to_string(ref.version) + ".schema.json";
}

}  // namespace

StandardisedFiles serialize_standardised_files(const StandardisedDataset& input) {
    require_valid(validate(input), "standardised dataset " + input.ref.path());
    const StandardisedDataset dataset = canonicalize(input);

    StandardisedFiles files;
    Json schema;
    schema["format"] = std::string(kSchemaFormat);
    schema["ref"] = to_json(dataset.ref);
    Json tables = Json::array();
    for (const auto& table : dataset.tables) {
        Json t;
        t["name"] = table.name;
        t["file"] = table_file_name(dataset.ref, table.name);
        Json columns = Json::array();
        for (const auto& col : table.columns) {
            Json c;
            c["attribute"] = col.attribute;
            c["datatype"] = std::string(to_string(col.datatype));
            c["role"] = std::string(to_string(col.role));
            if (col.role == Role::ForeignKey) c["target"] = col.target;
            columns.push_back(c);
        }
        t["columns"] = columns;
        tables.push_back(t);

        std::string bytes;
        csv::Record header;
        for (const auto& col : table.columns) header.emplace_back(col.attribute);
        bytes += csv::format_record(header);
        for (const auto& row : table.rows) bytes += csv::format_record(row);
        files.tables.push_back({table_file_name(dataset.ref, table.name), std::move(bytes)});
    }
    schema["tables"] = tables;
    files.schema = {schema_file_name(dataset.ref), dump(schema)};
    return files;
}

StandardisedDataset parse_standardised(const std::vector<NamedFile>& files, std::string_view schema_text) {
    const Json schema = parse_json(schema_text, "schema descriptor");
    if (string_member(schema, "format", "schema descriptor") != kSchemaFormat) {
        parse_fail("schema descriptor: unsupported format");
    }
    StandardisedDataset dataset;
    dataset.ref = ref_from_json(member(schema, "ref", "schema descriptor"));
    const Json& tables = member(schema, "tables", "schema descriptor");
    if (!tables.is_array()) parse_fail("schema descriptor: tables must be an array");

    for (const auto& t : tables) {
        Table table;
        table.name = string_member(t, "name", "schema table");
        const std::string file = string_member(t, "file", "schema table");
        const Json& columns = member(t, "columns", "schema table");
        if (!columns.is_array()) parse_fail("schema table " + table.name + ": columns must be an array");
        for (const auto& c : columns) {
            Column col;
            col.attribute = string_member(c, "attribute", "schema column");
            try {
                col.datatype = parse_datatype(string_member(c, "datatype", "schema column"));
                col.role = parse_role(string_member(c, "role", "schema column"));
            } catch (const Error& e) {
                parse_fail("schema column " + table.name + "." + col.attribute + ": " + e.what());
            }
            if (col.role == Role::ForeignKey) col.target = string_member(c, "target", "schema column");
            table.columns.push_back(std::move(col));
        }

        const auto it = std::find_if(files.begin(), files.end(),
                                     [&](const NamedFile& f) { return f.name == file; });
        if (it == files.end()) parse_fail("standardised: missing table file '" + file + "'");
        auto records = csv::parse(it->bytes);
        if (records.empty()) parse_fail("standardised: table file '" + file + "' has no header");
        const auto& header = records.front();
        for (std::size_t i = 0; i < header.size(); ++i) {
            const std::string name = header[i].value_or("");
            if (!table.column_index(name)) {
                parse_fail("standardised: table " + table.name + " has unknown column '" + name + "'");
            }
            if (i >= table.columns.size() || table.columns[i].attribute != name) {
                parse_fail("standardised: table " + table.name + " column order differs from schema at '" +
                           name + "'");
            }
        }
        if (header.size() != table.columns.size()) {
            parse_fail("standardised: table " + table.name + " is missing columns declared in the schema");
        }
        for (std::size_t r = 1; r < records.size(); ++r) {
            auto& rec = records[r];
            if (rec.size() != table.columns.size()) {
                parse_fail("standardised: table " + table.name + " row " + std::to_string(r) + " has " +
                           std::to_string(rec.size()) + " cells");
            }
            for (std::size_t c = 0; c < rec.size(); ++c) {
                if (rec[c] && !conforms(table.columns[c].datatype, *rec[c])) {
                    parse_fail("standardised: table " + table.name + " row " + std::to_string(r) + " column " +
                               table.columns[c].attribute + ": '" + *rec[c] + "' is not a valid " +
                               std::string(to_string(table.columns[c].datatype)));
                }
            }
            table.rows.push_back(std::move(rec));
        }
        dataset.tables.push_back(std::move(table));
    }
    require_valid(validate(dataset), "standardised dataset " + dataset.ref.path());
    return dataset;
}

std::string pack_bundle(const StandardisedFiles& files) {
    std::string out(kBundleMagic);
    auto add = [&](const NamedFile& f) {
        out += f.name + " " + std::to_string(f.bytes.size()) + "\n";
        out += f.bytes;
        out += "\n";
    };
    add(files.schema);
    for (const auto& t : files.tables) add(t);
    return out;
}

StandardisedFiles unpack_bundle(std::string_view bundle) {
    if (!starts_with(bundle, kBundleMagic)) parse_fail("standardised bundle: bad magic line");
    std::size_t pos = kBundleMagic.size();
    std::vector<NamedFile> files;
    while (pos < bundle.size()) {
        const auto eol = bundle.find('\n', pos);
        if (eol == std::string_view::npos) parse_fail("standardised bundle: truncated entry header");
        const std::string_view header = bundle.substr(pos, eol - pos);
        const auto space = header.rfind(' ');
        if (space == std::string_view::npos || space == 0) parse_fail("standardised bundle: bad entry header");
        const std::string length_text(header.substr(space + 1));
        if (length_text.empty() || length_text.size() > 12 ||
            !std::all_of(length_text.begin(), length_text.end(), [](char c) { return c >= '0' && c <= '9'; })) {
            parse_fail("standardised bundle: bad entry length");
        }
        const std::size_t length = std::stoull(length_text);
        pos = eol + 1;
        if (pos + length + 1 > bundle.size() || bundle[pos + length] != '\n') {
            parse_fail("standardised bundle: entry '" + std::string(header.substr(0, space)) + "' is truncated");
        }
        files.push_back({std::string(header.substr(0, space)), std::string(bundle.substr(pos, length))});
        pos += length + 1;
    }
    if (files.empty()) parse_fail("standardised bundle: no schema descriptor");
    StandardisedFiles out;
    out.schema = std::move(files.front());
    out.tables.assign(std::make_move_iterator(files.begin() + 1), std::make_move_iterator(files.end()));
    return out;
}

std::string serialize_standardised(const StandardisedDataset& dataset) {
    return pack_bundle(serialize_standardised_files(dataset));
}

StandardisedDataset parse_standardised(std::string_view bundle) {
    const auto files = unpack_bundle(bundle);
    return parse_standardised(files.tables, files.schema.bytes);
}

// ---------------------------------------------------------------------------
// Language
// ---------------------------------------------------------------------------

std::string serialize_language(const LanguageDataset& input) {
    require_valid(validate(input), "language dataset " + input.ref.path());
    const LanguageDataset dataset = canonicalize(input);
    std::string out = std::string(kLanguageHeader) + "\n";
    for (const auto& c : dataset.concepts) {
        for (const auto& lex : c.lexicalizations) {
            out += csv::format_record({c.concept_id, lex.language_tag, lex.lemma, lex.gloss});
        }
    }
    return out;
}

LanguageDataset parse_language(std::string_view bytes, const DatasetRef& ref) {
    const auto records = csv::parse(bytes);
    if (records.empty()) parse_fail("language dataset: missing header");
    const csv::Record expected{std::string("concept_id"), std::string("language_tag"), std::string("lemma"),
                               std::string("gloss")};
    if (records.front() != expected) parse_fail("language dataset: header must be '" + std::string(kLanguageHeader) + "'");

    std::map<std::string, Concept> concepts;
    for (std::size_t r = 1; r < records.size(); ++r) {
        const auto& rec = records[r];
        const std::string at = "language dataset row " + std::to_string(r);
        if (rec.size() != 4) parse_fail(at + ": expected 4 cells");
        if (!rec[0] || rec[0]->empty()) parse_fail(at + ": empty concept_id");
        if (!rec[1] || !is_language_tag(*rec[1])) parse_fail(at + ": bad language tag");
        if (!rec[2] || rec[2]->empty()) parse_fail(at + ": empty lemma");
        if (!rec[3] || rec[3]->empty()) parse_fail(at + ": empty gloss for " + *rec[0] + "@" + *rec[1]);
        auto& c = concepts[*rec[0]];
        c.concept_id = *rec[0];
        for (const auto& lex : c.lexicalizations) {
            if (lex.language_tag == *rec[1]) {
                parse_fail(at + ": duplicate lexicalization " + *rec[0] + "@" + *rec[1]);
            }
        }
        c.lexicalizations.push_back({*rec[2], *rec[1], *rec[3]});
    }
    LanguageDataset dataset;
    dataset.ref = ref;
    for (auto& [id, c] : concepts) dataset.concepts.push_back(std::move(c));
    dataset = canonicalize(std::move(dataset));
    require_valid(validate(dataset), "language dataset " + ref.path());
    return dataset;
}

// ---------------------------------------------------------------------------
// Knowledge
// ---------------------------------------------------------------------------

namespace {

using turtle::Term;
using turtle::Triple;

const std::vector<std::string>& knowledge_predicate_order() {
    static const std::vector<std::string> order{
        vocab("concept"),       rdfs("label"),          rdfs("subClassOf"), rdfs("domain"),
        rdfs("range"),          vocab("datatype"),      vocab("position"),  vocab("primaryKey"),
        vocab("discriminator"), vocab("discriminatorValue"), vocab("usesLanguage"),
    };
    return order;
}

void add_prefixes(turtle::Document& doc) {
    doc.prefixes["ldv"] = std::string(kVocab);
    doc.prefixes["owl"] = std::string(turtle::kOwl);
    doc.prefixes["rdf"] = std::string(turtle::kRdf);
    doc.prefixes["rdfs"] = std::string(turtle::kRdfs);
    doc.prefixes["xsd"] = std::string(turtle::kXsd);
}

std::string term_namespace(const DatasetRef& knowledge) { return knowledge.iri() + "#"; }

Term string_literal(std::string value) { return Term::literal(std::move(value), xsd("string")); }

void add_labels(turtle::Document& doc, const Term& subject, const std::vector<Label>& labels) {
    for (const auto& label : labels) {
        doc.triples.push_back({subject, Term::iri(rdfs("label")), Term::lang_literal(label.lemma, label.language_tag)});
    }
}


/// Triples about one subject, indexed by predicate.
struct Description {
    std::map<std::string, std::vector<Term>> values;

    const std::vector<Term>* all(const std::string& predicate) const {
        const auto it = values.find(predicate);
        return it == values.end() ? nullptr : &it->second;
    }

    const Term* one(const std::string& predicate, const std::string& where) const {
        const auto* v = all(predicate);
        if (v == nullptr) return nullptr;
        if (v->size() != 1) parse_fail(where + ": expected a single <" + predicate + ">");
        return &v->front();
    }
};

std::map<std::string, Description> describe(const turtle::Document& doc) {
    std::map<std::string, Description> out;
    for (const auto& t : doc.triples) {
        if (t.subject.kind != Term::Kind::Iri) parse_fail("blank node subjects are not part of this vocabulary");
        out[t.subject.value].values[t.predicate.value].push_back(t.object);
    }
    return out;
}

std::string literal_value(const Term& term, const std::string& where) {
    if (term.kind != Term::Kind::Literal) parse_fail(where + ": expected a literal");
    return term.value;
}

std::string local_name(const Term& term, const std::string& ns, const std::string& where) {
    if (term.kind != Term::Kind::Iri || !starts_with(term.value, ns)) {
        parse_fail(where + ": <" + term.value + "> is outside the ontology namespace");
    }
    return term.value.substr(ns.size());
}

std::vector<Label> read_labels(const Description& d, const std::string& where) {
    std::vector<Label> labels;
    if (const auto* values = d.all(rdfs("label"))) {
        for (const auto& v : *values) {
            if (v.kind != Term::Kind::Literal || v.language.empty()) {
                parse_fail(where + ": rdfs:label must be language-tagged");
            }
            labels.push_back({v.language, v.value});
        }
    }
    std::sort(labels.begin(), labels.end());
    return labels;
}

void check_vocabulary(const Description& d, const std::set<std::string>& allowed, const std::string& where) {
    for (const auto& [predicate, values] : d.values) {
        if (!allowed.count(predicate)) parse_fail(where + ": unknown vocabulary term <" + predicate + ">");
    }
}

std::size_t read_position(const Description& d, const std::string& where) {
    const Term* t = d.one(vocab("position"), where);
    if (t == nullptr) parse_fail(where + ": missing ldv:position");
    const std::string v = literal_value(*t, where);
    if (t->datatype != xsd("integer") || !conforms(Datatype::Integer, v) || v[0] == '-' || v[0] == '+') {
        parse_fail(where + ": bad ldv:position");
    }
    return static_cast<std::size_t>(std::stoull(v));
}

Datatype read_datatype(const Description& d, const std::string& where) {
    const Term* t = d.one(vocab("datatype"), where);
    if (t == nullptr) parse_fail(where + ": missing ldv:datatype");
    try {
        return parse_datatype(literal_value(*t, where));
    } catch (const Error& e) {
        parse_fail(where + ": " + e.what());
    }
}

std::string read_concept(const Description& d, const std::string& where, const char* kind) {
    const Term* t = d.one(vocab("concept"), where);
    if (t == nullptr) parse_fail(where + ": " + kind + " without concept annotation");
    return literal_value(*t, where);
}

}  // namespace

std::string serialize_knowledge(const KnowledgeDataset& input) {
    require_valid(validate(input), "knowledge dataset " + input.ref.path());
    const KnowledgeDataset dataset = canonicalize(input);
    const std::string ns = term_namespace(dataset.ref);

    turtle::Document doc;
    add_prefixes(doc);
    doc.prefixes["k"] = ns;
    auto& t = doc.triples;
    const Term type = Term::iri(rdf("type"));

    for (const auto& ref : dataset.language_refs) {
        t.push_back({Term::iri(dataset.ref.iri()), Term::iri(vocab("usesLanguage")), Term::iri(ref.iri())});
    }
    for (const auto& e : dataset.etypes) {
        const Term subject = Term::iri(ns + e.etype_id);
        t.push_back({subject, type, Term::iri(owl("Class"))});
        t.push_back({subject, Term::iri(vocab("concept")), string_literal(e.concept_id)});
        add_labels(doc, subject, e.labels);
        if (e.parent) t.push_back({subject, Term::iri(rdfs("subClassOf")), Term::iri(ns + *e.parent)});
        if (e.discriminator) {
            t.push_back({subject, Term::iri(vocab("discriminator")), Term::iri(ns + *e.discriminator)});
        }
        if (e.discriminator_value) {
            t.push_back({subject, Term::iri(vocab("discriminatorValue")), string_literal(*e.discriminator_value)});
        }
        for (const auto& p : e.data_properties) {
            const Term prop = Term::iri(ns + p.prop_id);
            t.push_back({prop, type, Term::iri(owl("DatatypeProperty"))});
            t.push_back({prop, Term::iri(vocab("concept")), string_literal(p.concept_id)});
            add_labels(doc, prop, p.labels);
            t.push_back({prop, Term::iri(rdfs("domain")), subject});
            t.push_back({prop, Term::iri(rdfs("range")), Term::iri(xsd(xsd_name(p.datatype)))});
            t.push_back({prop, Term::iri(vocab("datatype")), string_literal(std::string(to_string(p.datatype)))});
            t.push_back({prop, Term::iri(vocab("position")),
                         Term::literal(std::to_string(p.position), xsd("integer"))});
            if (p.primary_key) {
                t.push_back({prop, Term::iri(vocab("primaryKey")), Term::literal("true", xsd("boolean"))});
            }
        }
        for (const auto& p : e.object_properties) {
            const Term prop = Term::iri(ns + p.prop_id);
            t.push_back({prop, type, Term::iri(owl("ObjectProperty"))});
            t.push_back({prop, Term::iri(vocab("concept")), string_literal(p.concept_id)});
            add_labels(doc, prop, p.labels);
            t.push_back({prop, Term::iri(rdfs("domain")), subject});
            t.push_back({prop, Term::iri(rdfs("range")), Term::iri(ns + p.target)});
            t.push_back({prop, Term::iri(vocab("datatype")), string_literal(std::string(to_string(p.datatype)))});
            t.push_back({prop, Term::iri(vocab("position")),
                         Term::literal(std::to_string(p.position), xsd("integer"))});
        }
    }
    return turtle::write(doc, {knowledge_predicate_order()});
}

KnowledgeDataset parse_knowledge(std::string_view bytes) {
    const turtle::Document doc = turtle::parse(bytes);
    const auto k = doc.prefixes.find("k");
    if (k == doc.prefixes.end() || k->second.empty() || k->second.back() != '#') {
        parse_fail("knowledge dataset: missing 'k:' ontology namespace prefix");
    }
    const std::string ns = k->second;
    KnowledgeDataset dataset;
    dataset.ref = ref_from_iri(std::string_view(ns).substr(0, ns.size() - 1), ContentKind::Knowledge);

    const auto descriptions = describe(doc);
    const std::string type = rdf("type");
    const std::set<std::string> class_vocab{type, vocab("concept"), rdfs("label"), rdfs("subClassOf"),
                                            vocab("discriminator"), vocab("discriminatorValue")};
    const std::set<std::string> property_vocab{type, vocab("concept"), rdfs("label"), rdfs("domain"),
                                               rdfs("range"), vocab("datatype"), vocab("position"),
                                               vocab("primaryKey")};

    std::map<std::string, EType> etypes;
    struct PendingProperty {
        std::string domain;
        bool object = false;
        DataProperty data;
        ObjectProperty link;
    };
    std::vector<PendingProperty> properties;

    for (const auto& [subject, d] : descriptions) {
        const std::string where = "knowledge <" + subject + ">";
        if (subject == dataset.ref.iri()) {
            check_vocabulary(d, {vocab("usesLanguage")}, where);
            for (const auto& v : *d.all(vocab("usesLanguage"))) {
                if (v.kind != Term::Kind::Iri) parse_fail(where + ": ldv:usesLanguage must be an IRI");
                dataset.language_refs.push_back(ref_from_iri(v.value, ContentKind::Language));
            }
            continue;
        }
        const std::string id = local_name(Term::iri(subject), ns, where);
        const Term* kind = d.one(type, where);
        if (kind == nullptr) parse_fail(where + ": missing rdf:type");
        if (kind->kind == Term::Kind::Iri && kind->value == owl("Class")) {
            check_vocabulary(d, class_vocab, where);
            EType e;
            e.etype_id = id;
            e.concept_id = read_concept(d, where, "class");
            e.labels = read_labels(d, where);
            if (const Term* parent = d.one(rdfs("subClassOf"), where)) e.parent = local_name(*parent, ns, where);
            if (const Term* disc = d.one(vocab("discriminator"), where)) e.discriminator = local_name(*disc, ns, where);
            if (const Term* value = d.one(vocab("discriminatorValue"), where)) {
                e.discriminator_value = literal_value(*value, where);
            }
            etypes[id] = std::move(e);
        } else if (kind->kind == Term::Kind::Iri &&
                   (kind->value == owl("DatatypeProperty") || kind->value == owl("ObjectProperty"))) {
            check_vocabulary(d, property_vocab, where);
            PendingProperty p;
            p.object = kind->value == owl("ObjectProperty");
            const Term* domain = d.one(rdfs("domain"), where);
            const Term* range = d.one(rdfs("range"), where);
            if (domain == nullptr || range == nullptr) parse_fail(where + ": property needs rdfs:domain and rdfs:range");
            p.domain = local_name(*domain, ns, where);
            const std::string concept_id = read_concept(d, where, "property");
            const Datatype datatype = read_datatype(d, where);
            const std::size_t position = read_position(d, where);
            auto labels = read_labels(d, where);
            if (p.object) {
                if (d.all(vocab("primaryKey"))) parse_fail(where + ": object properties cannot be keys");
                p.link = ObjectProperty{id, concept_id, local_name(*range, ns, where), datatype, position, std::move(labels)};
            } else {
                if (range->kind != Term::Kind::Iri || range->value != xsd(xsd_name(datatype))) {
                    parse_fail(where + ": rdfs:range disagrees with ldv:datatype");
                }
                bool key = false;
                if (const Term* pk = d.one(vocab("primaryKey"), where)) {
                    if (pk->kind != Term::Kind::Literal || pk->datatype != xsd("boolean") ||
                        (pk->value != "true" && pk->value != "false")) {
                        parse_fail(where + ": bad ldv:primaryKey");
                    }
                    key = pk->value == "true";
                }
                p.data = DataProperty{id, concept_id, datatype, position, key, std::move(labels)};
            }
            properties.push_back(std::move(p));
        } else {
            parse_fail(where + ": unknown vocabulary term <" + kind->value + ">");
        }
    }
    for (auto& p : properties) {
        const auto it = etypes.find(p.domain);
        if (it == etypes.end()) parse_fail("knowledge: property domain '" + p.domain + "' is not a declared class");
        if (p.object) {
            it->second.object_properties.push_back(std::move(p.link));
        } else {
            it->second.data_properties.push_back(std::move(p.data));
        }
    }
    for (auto& [id, e] : etypes) dataset.etypes.push_back(std::move(e));
    dataset = canonicalize(std::move(dataset));
    require_valid(validate(dataset), "knowledge dataset " + dataset.ref.path());
    return dataset;
}

// ---------------------------------------------------------------------------
// Graph
// ---------------------------------------------------------------------------

namespace {

const std::vector<std::string>& graph_predicate_order() {
    static const std::vector<std::string> order{vocab("standardised"), vocab("language"), vocab("knowledge")};
    return order;
}

}  // namespace

std::string serialize_graph(const GraphDataset& input) {
    require_valid(validate(input), "graph dataset " + input.ref.path());
    const GraphDataset dataset = canonicalize(input);
    const std::string ns = term_namespace(dataset.composed_of.knowledge);

    turtle::Document doc;
    doc.prefixes["k"] = ns;
    doc.prefixes["ldv"] = std::string(kVocab);
    doc.prefixes["rdf"] = std::string(turtle::kRdf);
    doc.prefixes["xsd"] = std::string(turtle::kXsd);
    auto& t = doc.triples;
    const Term type = Term::iri(rdf("type"));
    const Term self = Term::iri(dataset.ref.iri());
    t.push_back({self, type, Term::iri(vocab("GraphDataset"))});
    t.push_back({self, Term::iri(vocab("standardised")), Term::iri(dataset.composed_of.standardised.iri())});
    t.push_back({self, Term::iri(vocab("language")), Term::iri(dataset.composed_of.language.iri())});
    t.push_back({self, Term::iri(vocab("knowledge")), Term::iri(dataset.composed_of.knowledge.iri())});

    for (const auto& e : dataset.entities) {
        const Term subject = Term::iri(e.iri);
        t.push_back({subject, type, Term::iri(ns + e.etype)});
        for (const auto& lit : e.literals) {
            t.push_back({subject, Term::iri(ns + lit.prop_id), Term::literal(lit.lexical, xsd(xsd_name(lit.datatype)))});
        }
        for (const auto& link : e.links) {
            t.push_back({subject, Term::iri(ns + link.prop_id), Term::iri(link.target)});
        }
    }
    return turtle::write(doc, {graph_predicate_order()});
}

namespace {

GraphHeader header_from(const std::map<std::string, Description>& descriptions) {
    const std::string type = rdf("type");
    const std::string* found = nullptr;
    for (const auto& [subject, d] : descriptions) {
        const auto* types = d.all(type);
        if (types == nullptr) continue;
        for (const auto& t : *types) {
            if (t.kind == Term::Kind::Iri && t.value == vocab("GraphDataset")) {
                if (found != nullptr) parse_fail("graph: more than one ldv:GraphDataset description");
                found = &subject;
            }
        }
    }
    if (found == nullptr) parse_fail("graph: missing ldv:GraphDataset description");
    const Description& d = descriptions.at(*found);
    const std::string where = "graph <" + *found + ">";
    check_vocabulary(d, {type, vocab("standardised"), vocab("language"), vocab("knowledge")}, where);
    if (d.all(type)->size() != 1) parse_fail(where + ": dataset description has extra types");
    GraphHeader header;
    header.ref = ref_from_iri(*found, ContentKind::Graph);
    auto comp = [&](const char* predicate, ContentKind kind) {
        const Term* t = d.one(vocab(predicate), where);
        if (t == nullptr || t->kind != Term::Kind::Iri) {
            parse_fail(where + ": composed_of needs exactly one ldv:" + predicate);
        }
        return ref_from_iri(t->value, kind);
    };
    header.composed_of.standardised = comp("standardised", ContentKind::Standardised);
    header.composed_of.language = comp("language", ContentKind::Language);
    header.composed_of.knowledge = comp("knowledge", ContentKind::Knowledge);
    return header;
}

}  // namespace

GraphHeader read_graph_header(std::string_view bytes) { return header_from(describe(turtle::parse(bytes))); }

GraphDataset parse_graph(std::string_view bytes, const KnowledgeDataset& knowledge) {
    const auto descriptions = describe(turtle::parse(bytes));
    const GraphHeader header = header_from(descriptions);
    if (!header.composed_of.knowledge.same_identity(knowledge.ref)) {
        throw Error(ErrorCode::Validation, "graph " + header.ref.path() + " is composed with knowledge " +
                                               header.composed_of.knowledge.path() + ", context is " +
                                               knowledge.ref.path());
    }
    const std::string ns = term_namespace(knowledge.ref);
    const std::string type = rdf("type");

    GraphDataset dataset;
    dataset.ref = header.ref;
    dataset.composed_of = header.composed_of;
    for (const auto& [subject, d] : descriptions) {
        if (subject == header.ref.iri()) continue;
        const std::string where = "graph entity <" + subject + ">";
        Entity entity;
        entity.iri = subject;
        const Term* t = d.one(type, where);
        if (t == nullptr) parse_fail(where + ": missing rdf:type");
        entity.etype = local_name(*t, ns, where);
        if (!knowledge.find(entity.etype)) parse_fail(where + ": EType '" + entity.etype + "' is not declared");
        for (const auto& [predicate, values] : d.values) {
            if (predicate == type) continue;
            if (!starts_with(predicate, ns)) parse_fail(where + ": predicate <" + predicate + "> is not declared");
            const std::string prop = predicate.substr(ns.size());
            if (const auto* dp = knowledge.find_data_property(prop)) {
                for (const auto& v : values) {
                    if (v.kind != Term::Kind::Literal || v.datatype != xsd(xsd_name(dp->datatype))) {
                        parse_fail(where + ": value of '" + prop + "' must be an xsd:" +
                                   std::string(xsd_name(dp->datatype)) + " literal");
                    }
                    entity.literals.push_back({prop, v.value, dp->datatype});
                }
            } else if (knowledge.find_object_property(prop) != nullptr) {
                for (const auto& v : values) {
                    if (v.kind != Term::Kind::Iri) parse_fail(where + ": value of '" + prop + "' must be an IRI");
                    entity.links.push_back({prop, v.value});
                }
            } else {
                parse_fail(where + ": predicate '" + prop + "' is not declared in " + knowledge.ref.path());
            }
        }
        dataset.entities.push_back(std::move(entity));
    }
    dataset = canonicalize(std::move(dataset));
    ValidationContext context;
    context.knowledge = &knowledge;
    require_valid(validate(dataset, context), "graph dataset " + dataset.ref.path());
    return dataset;
}

// ---------------------------------------------------------------------------
// Metadata
// ---------------------------------------------------------------------------

std::string serialize_metadata(const MetadataRecord& record) {
    require_valid(validate(record), "metadata record " + record.ref.path());
    MetadataRecord canonical = record;
    for (auto* list : {&canonical.links.composed_of, &canonical.links.uses_language, &canonical.links.derived_from}) {
        std::sort(list->begin(), list->end());
    }
    return dump(to_json(canonical));
}

MetadataRecord parse_metadata(std::string_view bytes) {
    MetadataRecord record = metadata_from_json(parse_json(bytes, "metadata"));
    for (auto* list : {&record.links.composed_of, &record.links.uses_language, &record.links.derived_from}) {
        std::sort(list->begin(), list->end());
    }
    require_valid(validate(record), "metadata record " + record.ref.path());
    return record;
}

// ---------------------------------------------------------------------------
// Any dataset
// ---------------------------------------------------------------------------

const DatasetRef& ref_of(const AnyDataset& dataset) {
    return std::visit([](const auto& d) -> const DatasetRef& { return d.ref; }, dataset);
}

std::string serialize(const AnyDataset& dataset) {
    struct Visitor {
        std::string operator()(const StandardisedDataset& d) const { return serialize_standardised(d); }
        std::string operator()(const LanguageDataset& d) const { return serialize_language(d); }
        std::string operator()(const KnowledgeDataset& d) const { return serialize_knowledge(d); }
        std::string operator()(const GraphDataset& d) const { return serialize_graph(d); }
    };
    return std::visit(Visitor{}, dataset);
}

std::string canonical_hash(const AnyDataset& dataset) { return sha256_hex(serialize(dataset)); }

std::string file_name(const DatasetRef& ref) {
    std::string_view ext;
    switch (ref.kind) {
        case ContentKind::Standardised: ext = "std.bundle"; break;
        case ContentKind::Language:
        case ContentKind::ExternalLanguage: ext = "lang.csv"; break;
        case ContentKind::Knowledge:
        case ContentKind::ExternalReference: ext = "onto.ttl"; break;
        case ContentKind::Graph: ext = "graph.ttl"; break;
        case ContentKind::LowQuality: ext = "csv"; break;
    }
    return ref.local_id + ".v" + std::to_string(ref.version) + "." + std::string(ext);
}

std::string_view media_type(ContentKind kind) noexcept {
    switch (kind) {
        case ContentKind::Standardised: return "application/vnd.livedata.standardised-bundle";
        case ContentKind::Language:
        case ContentKind::ExternalLanguage:
        case ContentKind::LowQuality: return "text/csv; charset=utf-8";
        case ContentKind::Knowledge:
        case ContentKind::ExternalReference:
        case ContentKind::Graph: return "text/turtle; charset=utf-8";
    }
    return "application/octet-stream";
}

}  // namespace livedata
