#include "generator.hpp"

#include <random>
#include <set>

#include "livedata/util.hpp"

namespace testsupport {

using namespace livedata;

namespace {

class Gen {
  public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    std::size_t below(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
    bool chance(double p) { return std::bernoulli_distribution(p)(rng_); }
    template <typename T>
    const T& pick(const std::vector<T>& items) {
        return items[below(items.size())];
    }
    int between(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  private:
    std::mt19937_64 rng_;
};

const std::vector<std::string> kTableNames{"course", "professor", "department", "room", "student",
                                           "exam",   "building",  "lab",        "grant", "thesis"};
const std::vector<std::string> kWords{"alpha", "Beta", "gamma ray", "Università", "Улаанбаатар", "naïve",
                                      "x,y",   "say \"hi\"", "tab\there", "multi  space", "O'Brien", "日本語"};
const std::vector<std::string> kTags{"en", "it", "mn", "de", "pt-BR"};

std::string pad(Gen& g, std::string v) {
    if (g.chance(0.15)) v = "  " + v;
    if (g.chance(0.15)) v += " ";
    return v;
}

std::string raw_value(Gen& g, Datatype type) {
    switch (type) {
        case Datatype::String: {
            std::string v = g.pick(kWords);
            if (g.chance(0.5)) v += " " + std::to_string(g.between(0, 999));
            return v;
        }
        case Datatype::Identifier: return "v" + std::to_string(g.between(0, 50));
        case Datatype::Integer: {
            const int n = g.between(-500, 5000);
            std::string v = std::to_string(n);
            if (n >= 0 && g.chance(0.2)) v = "00" + v;
            if (n >= 0 && g.chance(0.2)) v = "+" + v;
            return v;
        }
        case Datatype::Decimal: {
            std::string v = std::to_string(g.between(0, 9999));
            if (g.chance(0.7)) v += "." + std::to_string(g.between(0, 99)) + (g.chance(0.3) ? "0" : "");
            if (g.chance(0.1)) v = "-" + v;
            return v;
        }
        case Datatype::Boolean: return g.pick(std::vector<std::string>{"yes", "No", "TRUE", "false", "1", "0"});
        case Datatype::Date: {
            const int y = g.between(1990, 2030), m = g.between(1, 12), d = g.between(1, 28);
            char buf[16];
            switch (g.below(3)) {
                case 0: std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", y, m, d); break;
                case 1: std::snprintf(buf, sizeof buf, "%04d/%02d/%02d", y, m, d); break;
                default: std::snprintf(buf, sizeof buf, "%02d/%02d/%04d", d, m, y); break;
            }
            return buf;
        }
    }
    return {};
}

std::string messy_header(Gen& g, const std::string& attribute) {
    std::string h;
    bool upper = true;
    for (char c : attribute) {
        if (c == '_') {
            h += g.chance(0.5) ? "  " : " ";
            upper = true;
        } else {
            h.push_back(upper && g.chance(0.6) ? static_cast<char>(std::toupper(static_cast<unsigned char>(c))) : c);
            upper = false;
        }
    }
    return pad(g, h);
}

std::string collapse(std::string_view text) {
    std::string out;
    bool pending = false;
    for (char c : text) {
        if (c == ' ') {
            pending = !out.empty();
            continue;
        }
        if (pending) out.push_back(' ');
        pending = false;
        out.push_back(c);
    }
    return out;
}

struct PlannedTable {
    TableMapping mapping;  // headers in cleaned form
    std::vector<std::string> raw_headers;
    bool keyed = false;
    std::vector<std::string> keys;  // primary key values
};

}  // namespace

GeneratedFixture generate_fixture(std::uint64_t seed) {
    Gen g(seed);
    GeneratedFixture out;
    out.seed = seed;
    out.node = {"gen-" + std::to_string(seed % 97), "Generated node", {{"en", "fixture node"}},
                "http://gen" + std::to_string(seed) + ".example/ld", "Fixture publisher"};
    out.config.dataset = "fx" + std::to_string(seed);
    out.config.version = static_cast<std::uint32_t>(1 + g.below(3));
    out.config.default_language_tag = g.pick(kTags);

    std::vector<std::string> names = kTableNames;
    const std::size_t table_count = 1 + g.below(4);
    std::vector<PlannedTable> planned;
    for (std::size_t t = 0; t < table_count; ++t) {
        const std::size_t idx = g.below(names.size());
        PlannedTable pt;
        pt.mapping.name = names[idx];
        names.erase(names.begin() + static_cast<std::ptrdiff_t>(idx));
        pt.mapping.source = out.config.dataset + "-raw-" + pt.mapping.name;

        const bool keyed = !g.chance(0.2);
        pt.keyed = keyed;
        if (keyed) pt.mapping.columns.push_back({"", pt.mapping.name + "_id", Datatype::Identifier, Role::PrimaryKey, ""});
        const std::vector<Datatype> types{Datatype::String, Datatype::Integer, Datatype::Decimal,
                                          Datatype::Boolean, Datatype::Date, Datatype::Identifier};
        const std::size_t plain = 1 + g.below(5);
        for (std::size_t c = 0; c < plain; ++c) {
            pt.mapping.columns.push_back({"", "attr_" + std::to_string(c) + (g.chance(0.3) ? "_extra" : ""),
                                          g.pick(types), Role::Plain, ""});
        }
        // Foreign keys to earlier keyed tables.
        for (const auto& other : planned) {
            if (other.keyed && g.chance(0.6)) {
                pt.mapping.columns.push_back({"", other.mapping.name + "_ref", Datatype::Identifier,
                                              Role::ForeignKey, other.mapping.name});
            }
        }
        if (g.chance(0.35)) {
            pt.mapping.columns.push_back({"", "kind", Datatype::String, Role::Plain, ""});
            SpecializationRule rule{pt.mapping.name, "kind", {}};
            for (const char* v : {"basic", "advanced"}) {
                const std::string child = std::string(v) + "_" + pt.mapping.name;
                rule.values[v] = {child, child};
                out.config.lexicon[child] = {{std::string(v) + " " + pt.mapping.name, out.config.default_language_tag,
                                              "a " + std::string(v) + " " + pt.mapping.name}};
            }
            out.config.specializations.push_back(rule);
        }
        // The mapping names headers as clean() leaves them; the raw file
        // keeps the padding.
        std::set<std::string> seen;
        for (auto& col : pt.mapping.columns) {
            std::string raw = messy_header(g, col.attribute);
            while (!seen.insert(collapse(raw)).second) raw += "x";
            col.header = collapse(raw);
            pt.raw_headers.push_back(raw);
        }

        const std::size_t rows = g.below(12);
        if (keyed) {
            std::set<std::string> used;
            while (pt.keys.size() < rows) {
                std::string key = g.pick(std::vector<std::string>{"k", "ü", "a/b", "r#", "id-"}) +
                                  std::to_string(g.between(0, 9999));
                if (used.insert(key).second) pt.keys.push_back(key);
            }
        }
        planned.push_back(std::move(pt));
    }

    for (std::size_t t = 0; t < planned.size(); ++t) {
        const auto& pt = planned[t];
        SourceDataset raw;
        raw.ref = {out.node.node_id, pt.mapping.source, 1, ContentKind::LowQuality};
        raw.provenance = "generated from seed " + std::to_string(seed);
        // Raw files carry text only, so empty fields are "" rather than null.
        // Mapped columns may be absent from the source; a missing column reads as null.
        std::vector<std::size_t> present;
        for (std::size_t c = 0; c < pt.mapping.columns.size(); ++c) {
            const bool droppable = pt.mapping.columns[c].role == Role::Plain &&
                                   pt.mapping.columns[c].attribute != "kind";
            if (!droppable || !g.chance(0.1)) present.push_back(c);
        }
        if (present.empty()) present.push_back(0);  // a file has at least one column
        // Shuffle header order; the mapping is by name.
        for (std::size_t i = present.size(); i > 1; --i) std::swap(present[i - 1], present[g.below(i)]);
        for (std::size_t c : present) raw.headers.push_back(pt.raw_headers[c]);

        const std::size_t rows = pt.keyed ? pt.keys.size() : g.below(12);
        for (std::size_t r = 0; r < rows; ++r) {
            Row row;
            for (std::size_t c : present) {
                const auto& col = pt.mapping.columns[c];
                if (col.role == Role::PrimaryKey) {
                    row.emplace_back(pad(g, pt.keys[r]));
                    continue;
                }
                if (g.chance(0.12)) {
                    row.emplace_back(g.pick(std::vector<std::string>{"", "", "NA", "-", "null", "N/A", " "}));
                    continue;
                }
                if (col.role == Role::ForeignKey) {
                    const auto& target = *std::find_if(planned.begin(), planned.end(), [&](const PlannedTable& p) {
                        return p.mapping.name == col.target;
                    });
                    row.emplace_back(target.keys.empty() ? std::string() : g.pick(target.keys));
                } else if (col.attribute == "kind") {
                    row.emplace_back(g.chance(0.5) ? "basic" : "advanced");
                } else {
                    row.emplace_back(pad(g, raw_value(g, col.datatype)));
                }
            }
            // Keyless tables may repeat rows.
            if (!pt.keyed && !raw.rows.empty() && g.chance(0.15)) row = raw.rows.back();
            raw.rows.push_back(std::move(row));
            if (g.chance(0.05)) raw.rows.emplace_back(raw.headers.size(), std::string());  // blank line
        }
        out.raw.push_back(std::move(raw));
        out.config.tables.push_back(pt.mapping);
    }

    // Lexicon for a random subset of concepts.
    std::set<std::string> concepts;
    for (const auto& t : out.config.tables) {
        concepts.insert(t.name);
        for (const auto& c : t.columns) concepts.insert(c.attribute);
    }
    for (const auto& c : concepts) {
        if (!g.chance(0.4)) continue;
        auto& lexs = out.config.lexicon[c];
        lexs.clear();
        std::vector<std::string> tags = kTags;
        const std::size_t n = 1 + g.below(3);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t at = g.below(tags.size());
            lexs.push_back({c + " (" + tags[at] + ")", tags[at], "gloss of " + c + ", in " + tags[at]});
            tags.erase(tags.begin() + static_cast<std::ptrdiff_t>(at));
        }
    }
    return out;
}

}  // namespace testsupport
