#include "doctest.h"

#include "livedata/csv.hpp"
#include "livedata/error.hpp"
#include "livedata/turtle.hpp"
#include "livedata/util.hpp"

using namespace livedata;

TEST_CASE("sha256 of known inputs") {
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("timestamps are UTC with a Z suffix") {
    const auto t = parse_timestamp("2024-03-01T12:00:00Z");
    CHECK(format_timestamp(t) == "2024-03-01T12:00:00Z");
    CHECK_THROWS_AS(parse_timestamp("2024-03-01 12:00:00"), Error);
    CHECK_THROWS_AS(parse_timestamp("2024-02-30T00:00:00Z"), Error);
}

TEST_CASE("percent encoding round-trips") {
    CHECK(percent_encode("a b/c") == "a%20b%2Fc");
    CHECK(percent_encode("c-1_x.y~") == "c-1_x.y~");
    CHECK(percent_decode(percent_encode("ü/?&=")) == "ü/?&=");
    CHECK(random_hex(8).size() == 16);
    CHECK(random_hex(8) != random_hex(8));
}

TEST_CASE("csv distinguishes null from empty and handles quoting") {
    const auto records = csv::parse("a,b,c\r\n1,,\"\"\r\n\"x,\"\"y\"\"\nz\",2,3");
    REQUIRE(records.size() == 3);
    CHECK_FALSE(records[1][1].has_value());
    CHECK(records[1][2] == Cell(""));
    CHECK(records[2][0] == Cell("x,\"y\"\nz"));
    CHECK(csv::format_record(records[1]) == "1,,\"\"\n");
    CHECK(csv::parse(csv::format_record(records[2])).at(0) == records[2]);
    CHECK_THROWS_AS(csv::parse("a,\"b\n"), Error);
    CHECK_THROWS_AS(csv::parse("a,\"b\"c\n"), Error);
}

TEST_CASE("turtle writer is canonical and the parser reads it back") {
    const std::string text =
        "@prefix ex: <http://ex.example/> .\n"
        "# comment\n"
        "ex:b ex:p \"two\"@en , \"1\"^^<http://www.w3.org/2001/XMLSchema#integer> ;\n"
        "  a ex:C .\n"
        "<http://ex.example/a> ex:p \"say \\\"hi\\\"\\n\" .\n";
    const auto doc = turtle::parse(text);
    CHECK(doc.triples.size() == 4);
    const std::string written = turtle::write(doc);
    const auto again = turtle::parse(written);
    CHECK(again.triples == doc.triples);
    CHECK(turtle::write(again) == written);
    CHECK(written.find("ex:a") < written.find("ex:b"));
    CHECK_THROWS_AS(turtle::parse("ex:a ex:p ex:b ."), Error);
    CHECK_THROWS_AS(turtle::parse("<http://x> <http://p> \"open ."), Error);
}
