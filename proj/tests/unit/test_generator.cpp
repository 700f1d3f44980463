#include "doctest.h"

#include "generator.hpp"
#include "livedata/pipeline.hpp"

using namespace livedata;

TEST_CASE("generated fixtures are reproducible and run through the pipeline") {
    CHECK(testsupport::generate_fixture(7).raw == testsupport::generate_fixture(7).raw);
    CHECK(testsupport::generate_fixture(7).config == testsupport::generate_fixture(7).config);
    std::size_t specialised = 0, keyless = 0, foreign = 0, empty = 0;
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        CAPTURE(seed);
        const auto fx = testsupport::generate_fixture(seed);
        PipelineOutput out;
        CHECK_NOTHROW(out = run_pipeline(fx.raw, fx.config, fx.node));
        specialised += fx.config.specializations.empty() ? 0 : 1;
        for (const auto& t : out.standardised.tables) {
            keyless += t.primary_key() ? 0 : 1;
            empty += t.rows.empty() ? 1 : 0;
            for (const auto& c : t.columns) foreign += c.role == Role::ForeignKey ? 1 : 0;
        }
    }
    // The generator has to reach the interesting shapes.
    CHECK(specialised > 5);
    CHECK(keyless > 5);
    CHECK(foreign > 5);
    CHECK(empty > 0);
}
