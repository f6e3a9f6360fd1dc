#include <gtest/gtest.h>

#include "qhub/config.hpp"
#include "qhub/error.hpp"

using namespace qhub;

TEST(Config, DefaultsMatchTheSeason) {
    const HubConfig cfg;
    EXPECT_EQ(cfg.season_start, make_date(2021, 10, 27));
    EXPECT_EQ(cfg.season_end, make_date(2022, 2, 9));
    EXPECT_EQ(cfg.dax_window, 1000);
    EXPECT_EQ(cfg.skip_allowance, 2);
}

TEST(Config, ParsesKeyValues) {
    const auto cfg = parse_config(
        "# comment\n"
        "station_id = 10382\n"
        "station_cutover = 2021-07-01\n"
        "seed = 7\n"
        "\n"
        "dax_window=500\n"
        "allow_cross_cutover_training = yes\n");
    EXPECT_EQ(cfg.station_id, "10382");
    EXPECT_EQ(cfg.station_cutover, make_date(2021, 7, 1));
    EXPECT_EQ(cfg.seed, 7u);
    EXPECT_EQ(cfg.dax_window, 500);
    EXPECT_TRUE(cfg.allow_cross_cutover_training);
}

TEST(Config, RoundTrips) {
    HubConfig cfg;
    cfg.station_cutover = make_date(2020, 1, 1);
    cfg.seed = 123456789012345ULL;
    EXPECT_EQ(parse_config(serialize_config(cfg)), cfg);
}

TEST(Config, ErrorsCarryLineNumbers) {
    try {
        parse_config("seed = 1\nbogus = 2\n");
        FAIL();
    } catch (const InputError& e) {
        EXPECT_EQ(e.line(), 2);
    }
    EXPECT_THROW(parse_config("seed = -1\n"), InputError);
    EXPECT_THROW(parse_config("season_start = 2022-03-01\n"), InputError);
    EXPECT_THROW(parse_config("station_cutover = soon\n"), InputError);
    EXPECT_THROW(parse_config("just text\n"), InputError);
}
