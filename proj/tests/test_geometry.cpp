#include "doctest.h"
#include "eadrsim/geometry.hpp"

using namespace eadrsim;

TEST_SUITE("geometry") {

TEST_CASE("default geometry shape") {
  const CacheGeometry g = CacheGeometry::default_geometry();
  g.validate();
  REQUIRE(g.levels.size() == 3);
  CHECK(g.levels[0].partitions == 8);
  CHECK(g.levels[0].lines_per_partition() == 2048);   // 128 KiB / 64
  CHECK(g.levels[0].sets() == 1024);
  CHECK(g.levels[1].sets() == 2048);                  // 1 MiB / (64*8)
  CHECK(g.levels[2].sets() == 4096);                  // 2 MiB / (64*8)
  CHECK(g.total_lines() == 65536);                    // 16384 + 16384 + 32768
  CHECK(g.total_bytes() == 4ull << 20);
}

TEST_CASE("level bases and slot ids") {
  const CacheGeometry g = CacheGeometry::default_geometry();
  CHECK(g.level_base(0) == 0);
  CHECK(g.level_base(1) == 16384);
  CHECK(g.level_base(2) == 32768);

  // Hand-computed: base + partition*2048 + set*assoc + way.
  CHECK(g.slot_id(0, 0, 0, 0) == 0);
  CHECK(g.slot_id(0, 3, 5, 1) == 3 * 2048 + 5 * 2 + 1);  // 6155
  CHECK(g.slot_id(0, 7, 1023, 1) == 16383);              // last L1 slot
  CHECK(g.slot_id(1, 0, 0, 0) == 16384);
  CHECK(g.slot_id(2, 0, 4095, 7) == 65535);              // last slot overall
}

TEST_CASE("set index wraps at the level's set count") {
  const CacheGeometry g = CacheGeometry::default_geometry();
  CHECK(g.set_of(0, 0) == 0);
  CHECK(g.set_of(0, 64) == 1);
  CHECK(g.set_of(0, 1024 * 64) == 0);       // L1 wraps after 1024 lines
  CHECK(g.set_of(1, 2048 * 64) == 0);       // L2 after 2048
  CHECK(g.set_of(2, 4096 * 64) == 0);       // L3 after 4096
  CHECK(g.set_of(2, 4097 * 64) == 1);
}

TEST_CASE("validate rejects degenerate shapes") {
  CacheGeometry g;
  CHECK_THROWS_AS(g.validate(), ConfigError);  // no levels

  g.levels = {{4096, 2, 1}, {8192, 2, 2}};
  CHECK_THROWS_AS(g.validate(), ConfigError);  // partitioned outer level

  g.levels = {{4096, 0, 1}};
  CHECK_THROWS_AS(g.validate(), ConfigError);  // zero assoc

  g.levels = {{4096, 2, 0}};
  CHECK_THROWS_AS(g.validate(), ConfigError);  // zero partitions

  g.levels = {{100, 2, 1}};
  CHECK_THROWS_AS(g.validate(), ConfigError);  // not a multiple of assoc*line

  g.levels = {{64 * 2 * 3, 2, 1}};
  CHECK_THROWS_AS(g.validate(), ConfigError);  // 3 sets: not a power of two

  g.levels = {{4096, 2, 4}, {8192, 4, 1}};
  CHECK_NOTHROW(g.validate());
}

}  // TEST_SUITE
