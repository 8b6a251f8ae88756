#include <doctest.h>

TEST_CASE("placeholder_planner") { CHECK(true); }
