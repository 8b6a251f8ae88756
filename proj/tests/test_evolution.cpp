#include <doctest.h>

TEST_CASE("placeholder_evolution") { CHECK(true); }
