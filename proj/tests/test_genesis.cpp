#include <doctest.h>

TEST_CASE("placeholder_genesis") { CHECK(true); }
