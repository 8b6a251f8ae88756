#include <doctest.h>

TEST_CASE("placeholder_navigation") { CHECK(true); }
