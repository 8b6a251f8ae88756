#include <doctest.h>

TEST_CASE("placeholder_experience") { CHECK(true); }
