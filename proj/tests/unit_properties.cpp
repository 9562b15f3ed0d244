#include <catch_amalgamated.hpp>

#include "property_suite.hpp"

namespace {

void require(const props::Verdict& v) {
  INFO(v.failure);
  REQUIRE(v.checked > 0);
  REQUIRE(v.ok);
}

}  // namespace

TEST_CASE("complexity is subadditive and above the periodic window", "[properties]") { require(props::complexity_properties()); }

TEST_CASE("incidence matrices are anti-multiplicative under composition", "[properties]") {
  require(props::incidence_composition());
}

TEST_CASE("eventual kernels stabilize within the dimension", "[properties]") { require(props::kernel_stabilization()); }

TEST_CASE("traces are well defined on the direct limit", "[properties]") { require(props::trace_well_defined()); }

TEST_CASE("restriction inverts extension by zero", "[properties]") { require(props::restriction_roundtrip()); }
