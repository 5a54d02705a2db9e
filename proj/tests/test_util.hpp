#pragma once

#include <catch2/catch_amalgamated.hpp>

#include "emden/errors.hpp"

// Runs f, which must throw emden::Error, and checks the code.
template <typename F>
void require_error(emden::ErrorCode expected, F&& f) {
  try {
    f();
  } catch (const emden::Error& e) {
    INFO(e.what() << (e.context().empty() ? "" : " [" + e.context() + "]"));
    REQUIRE(emden::to_string(e.code()) == std::string(emden::to_string(expected)));
    return;
  }
  FAIL("expected an error, none was thrown");
}

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
