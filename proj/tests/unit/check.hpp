#pragma once

#include <doctest.h>

#include "hintkit/error.hpp"

// Checks that `expr` throws hintkit::Error of the given kind.
#define CHECK_ERROR_KIND(expr, expected_kind)                                   \
  do {                                                                          \
    bool hintkit_thrown_ = false;                                               \
    try {                                                                       \
      (void)(expr);                                                             \
    } catch (const ::hintkit::Error& e) {                                       \
      hintkit_thrown_ = true;                                                   \
      CHECK_MESSAGE(e.kind() == (expected_kind), e.what());                     \
    }                                                                           \
    CHECK_MESSAGE(hintkit_thrown_, "expected " #expected_kind " from " #expr); \
  } while (false)
