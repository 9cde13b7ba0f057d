#pragma once

#include "streamstab/errors.hpp"

#include <doctest.h>

/// Error code thrown by fn; fails the test if nothing is thrown.
template <typename F>
streamstab::ErrorCode code_of(F&& fn) {
  try {
    fn();
  } catch (const streamstab::Error& e) {
    return e.code();
  }
  FAIL("expected streamstab::Error");
  return streamstab::ErrorCode::IoError;
}
