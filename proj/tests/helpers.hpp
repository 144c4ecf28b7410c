#pragma once

#include <functional>
#include <string>

#include "doco/error.hpp"

// Runs f and returns the code of the thrown doco::Error, or "" if it did not
// throw one.
inline std::string thrown_code(const std::function<void()>& f) {
  try {
    f();
  } catch (const doco::Error& e) {
    return e.code();
  } catch (...) {
  }
  return "";
}
