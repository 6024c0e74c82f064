#pragma once

#include "artist/errors.hpp"

namespace artist {

template <typename T>
T decode(const Json& j) {
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw MalformedInput(e.what());
  }
}

}  // namespace artist
