#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace levyspde {

using Engine = std::mt19937_64;

/// Stable sub-stream seed from (master, purpose, index). Independent of
/// evaluation order and worker count.
std::uint64_t derive_seed(std::uint64_t master, std::string_view purpose, std::uint64_t index = 0);

inline Engine make_engine(std::uint64_t master, std::string_view purpose, std::uint64_t index = 0) {
  return Engine(derive_seed(master, purpose, index));
}

}  // namespace levyspde
