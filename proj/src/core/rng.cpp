#include "lcbsim/rng.hpp"

#include "lcbsim/geozone.hpp"

namespace lcb {

std::uint64_t substream_seed(std::uint64_t seed, std::string_view name) {
  return splitmix64(seed ^ fnv1a_64(name));
}

}  // namespace lcb
