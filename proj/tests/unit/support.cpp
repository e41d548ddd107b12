#include "support.hpp"

#include <map>

namespace pmpo::testing {

const Irreducibles& irreducibles(const std::string& spec) {
  static std::map<std::string, Irreducibles> cache;
  auto it = cache.find(spec);
  if (it == cache.end()) it = cache.emplace(spec, discover_irreducibles(build_from_spec(spec))).first;
  return it->second;
}

}  // namespace pmpo::testing
