#include "ltlzinc/rng.hpp"

#include "hashing.hpp"

namespace ltlzinc {

std::size_t Rng::uniform_index(std::size_t n) {
  // Rejection sampling on the top of the range keeps draws unbiased.
  const std::uint64_t bound = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
  std::uint64_t x;
  do {
    x = next();
  } while (x >= limit);
  return static_cast<std::size_t>(x % bound);
}

std::uint64_t derive_seed(std::uint64_t master,
                          std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = detail::mix(master);
  for (std::uint64_t p : path) h = detail::mix(h, p);
  return h;
}

std::uint64_t tag_of(std::string_view text) { return detail::fnv1a(text); }

}  // namespace ltlzinc
