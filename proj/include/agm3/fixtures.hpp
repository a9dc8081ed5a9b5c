#ifndef AGM3_FIXTURES_HPP
#define AGM3_FIXTURES_HPP

#include "agm3/quartic.hpp"

namespace agm3 {

/// The classical quartic with 28 real bitangents:
/// 144(x^4+y^4) - 225(x^2+y^2)z^2 + 350x^2y^2 + 81z^4.
Quartic trott_quartic();

/// Random real-coefficient quartic, entries uniform in [-1, 1]; generically
/// smooth (the bitangent count check rejects the exceptions).
Quartic random_quartic(std::uint64_t seed);

/// Random smooth plane cubic with the same sampling.
HomogeneousForm random_cubic(std::uint64_t seed);

}  // namespace agm3

#endif
