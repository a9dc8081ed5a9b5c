#include "agm3/fixtures.hpp"

#include "agm3/rng.hpp"

namespace agm3 {

Quartic trott_quartic() {
    using E = std::array<int, 4>;
    HomogeneousForm f = HomogeneousForm::from_terms(
        3, 4,
        {
            {E{4, 0, 0, 0}, Cx(144)},
            {E{0, 4, 0, 0}, Cx(144)},
            {E{2, 0, 2, 0}, Cx(-225)},
            {E{0, 2, 2, 0}, Cx(-225)},
            {E{2, 2, 0, 0}, Cx(350)},
            {E{0, 0, 4, 0}, Cx(81)},
        });
    return Quartic::from_form(f);
}

Quartic random_quartic(std::uint64_t seed) {
    Rng rng(seed ^ 0x5eedba11UL);
    HomogeneousForm f(3, 4);
    for (int i = 0; i < f.coeffs.size(); ++i) f.coeffs(i) = Cx(rng.next_symmetric(), 0.0);
    return Quartic::from_form(f);
}

HomogeneousForm random_cubic(std::uint64_t seed) {
    Rng rng(seed ^ 0xcb1c5eedUL);
    HomogeneousForm f(3, 3);
    for (int i = 0; i < f.coeffs.size(); ++i) f.coeffs(i) = Cx(rng.next_symmetric(), 0.0);
    return f.normalized();
}

}  // namespace agm3
