#ifndef CDCA_UNITS_HPP
#define CDCA_UNITS_HPP

namespace cdca {

// Scenario files carry speeds in km/h; everything internal is SI (m, s).
constexpr double kmh_to_ms(double kmh) { return kmh / 3.6; }
constexpr double ms_to_kmh(double ms) { return ms * 3.6; }

}  // namespace cdca

#endif  // CDCA_UNITS_HPP
