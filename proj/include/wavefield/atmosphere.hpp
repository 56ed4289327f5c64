#pragma once

#include <cstddef>
#include <vector>

namespace wavefield {

/// Reference constants of the ISO 9613-1 absorption model.
namespace iso {
inline constexpr double kReferenceTemperatureK = 293.15;  // T0
inline constexpr double kTriplePointK = 273.16;           // T01
inline constexpr double kReferencePressureKPa = 101.325;  // p_s0, also used as p_r
inline constexpr double kReferenceSpeedOfSound = 343.2;   // m/s at T0
}  // namespace iso

/// State of the propagation medium.
///
/// Relative humidity is a fraction in [0, 1]; it is converted to the percent
/// scale of ISO 9613-1 when the molar concentration of water vapor is formed.
class Atmosphere {
 public:
  /// 20 C, 1 atm, 50 % relative humidity.
  Atmosphere() = default;
  Atmosphere(double temperature_k, double pressure_kpa, double relative_humidity);

  static Atmosphere from_celsius(double temperature_c, double pressure_kpa, double relative_humidity);

  double temperature_k() const noexcept { return temperature_k_; }
  double temperature_c() const noexcept { return temperature_k_ - 273.15; }
  double pressure_kpa() const noexcept { return pressure_kpa_; }
  double relative_humidity() const noexcept { return relative_humidity_; }

  friend bool operator==(const Atmosphere&, const Atmosphere&) = default;

 private:
  double temperature_k_ = iso::kReferenceTemperatureK;
  double pressure_kpa_ = iso::kReferencePressureKPa;
  double relative_humidity_ = 0.5;
};

/// c = 343.2 * sqrt(T / 293.15), in m/s.
double speed_of_sound(const Atmosphere& atm);

/// Saturation vapor pressure of water in kPa.
double saturation_pressure(const Atmosphere& atm);

/// Molar concentration of water vapor, in percent (the ISO 9613-1 scale).
double water_vapor_molar_concentration(const Atmosphere& atm);

double oxygen_relaxation_frequency(const Atmosphere& atm);
double nitrogen_relaxation_frequency(const Atmosphere& atm);

/// The three additive parts of the absorption coefficient, all in dB/m.
struct AbsorptionTerms {
  double classical = 0.0;
  double oxygen = 0.0;
  double nitrogen = 0.0;

  double total() const noexcept { return classical + oxygen + nitrogen; }
};

AbsorptionTerms absorption_terms(double frequency_hz, const Atmosphere& atm);

/// Pure-tone atmospheric absorption coefficient in dB/m.
double absorption_coefficient(double frequency_hz, const Atmosphere& atm);

/// Absorption at `n_bins` uniformly spaced frequencies covering [0, sample_rate/2].
std::vector<double> absorption_spectrum(double sample_rate, std::size_t n_bins, const Atmosphere& atm);

}  // namespace wavefield
