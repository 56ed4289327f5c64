#include "wavefield/atmosphere.hpp"

#include <cmath>
#include <string>

#include "wavefield/error.hpp"

namespace wavefield {

Atmosphere::Atmosphere(double temperature_k, double pressure_kpa, double relative_humidity)
    : temperature_k_(temperature_k), pressure_kpa_(pressure_kpa), relative_humidity_(relative_humidity) {
  if (!(std::isfinite(temperature_k) && temperature_k > 0.0)) {
    throw InvalidArgument("temperature must be positive, got " + std::to_string(temperature_k) + " K");
  }
  if (!(std::isfinite(pressure_kpa) && pressure_kpa > 0.0)) {
    throw InvalidArgument("pressure must be positive, got " + std::to_string(pressure_kpa) + " kPa");
  }
  if (!(relative_humidity >= 0.0 && relative_humidity <= 1.0)) {
    throw InvalidArgument("relative humidity must lie in [0, 1], got " + std::to_string(relative_humidity));
  }
}

Atmosphere Atmosphere::from_celsius(double temperature_c, double pressure_kpa, double relative_humidity) {
  return Atmosphere(temperature_c + 273.15, pressure_kpa, relative_humidity);
}

double speed_of_sound(const Atmosphere& atm) {
  return iso::kReferenceSpeedOfSound * std::sqrt(atm.temperature_k() / iso::kReferenceTemperatureK);
}

double saturation_pressure(const Atmosphere& atm) {
  const double exponent = -6.8346 * std::pow(iso::kTriplePointK / atm.temperature_k(), 1.261) + 4.6151;
  return iso::kReferencePressureKPa * std::pow(10.0, exponent);
}

double water_vapor_molar_concentration(const Atmosphere& atm) {
  return 100.0 * atm.relative_humidity() * saturation_pressure(atm) / atm.pressure_kpa();
}

double oxygen_relaxation_frequency(const Atmosphere& atm) {
  const double h = water_vapor_molar_concentration(atm);
  const double pressure_ratio = atm.pressure_kpa() / iso::kReferencePressureKPa;
  return pressure_ratio * (24.0 + 4.04e4 * h * (0.02 + h) / (0.391 + h));
}

double nitrogen_relaxation_frequency(const Atmosphere& atm) {
  const double h = water_vapor_molar_concentration(atm);
  const double pressure_ratio = atm.pressure_kpa() / iso::kReferencePressureKPa;
  const double t_rel = atm.temperature_k() / iso::kReferenceTemperatureK;
  return pressure_ratio / std::sqrt(t_rel) *
         (9.0 + 280.0 * h * std::exp(-4.170 * (std::pow(t_rel, -1.0 / 3.0) - 1.0)));
}

AbsorptionTerms absorption_terms(double frequency_hz, const Atmosphere& atm) {
  const double t = atm.temperature_k();
  const double t_rel = t / iso::kReferenceTemperatureK;
  const double f2 = frequency_hz * frequency_hz;
  const double fr_o = oxygen_relaxation_frequency(atm);
  const double fr_n = nitrogen_relaxation_frequency(atm);
  const double relax_scale = std::pow(t_rel, -2.5);

  AbsorptionTerms terms;
  terms.classical =
      8.686 * f2 * 1.84e-11 * (iso::kReferencePressureKPa / atm.pressure_kpa()) * std::sqrt(t_rel);
  terms.oxygen = 8.686 * f2 * relax_scale * 0.01275 * std::exp(-2239.1 / t) / (fr_o + f2 / fr_o);
  terms.nitrogen = 8.686 * f2 * relax_scale * 0.1068 * std::exp(-3352.0 / t) / (fr_n + f2 / fr_n);
  return terms;
}

double absorption_coefficient(double frequency_hz, const Atmosphere& atm) {
  return absorption_terms(frequency_hz, atm).total();
}

std::vector<double> absorption_spectrum(double sample_rate, std::size_t n_bins, const Atmosphere& atm) {
  if (n_bins < 2) throw InvalidArgument("absorption spectrum needs at least 2 bins");
  if (!(sample_rate > 0.0)) throw InvalidArgument("sample rate must be positive");
  std::vector<double> alpha(n_bins);
  const double nyquist = 0.5 * sample_rate;
  const double last = static_cast<double>(n_bins - 1);
  for (std::size_t k = 0; k < n_bins; ++k) {
    // k/last keeps shared bins of an n- and (2n-1)-point grid bit-identical.
    alpha[k] = absorption_coefficient(nyquist * (static_cast<double>(k) / last), atm);
  }
  return alpha;
}

}  // namespace wavefield
