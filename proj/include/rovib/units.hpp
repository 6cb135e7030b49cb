#pragma once

// Unit handling at I/O boundaries. Everything inside the library is in
// atomic units (hartree, bohr, electron masses).

#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>

namespace rovib::units {

// CODATA 2018
inline constexpr double kHartreeToWavenumber = 219474.6313632;   // cm^-1
inline constexpr double kHartreeToHertz = 6.579683920502e15;
inline constexpr double kAmuToElectronMass = 1822.888486209;
inline constexpr double kBohrToAngstrom = 0.529177210903;
inline constexpr double kAtomicFieldToVoltPerMeter = 5.14220674763e11;

enum class Dimension { energy, length, mass, field };

enum class Unit {
  hartree,
  wavenumber,
  kilohertz,
  bohr,
  angstrom,
  amu,
  electron_mass,
  gv_per_cm,
  atomic_field,
};

struct UnitInfo {
  Dimension dimension;
  double to_atomic;  // multiply a value in this unit to get atomic units
};

constexpr UnitInfo info(Unit u) {
  switch (u) {
    case Unit::hartree: return {Dimension::energy, 1.0};
    case Unit::wavenumber: return {Dimension::energy, 1.0 / kHartreeToWavenumber};
    case Unit::kilohertz: return {Dimension::energy, 1.0e3 / kHartreeToHertz};
    case Unit::bohr: return {Dimension::length, 1.0};
    case Unit::angstrom: return {Dimension::length, 1.0 / kBohrToAngstrom};
    case Unit::amu: return {Dimension::mass, kAmuToElectronMass};
    case Unit::electron_mass: return {Dimension::mass, 1.0};
    // 1 GV/cm = 1e11 V/m
    case Unit::gv_per_cm: return {Dimension::field, 1.0e11 / kAtomicFieldToVoltPerMeter};
    case Unit::atomic_field: return {Dimension::field, 1.0};
  }
  return {Dimension::energy, 1.0};
}

inline Unit parse_unit(std::string_view name) {
  if (name == "hartree" || name == "Eh") return Unit::hartree;
  if (name == "cm-1" || name == "cm^-1" || name == "wavenumber") return Unit::wavenumber;
  if (name == "kHz") return Unit::kilohertz;
  if (name == "bohr") return Unit::bohr;
  if (name == "angstrom") return Unit::angstrom;
  if (name == "amu" || name == "u") return Unit::amu;
  if (name == "me" || name == "a.u.-mass") return Unit::electron_mass;
  if (name == "GV/cm") return Unit::gv_per_cm;
  if (name == "au_field") return Unit::atomic_field;
  throw std::invalid_argument("unknown unit '" + std::string(name) + "'");
}

inline double convert(double value, Unit from, Unit to) {
  const auto a = info(from);
  const auto b = info(to);
  if (a.dimension != b.dimension) {
    throw std::invalid_argument("incompatible units in conversion");
  }
  if (from == to) return value;
  return value * a.to_atomic / b.to_atomic;
}

inline double convert(double value, std::string_view from, std::string_view to) {
  return convert(value, parse_unit(from), parse_unit(to));
}

inline double wavenumber_to_hartree(double cm) { return cm / kHartreeToWavenumber; }
inline double hartree_to_wavenumber(double eh) { return eh * kHartreeToWavenumber; }
inline double amu_to_me(double amu) { return amu * kAmuToElectronMass; }

}  // namespace rovib::units
