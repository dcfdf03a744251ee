#pragma once

#include <string>

#include "metatele/sensor.hpp"
#include "metatele/system_geometry.hpp"

namespace metatele {

// JSON configuration files carry explicit units in their key names
// (f1_mm, lambda0_nm, ...); everything converts to SI on load.
SystemGeometry load_geometry(const std::string& path);
void save_geometry(const std::string& path, const SystemGeometry& geom);

SensorModel load_sensor(const std::string& path);
void save_sensor(const std::string& path, const SensorModel& sensor);

// The prototype configuration: f1 = 7.5 mm objective (5 mm aperture),
// quadratic f = -2 mm eyepiece behind a 0.8 mm stop, separations solving
// EFL = 30 mm with TTL = 13.2 mm, design wavelength 532 nm.
SystemGeometry production_geometry();

// Same geometry with the optimized even-order polynomial eyepiece.
SystemGeometry production_geometry_polynomial();

// The optimized polynomial coefficients (mm-based radius units).
std::array<double, 7> production_polynomial_coeffs();

}  // namespace metatele
