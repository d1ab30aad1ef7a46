#pragma once

#include <cmath>

namespace oi {

// Centralized dB/dBm conversions so every module agrees on units.

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

inline double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }

// Amplitude scale factor for a power gain given in dB.
inline double db_to_amplitude(double db) { return std::pow(10.0, db / 20.0); }

inline double kmph_to_mps(double kmph) { return kmph * (1000.0 / 3600.0); }

}  // namespace oi
