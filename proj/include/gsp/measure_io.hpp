#pragma once

#include <string>

#include "gsp/spectral_measure.hpp"

namespace gsp {

// Versioned measure declaration schema (schema_version 1), lossless round-trip.
// {
//   "schema_version": 1,
//   "domain": "integer" | "continuous",
//   "atoms": [[location, mass], ...],
//   "segments": [{"support": [a, b|"inf"], "form": "...", "params": {...}}],
//   "normalize": true|false,
//   "delta": number,                      // declared delta with m_delta < inf (0 = none)
//   "ac_floor": {"interval": [lo, hi], "nu": x}   // optional
// }
std::string measure_to_json(const SpectralMeasure& m);
SpectralMeasure measure_from_json(const std::string& text);
SpectralMeasure measure_from_file(const std::string& path);

}  // namespace gsp
