#pragma once

#include <string>

#include "mixlearn/density.hpp"

namespace mixlearn {

// Decimal text for a double that parses back to the identical bits
// (up to 17 significant digits, locale-independent).
std::string format_double(double x);

// JSON document for a density. Schema, with fixed field names:
//   {"type":"gaussian","mean":[...],"cov":[[...],...]}
//   {"type":"axis_aligned_gaussian","mean":[...],"var":[...]}
//   {"type":"mixture","weights":[...],"components":[...]}
//   {"type":"histogram1d","left":a,"right":b,"masses":[...]}
// Any node may carry an optional "label" string; it survives a round trip.
std::string serialize(const Density& density);

// Parses the schema above. Malformed text or an invariant violation raises
// an input error naming the position (byte offset or field path).
Density deserialize(const std::string& text);
Density deserialize_file(const std::string& path);

// Point-list text: one point per line, coordinates space-separated,
// '#' starts a comment line. Blank lines are ignored on input.
std::string points_to_text(const SampleSet& sample);
SampleSet parse_points_text(const std::string& text);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace mixlearn
