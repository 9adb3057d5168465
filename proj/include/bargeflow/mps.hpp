#pragma once

#include <iosfwd>
#include <string>

#include "bargeflow/extensive_form.hpp"

namespace bargeflow {

// MPS with fixed-column names (rows R0000001.., columns C0000001.., objective
// OBJ) and full-precision numbers, so a write/read cycle reproduces every
// coefficient bit for bit. Binaries sit between INTORG/INTEND markers and
// every non-default bound is written explicitly.
void write_mps(const MilpModel& model, std::ostream& out,
               const std::string& name = "BARGEFLOW");
void write_mps(const MilpModel& model, const std::string& path,
               const std::string& name = "BARGEFLOW");

// Reads the subset written above. Entries come back in canonical order.
// Throws InvalidInput with a line number on malformed content.
MilpModel read_mps(std::istream& in);
MilpModel read_mps(const std::string& path);

}  // namespace bargeflow
