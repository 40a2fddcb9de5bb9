#pragma once

#include <string>
#include <string_view>

#include "faircurtail/network.hpp"

namespace faircurtail {

// Reads the MATPOWER case subset: baseMVA scalar plus bus/branch matrices
// (a gen matrix is tolerated and ignored; slack placement comes from the
// bus type column).  Bus numbers may be arbitrary; they are renumbered to
// contiguous internal indices in file order.  Throws ParseError with the
// line number on malformed input and ValidationError on bad structure.
Network parse_matpower(std::string_view text);

// Inverse of parse_matpower up to formatting: parsing the result yields an
// identical Network.
std::string serialize_matpower(const Network& net, const std::string& name = "case");

// Convenience file loader.
Network load_case(const std::string& path);

}  // namespace faircurtail
