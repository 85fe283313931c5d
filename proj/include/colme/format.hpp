#pragma once

#include <string>

namespace colme {

// Shortest decimal form that reads back to the same double; "inf"/"-inf"/"nan" otherwise.
std::string format_real(double v);

}  // namespace colme
