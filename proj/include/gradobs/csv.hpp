#pragma once

#include <string>

namespace gradobs {

/// Fixed "%.17g" rendering so identical runs emit identical bytes.
std::string csv_double(double v);

}  // namespace gradobs
