#pragma once

#include "fmreg/grid.hpp"

namespace fmreg::detail {

/// In-place unnormalized 2D DFT. Forward uses exp(-j...), inverse exp(+j...).
void fft2(ComplexGrid& data, bool inverse);

}  // namespace fmreg::detail
