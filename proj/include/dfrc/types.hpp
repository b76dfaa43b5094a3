#pragma once

#include <complex>
#include <cstdint>
#include <vector>

namespace dfrc {

using cxd = std::complex<double>;
using BitVec = std::vector<std::uint8_t>;

}  // namespace dfrc
