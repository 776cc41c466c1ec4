// correlation.hpp: sampled two-time correlation functions.

#pragma once

#include "rabisim/hilbert.hpp"

#include <string>
#include <vector>

namespace rabisim {

struct CorrelationTrace {
  std::vector<double> tau;   // increasing, nonnegative
  std::vector<cplx> values;  // C(tau), or g2(tau) with zero imaginary part
  std::vector<std::string> warnings;
};

}  // namespace rabisim
