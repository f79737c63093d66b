#pragma once

#include "mixgp/check_suite.hpp"
#include "mixgp/complex_linalg.hpp"
#include "mixgp/config.hpp"
#include "mixgp/geometric_phase.hpp"
#include "mixgp/interferometer.hpp"
#include "mixgp/nmr_readout.hpp"
#include "mixgp/purification.hpp"
#include "mixgp/spin_dynamics.hpp"
#include "mixgp/sweep.hpp"

namespace mixgp {
inline constexpr const char* kVersion = "1.0.0";
}
