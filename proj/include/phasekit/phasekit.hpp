#pragma once

#include "config.hpp"
#include "dilation.hpp"
#include "fock.hpp"
#include "isometry.hpp"
#include "measurement.hpp"
#include "phase.hpp"
#include "quadrature.hpp"
#include "radial.hpp"
#include "report_io.hpp"
#include "rng.hpp"
#include "stats.hpp"
#include "verify.hpp"
