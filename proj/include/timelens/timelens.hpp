#pragma once

#include "timelens/absorber.hpp"
#include "timelens/calibration.hpp"
#include "timelens/elements.hpp"
#include "timelens/envelope.hpp"
#include "timelens/errors.hpp"
#include "timelens/gaussian.hpp"
#include "timelens/jitter_mc.hpp"
#include "timelens/measurement.hpp"
#include "timelens/rng.hpp"
#include "timelens/scenario.hpp"
#include "timelens/units.hpp"
