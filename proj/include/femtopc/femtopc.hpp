#pragma once

// Everything: units, geometry, channel, power control, link adaptation, the
// drop engine, metrics and sweeps.

#include "femtopc/units.hpp"
#include "femtopc/random.hpp"
#include "femtopc/log.hpp"
#include "femtopc/config.hpp"
#include "femtopc/deployment.hpp"
#include "femtopc/channel.hpp"
#include "femtopc/linkadapt.hpp"
#include "femtopc/powerctl.hpp"
#include "femtopc/engine.hpp"
#include "femtopc/metrics.hpp"
#include "femtopc/sweep.hpp"
