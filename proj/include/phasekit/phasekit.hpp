#pragma once

#include "phasekit/error.hpp"
#include "phasekit/cyclic.hpp"
#include "phasekit/ensemble.hpp"
#include "phasekit/recovery.hpp"
#include "phasekit/rational.hpp"
#include "phasekit/injectivity.hpp"
#include "phasekit/hardness.hpp"
#include "phasekit/json_io.hpp"
