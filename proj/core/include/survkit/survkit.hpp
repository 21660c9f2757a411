#pragma once

// Umbrella header: the whole public surface.

#include "survkit/competing.hpp"
#include "survkit/cox.hpp"
#include "survkit/design.hpp"
#include "survkit/diagnostics.hpp"
#include "survkit/km.hpp"
#include "survkit/panel.hpp"
#include "survkit/record.hpp"
#include "survkit/render.hpp"
#include "survkit/risk_index.hpp"
#include "survkit/simulate.hpp"
#include "survkit/stats.hpp"
