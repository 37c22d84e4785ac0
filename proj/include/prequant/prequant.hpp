// Convenience header pulling in the whole library.

#pragma once

#include "prequant/action.hpp"
#include "prequant/analysis.hpp"
#include "prequant/cocycle.hpp"
#include "prequant/errors.hpp"
#include "prequant/exact.hpp"
#include "prequant/geometry.hpp"
#include "prequant/groupoid.hpp"
#include "prequant/integer_lattice.hpp"
#include "prequant/periods.hpp"
#include "prequant/report.hpp"
#include "prequant/scenario.hpp"
#include "prequant/scenario_io.hpp"
#include "prequant/snapping.hpp"
#include "prequant/words.hpp"
