#pragma once

#include "lpgarch/argarch.hpp"
#include "lpgarch/bds.hpp"
#include "lpgarch/calendar.hpp"
#include "lpgarch/diagnostics.hpp"
#include "lpgarch/error.hpp"
#include "lpgarch/fit_result.hpp"
#include "lpgarch/inference.hpp"
#include "lpgarch/logperiodic.hpp"
#include "lpgarch/lpfit.hpp"
#include "lpgarch/optimizer.hpp"
#include "lpgarch/parallel.hpp"
#include "lpgarch/serialization.hpp"
#include "lpgarch/simulate.hpp"
#include "lpgarch/stats.hpp"
#include "lpgarch/synth.hpp"
#include "lpgarch/timeseries.hpp"
#include "lpgarch/transform.hpp"
#include "lpgarch/unitroot.hpp"
