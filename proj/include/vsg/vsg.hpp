#pragma once

#include "vsg/config.hpp"
#include "vsg/controllers.hpp"
#include "vsg/csv.hpp"
#include "vsg/error.hpp"
#include "vsg/grid_model.hpp"
#include "vsg/metrics.hpp"
#include "vsg/simulator.hpp"
#include "vsg/smallsignal.hpp"
#include "vsg/trace.hpp"
