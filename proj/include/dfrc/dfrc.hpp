#pragma once

#include "dfrc/errors.hpp"
#include "dfrc/scenario.hpp"
#include "dfrc/closed_form.hpp"
#include "dfrc/an_design.hpp"
#include "dfrc/conic.hpp"
#include "dfrc/sampling.hpp"
#include "dfrc/sdr.hpp"
#include "dfrc/parallel.hpp"
#include "dfrc/robust.hpp"
#include "dfrc/harness.hpp"
#include "dfrc/config.hpp"
