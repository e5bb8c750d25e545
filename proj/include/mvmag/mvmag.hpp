// mvmag.hpp
// Umbrella header.

#pragma once

#include "mvmag/data_ingest.hpp"
#include "mvmag/error.hpp"
#include "mvmag/frontier.hpp"
#include "mvmag/ground_state.hpp"
#include "mvmag/indicators.hpp"
#include "mvmag/model.hpp"
#include "mvmag/report.hpp"
#include "mvmag/selftest.hpp"
#include "mvmag/simplex_qp.hpp"
#include "mvmag/synthetic.hpp"
