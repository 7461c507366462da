#pragma once

#include "aed/adaptive_test.hpp"
#include "aed/boundaries.hpp"
#include "aed/config.hpp"
#include "aed/design.hpp"
#include "aed/error.hpp"
#include "aed/mdd.hpp"
#include "aed/normal.hpp"
#include "aed/philox.hpp"
#include "aed/prop_test.hpp"
#include "aed/report.hpp"
#include "aed/root_finding.hpp"
#include "aed/simulation.hpp"
