#pragma once

#include "transitheat/climate.hpp"
#include "transitheat/cohort.hpp"
#include "transitheat/csv.hpp"
#include "transitheat/equity.hpp"
#include "transitheat/exposure.hpp"
#include "transitheat/geo.hpp"
#include "transitheat/gtfs.hpp"
#include "transitheat/network.hpp"
#include "transitheat/orchestrator.hpp"
#include "transitheat/router.hpp"
#include "transitheat/thermal.hpp"
#include "transitheat/timeutil.hpp"
#include "transitheat/trajectory.hpp"
