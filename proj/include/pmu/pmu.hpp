#pragma once

#include "pmu/case_io.hpp"
#include "pmu/feasibility.hpp"
#include "pmu/hbmo.hpp"
#include "pmu/network.hpp"
#include "pmu/observability.hpp"
#include "pmu/oracle.hpp"
#include "pmu/report.hpp"
