#pragma once

#include "tsn/admission.hpp"
#include "tsn/core.hpp"
#include "tsn/edf.hpp"
#include "tsn/latin.hpp"
#include "tsn/report.hpp"
#include "tsn/scenario.hpp"
#include "tsn/scheduler.hpp"
#include "tsn/switchsim.hpp"
