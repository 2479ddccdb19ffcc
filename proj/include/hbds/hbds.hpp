// Convenience header pulling in the whole simulator.

#pragma once

#include "hbds/audit.hpp"
#include "hbds/core.hpp"
#include "hbds/election.hpp"
#include "hbds/event_queue.hpp"
#include "hbds/experiment.hpp"
#include "hbds/honesty.hpp"
#include "hbds/ledger.hpp"
#include "hbds/metrics.hpp"
#include "hbds/mobility.hpp"
#include "hbds/routing.hpp"
#include "hbds/scenario.hpp"
#include "hbds/simulator.hpp"
#include "hbds/trace.hpp"
#include "hbds/watchdog.hpp"
