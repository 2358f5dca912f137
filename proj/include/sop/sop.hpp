#pragma once

#include "sop/annealing.hpp"
#include "sop/colony.hpp"
#include "sop/driver.hpp"
#include "sop/harness.hpp"
#include "sop/instance.hpp"
#include "sop/local_search.hpp"
#include "sop/random.hpp"
#include "sop/route.hpp"
