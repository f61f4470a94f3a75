#pragma once

#include "sigrev/error.hpp"
#include "sigrev/core_model.hpp"
#include "sigrev/public_pricing.hpp"
#include "sigrev/mechanisms.hpp"
#include "sigrev/multi_bidder.hpp"
#include "sigrev/simplex.hpp"
#include "sigrev/lp_engine.hpp"
#include "sigrev/duality.hpp"
#include "sigrev/auctions.hpp"
#include "sigrev/generators.hpp"
#include "sigrev/io.hpp"
#include "sigrev/experiments.hpp"
