#pragma once

#include "ctgame/analysis.hpp"
#include "ctgame/error.hpp"
#include "ctgame/events.hpp"
#include "ctgame/forcing.hpp"
#include "ctgame/game.hpp"
#include "ctgame/path_io.hpp"
#include "ctgame/pathgen.hpp"
#include "ctgame/price_path.hpp"
#include "ctgame/stats.hpp"
#include "ctgame/strategy.hpp"
#include "ctgame/variation.hpp"
#include "ctgame/version.hpp"
