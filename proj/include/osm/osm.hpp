#pragma once

#include "osm/error.hpp"
#include "osm/specfun.hpp"
#include "osm/geometry.hpp"
#include "osm/forward.hpp"
#include "osm/indicators.hpp"
#include "osm/theory.hpp"
#include "osm/fresnelio.hpp"
#include "osm/mapio.hpp"
#include "osm/presets.hpp"
