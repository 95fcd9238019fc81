#pragma once

#include "inbetween/catalog_engine.hpp"
#include "inbetween/demo_space.hpp"
#include "inbetween/error.hpp"
#include "inbetween/glyph_space.hpp"
#include "inbetween/hex_projection.hpp"
#include "inbetween/render_svg.hpp"
#include "inbetween/service.hpp"
#include "inbetween/session_log.hpp"
#include "inbetween/trace_analytics.hpp"
