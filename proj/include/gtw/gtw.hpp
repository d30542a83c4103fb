#pragma once

#include "gtw/algebra.hpp"
#include "gtw/bits.hpp"
#include "gtw/caps.hpp"
#include "gtw/dot.hpp"
#include "gtw/duality.hpp"
#include "gtw/error.hpp"
#include "gtw/formula.hpp"
#include "gtw/formula_table.hpp"
#include "gtw/frame.hpp"
#include "gtw/free_dl.hpp"
#include "gtw/harness.hpp"
#include "gtw/heyting.hpp"
#include "gtw/json_io.hpp"
#include "gtw/kind.hpp"
#include "gtw/morphism.hpp"
#include "gtw/order.hpp"
#include "gtw/parser.hpp"
