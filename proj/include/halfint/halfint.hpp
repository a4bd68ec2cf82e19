#pragma once

#include "arith.hpp"
#include "coeff_io.hpp"
#include "errors.hpp"
#include "expsums.hpp"
#include "harness.hpp"
#include "hecke.hpp"
#include "int128.hpp"
#include "lvalue.hpp"
#include "mollifier.hpp"
#include "parallel.hpp"
#include "qseries.hpp"
